import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def cache(tmp_path_factory):
    """Catalog cache shared by the whole session.

    Honors FRAGILE_CACHE_DIR so repeated runs can reuse an enumeration.
    """
    from fragile.harness import Cache

    d = os.environ.get("FRAGILE_CACHE_DIR") or tmp_path_factory.mktemp("fragile-cache")
    return Cache(d)


@pytest.fixture(scope="session")
def h5_levels(cache):
    from fragile.fragility import ClassId
    from fragile.harness import ROLE_SIZE, ensure_catalog

    return ensure_catalog(ClassId.H5_FRAGILE, ROLE_SIZE, cache)


@pytest.fixture(scope="session")
def roles(h5_levels):
    from fragile import catalog

    return catalog.h5_roles()


# --- acceptance summary -----------------------------------------------------

_ACCEPTANCE: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    key, title = mark.args
    if rep.when == "call" or (rep.failed and key not in _ACCEPTANCE):
        _ACCEPTANCE[key] = ("PASS" if rep.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key, (status, title) in _ACCEPTANCE.items():
        terminalreporter.write_line(f"{status}  {key:<16} {title}")
