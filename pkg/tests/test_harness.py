import json

import pytest

from fragile import cli, harness
from fragile.constructions import canonical_u25, fano, r10
from fragile.fragility import ClassId
from fragile.harness import Cache, Report, Status, resolve_cache_dir
from fragile.io import from_text, read_matroid, write_matroid
from fragile.matroid import LinearMatroid


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_report_invariants():
    with pytest.raises(ValueError):
        Report("x", Status.FAIL)
    r = Report("x", "pass", {"a": 1})
    assert r.passed and json.loads(r.to_json())["status"] == "pass"
    assert Report(**r.to_dict()).to_dict() == r.to_dict()


def test_cache_dir_precedence(monkeypatch, tmp_path):
    monkeypatch.delenv("FRAGILE_CACHE_DIR", raising=False)
    assert str(resolve_cache_dir()) == "fragile-cache"
    monkeypatch.setenv("FRAGILE_CACHE_DIR", str(tmp_path / "env"))
    assert resolve_cache_dir() == tmp_path / "env"
    assert resolve_cache_dir(str(tmp_path / "flag")) == tmp_path / "flag"


def test_catalog_cache_roundtrip_and_version(tmp_path):
    c = Cache(tmp_path)
    levels = {5: [canonical_u25()]}
    path = c.save_catalog(ClassId.H5_FRAGILE, levels)
    back = c.load_catalog(ClassId.H5_FRAGILE)
    assert back[5][0].same_as(levels[5][0])
    assert c.load_catalog(ClassId.FANO_FRAGILE) is None
    data = json.loads(path.read_text())
    data["format"] = harness.FORMAT_VERSION + 1
    path.write_text(json.dumps(data))
    assert c.load_catalog(ClassId.H5_FRAGILE) is None
    path.write_text("{not json")
    assert c.load_catalog(ClassId.H5_FRAGILE) is None


def test_catalog_command(tmp_path, capsys):
    code, out, _ = run(["--cache-dir", str(tmp_path), "catalog", "--class", "h5", "--max-size", "7", "--format", "json"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["counts"] == {"5": 2, "6": 4, "7": 4}
    assert (tmp_path / "catalog-h5.json").exists()
    code, _, err = run(["--cache-dir", str(tmp_path), "catalog", "--class", "h5", "--max-size", "13"], capsys)
    assert code == 2 and "capped" in err


def test_construct_and_read_back(tmp_path, capsys):
    out_file = tmp_path / "u25.txt"
    code, _, _ = run(["--cache-dir", str(tmp_path), "construct", "--name", "U25", "-o", str(out_file)], capsys)
    assert code == 0 and read_matroid(out_file).same_as(canonical_u25())
    code, out, _ = run(["--cache-dir", str(tmp_path), "construct", "--name", "F7"], capsys)
    assert code == 0 and from_text(out).same_matroid(fano())


def test_construct_glue(tmp_path, capsys):
    from fragile import catalog
    from fragile.iso import isomorphic

    code, out, _ = run(
        ["--cache-dir", str(tmp_path), "construct", "--glue", "U25:(a,c,b):3", "--delete", "c,a"], capsys
    )
    assert code == 0 and isomorphic(from_text(out), catalog.named("Q6").matroid)


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--name", "NOPE"],
        ["construct", "--glue", "U25:a,b,c:3"],
        ["construct", "--glue", "U25:(a,b,c):3"],  # middle element kept
        ["construct", "--glue", "U25:(a,c,b):3", "--glue", "F7:(0,1,2):3"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    code, _, err = run(["--cache-dir", str(tmp_path)] + argv, capsys)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify"])
    assert exc.value.code == 2


def test_bad_base_file_exit_2(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("garbage\n")
    code, _, err = run(["--cache-dir", str(tmp_path), "verify", "--task", "N11", "--base", str(f)], capsys)
    assert code == 2 and "checksum" in err


def test_mutated_fixture_fails_with_witness(tmp_path, capsys):
    R = r10()
    A = R.reduced.copy()
    A[0, 0, 0] ^= 1
    bad = write_matroid(LinearMatroid(R.ring, A, R.labels), tmp_path / "r10-mutated.txt")
    code, out, _ = run(["--cache-dir", str(tmp_path), "verify", "--task", "N11", "--base", str(bad)], capsys)
    rep = json.loads(out)
    assert code == 1 and rep["status"] == "fail" and rep["witnesses"]
    for w in rep["witnesses"]:
        read_matroid(w)  # witnesses are valid matroid files


def test_unknown_task():
    with pytest.raises(KeyError):
        harness.verify("nope", Cache("/nonexistent"))


def test_ambiguity_exit_3(tmp_path, capsys, monkeypatch):
    from fragile.catalog import AmbiguityError

    def boom(*a, **k):
        raise AmbiguityError("two candidates")

    monkeypatch.setattr(harness, "verify_n11", boom)
    code, out, _ = run(["--cache-dir", str(tmp_path), "verify", "--task", "N11"], capsys)
    assert code == 3 and json.loads(out)["status"] == "ambiguous"
