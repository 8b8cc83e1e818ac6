import json
import subprocess
import sys

import pytest

from factoredlift.cli import main

from .conftest import data_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_validate(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", "example1")
    assert code == 0 and out.rstrip().endswith("ok")
    code, data = run_json(capsys, "validate", "example2")
    assert code == 0 and data["k_omega"] == 9
    bad = json.load(open(data_path("example2.json")))
    bad["arcs"][2]["reverse"] = "loopv"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    code, _, err = run(capsys, "validate", str(p))
    assert code == 1 and "BadReversePairing" in err
    code, _, err = run(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 2
    p.write_text("{oops")
    assert run(capsys, "validate", str(p))[0] == 2


def test_validate_with_irrep_file(capsys):
    assert run(capsys, "validate", "example1", "--irreps", "d3")[0] == 0
    assert run(capsys, "validate", "example1", "--irreps", data_path("d3_irreps.json"))[0] == 0
    # D3 irreps do not fit a Z4 instance
    assert run(capsys, "validate", "fig1", "--irreps", "d3")[0] == 1


def test_expand(capsys):
    code, out, err = run(capsys, "expand", "fig1")
    assert code == 0
    assert err.strip() == "vertices=6 arcs=24"
    assert len(out.splitlines()) == 13
    for name in ("example1", "example2"):
        code, _, err = run(capsys, "expand", name, "--format", "dot")
        assert code == 0 and "vertices=9" in err
    code, data = run_json(capsys, "expand", "example1", "--check")
    assert code == 0 and data["vertices"] == 9
    code, _, err = run(capsys, "expand", "fig1", "--ordinary")
    assert err.strip() == "vertices=8 arcs=24"


def test_spectrum(capsys):
    for name in ("fig1", "example1", "example2"):
        code, data = run_json(capsys, "spectrum", name, "--method", "both")
        assert code == 0 and data["match"]["ok"]
    code, out, _ = run(capsys, "spectrum", "fig1")
    assert "{4, 0^[3], -2^[2]}" in out and "match: pass" in out
    code, data = run_json(capsys, "spectrum", "example2", "--method", "rep")
    vals = {(d["value"], d["multiplicity"]) for d in data["spectrum"]}
    assert vals == {(4.73205080757, 1), (2.0, 1), (1.26794919243, 1), (0.0, 2), (-1.0, 2), (-3.0, 2)}
    assert data["trimmed_zero_count"] == 3
    code, data = run_json(capsys, "spectrum", "example1", "--method", "direct", "--moments")
    assert code == 0 and len(data["moments"]) == 6 and "match" not in data
    code, out, _ = run(capsys, "spectrum", "example1", "--solver", "generic")
    assert code == 0


def test_spectrum_bad_tol(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "fig1", "--tol", "-1"])
    assert exc.value.code == 2


def test_spectrum_env_tol(capsys, monkeypatch):
    monkeypatch.setenv("FACTOREDLIFT_TOL", "1e-3")
    code, data = run_json(capsys, "spectrum", "fig1")
    assert data["tol"] == 1e-3
    monkeypatch.setenv("FACTOREDLIFT_TOL", "zero")
    assert run(capsys, "spectrum", "fig1")[0] == 2


def test_walks(capsys):
    code, out, _ = run(capsys, "walks", "fig1", "--vertex", "u", "--length", "5", "--oracle")
    assert code == 0
    assert "b_power=160 characters=160 oracle=160" in out
    code, data = run_json(capsys, "walks", "fig1", "--vertex", "v", "--length", "5", "--oracle")
    row = data["walks"][0]
    assert row["b_power"] == row["characters"] == row["oracle"] == 160
    assert row["entry"] == {"e": 80, "g^1": 80, "g^2": 80, "g^3": 80}
    code, data = run_json(capsys, "walks", "fig1", "--vertex", "u", "--length", "5")
    assert data["walks"][0]["entry"] == {"e": 160, "g^1": 176, "g^2": 160, "g^3": 176}
    code, data = run_json(capsys, "walks", "example1", "--length", "3")
    assert code == 0 and len(data["walks"]) == 3


def test_walks_length_zero_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["walks", "fig1", "--vertex", "u", "--length", "0"])
    assert exc.value.code == 2


def test_eigvecs(capsys):
    for name, k in (("fig1", 6), ("example1", 9), ("example2", 9)):
        code, out, _ = run(capsys, "eigvecs", name)
        assert code == 0 and out.rstrip().endswith(f"certified {k}/{k}")
    code, data = run_json(capsys, "eigvecs", "example2", "--check-independence")
    assert data["complete"] and all("independence_ranks" in e for e in data["eigenspaces"])
    code, data = run_json(capsys, "eigvecs", "example2")
    assert all("independence_ranks" not in e for e in data["eigenspaces"])


def test_selftest(capsys):
    code, data = run_json(capsys, "selftest", "--seed", "3", "--count", "10")
    assert code == 0 and data["failures"] == []


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "example1", "--format", "json"],
        ["eigvecs", "example2", "--format", "json", "--check-independence"],
        ["expand", "example1", "--format", "dot"],
        ["walks", "fig1", "--length", "4", "--oracle"],
    ],
)
def test_byte_identical_output(capsys, argv):
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "factoredlift.cli", "walks", "fig1", "--vertex", "v", "--length", "5"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "b_power=160 characters=160" in proc.stdout
