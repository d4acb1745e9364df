import csv
import io
import json

import pytest

from ptwell import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eigen_both_columns(capsys):
    code, out, _ = run(capsys, "eigen", "--epsilon", "0.1", "--nmax", "3")
    rec = json.loads(out)
    assert code == 0 and rec["schema_version"] == "1" and rec["command"] == "eigen"
    assert rec["payload"]["columns"] == ["n", "re_exact", "im_exact", "re_perturbative",
                                         "im_perturbative", "abs_diff"]
    rows = rec["payload"]["rows"]
    assert [r[0] for r in rows] == [0, 1, 2, 3]
    assert all(r[-1] < 5 * 0.1**4 for r in rows)


def test_json_and_csv_agree(capsys):
    _, js, _ = run(capsys, "eigen", "--mode", "exact", "--nmax", "2")
    _, cs, _ = run(capsys, "eigen", "--mode", "exact", "--nmax", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(cs)))
    assert rows[0] == json.loads(js)["payload"]["columns"]
    for a, b in zip(json.loads(js)["payload"]["rows"], rows[1:]):
        assert [float(v) for v in a] == [float(v) for v in b]


def test_deterministic_output(capsys):
    first = run(capsys, "kernel", "--order", "2", "--grid", "9")[1]
    assert first == run(capsys, "kernel", "--order", "2", "--grid", "9")[1]


@pytest.mark.parametrize("order", ["1", "2"])
@pytest.mark.parametrize("convention", ["original", "symmetric"])
def test_kernel_vanishes_on_lattice_boundary(capsys, order, convention):
    _, out, _ = run(capsys, "kernel", "--order", order, "--grid", "11", "--convention", convention)
    rec = json.loads(out)
    lo, hi = (0.0, 3.141592653589793) if convention == "original" else (-1.5707963267948966, 1.5707963267948966)
    edge = [r for r in rec["payload"]["rows"] if r[0] in (lo, hi) or r[1] in (lo, hi)]
    assert len(edge) == 40
    assert max(abs(complex(r[2], r[3])) for r in edge) <= 1e-12


def test_output_file_and_csv_summary(capsys, tmp_path):
    path = tmp_path / "k.csv"
    code, out, err = run(capsys, "kernel", "--order", "1", "--grid", "5", "--format", "csv", "-o", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("x,y,re,im\n")
    assert "max_abs" in json.loads(err)


def test_verify_success_and_failure(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "fourier")
    assert code == 0 and json.loads(out)["summary"]["overall"] is True
    code, out, _ = run(capsys, "verify", "--suite", "qop", "--grid", "8")
    assert code == 1 and json.loads(out)["summary"]["failed"] > 0


def test_qop_summary(capsys):
    code, out, _ = run(capsys, "qop", "--epsilon", "0.1", "--grid", "32")
    rec = json.loads(out)
    assert code == 0 and len(rec["payload"]["rows"]) == 32 * 32
    assert rec["summary"]["max_discrepancy"] < 1e-3


@pytest.mark.parametrize("argv", [
    ["qop", "--epsilon", "0.5"],
    ["eigen", "--epsilon", "-1"],
    ["kernel", "--order", "3"],
    ["verify", "--suite", "nope"],
    [],
])
def test_bad_arguments_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_numerical_failure_exits_1(capsys, monkeypatch):
    def fail(*a, **k):
        raise cli.exact.SolverError("no root")
    monkeypatch.setattr(cli.exact, "solve_eigenvalue", fail)
    code, out, err = run(capsys, "eigen")
    assert code == 1 and out == "" and "SolverError" in json.loads(err)["error"]
