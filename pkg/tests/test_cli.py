import csv
import io

import numpy as np
import pytest

from majorana_dqd.analytic import current_closed_form
from majorana_dqd.cli import main
from majorana_dqd.model import reference_params

G = 0.01


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO("\n".join(ln for ln in text.splitlines() if not ln.startswith("#")))))


def test_phi_sweep_analytic_vs_numeric(capsys):
    code, out, _ = run(capsys, "sweep", "--symbol", "phi", "--from", "0", "--to", "6.2832", "--count", "17",
                       "--models", "analytic,effective-numeric", "--z", "+1,-1")
    assert code == 0
    data = rows(out)
    assert len(data) == 17 * 2 * 2
    assert list(data[0]) == ["phi", "z", "model", "current"]
    for a, n in zip(data[::2], data[1::2]):
        assert a["model"] == "analytic" and n["model"] == "effective-numeric"
        assert float(n["current"]) == pytest.approx(float(a["current"]), rel=1e-8)
    assert "# units:" in out and "# params:" in out and "majorana-dqd 0.1.0" in out


def test_sweep_is_deterministic(capsys, tmp_path):
    argv = ["sweep", "--symbol", "delta", "--from", "0", "--to", "0.03", "--count", "5",
            "--models", "analytic,effective-numeric", "--z", "+1"]
    _, first, _ = run(capsys, *argv)
    out = tmp_path / "a.csv"
    assert main(argv + ["--out", str(out), "--jobs", "3"]) == 0
    assert out.read_text() == first


def test_gamma_sweep_turnover(capsys):
    code, out, _ = run(capsys, "sweep", "--symbol", "gamma", "--from", "0", "--to", "0.1", "--count", "101",
                       "--delta", "2e-2", "--models", "analytic", "--z", "+1")
    assert code == 0
    cur = np.array([float(r["current"]) for r in rows(out)])
    assert np.argmax(cur) == 20  # gamma = 2 Gamma on a 0.1 Gamma grid
    assert cur[60] == pytest.approx(cur[0], rel=1e-12)


def test_delta_sweep_numeric_average(capsys):
    code, out, _ = run(capsys, "sweep", "--symbol", "Delta", "--from", "0", "--to", "0.05", "--count", "3",
                       "--models", "analytic,effective-numeric", "--z", "+1")
    assert code == 0
    data = rows(out)
    for a, n in zip(data[::2], data[1::2]):
        assert float(n["current"]) == pytest.approx(float(a["current"]), rel=1e-8)


def test_lambda0_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--symbol", "lambda0", "--from", "0", "--to", "0.02", "--count", "3",
                       "--models", "analytic", "--z", "+1")
    assert code == 0
    got = [float(r["current"]) for r in rows(out)]
    want = [current_closed_form(reference_params(lambda0=x)) for x in (0, 0.01, 0.02)]
    assert got == pytest.approx(want, rel=1e-15)


def test_visibility_command(capsys):
    code, out, _ = run(capsys, "visibility", "--from", "0", "--to", "0.2", "--count", "21", "--deltas", "0,0.02")
    assert code == 0
    data = rows(out)
    assert list(data[0]) == ["gamma", "delta", "V_closed_form", "V_swept"]
    for r in data:
        assert float(r["V_closed_form"]) == pytest.approx(float(r["V_swept"]), abs=1e-6)
    v0 = np.array([float(r["V_closed_form"]) for r in data if float(r["delta"]) == 0])
    assert v0[0] == pytest.approx(4 / 41, abs=1e-10) and np.all(np.diff(v0) > 0)
    v2 = np.array([float(r["V_closed_form"]) for r in data if float(r["delta"]) == 0.02])
    assert np.argmin(v2) == 2


@pytest.mark.parametrize("target,dng,expect", [
    ("shortcut", "0,0", "total=0 "),
    ("stabilizer", "0,0,0,0", "total=16 "),
    ("code", "0,0,0,0", "partition=16@0.125 8@0.0625"),
])
def test_enumerate_command(capsys, target, dng, expect):
    code, out, _ = run(capsys, "enumerate", "--target", target, "--dng", dng, "--ec", "1")
    assert code == 0
    summary = out.strip().splitlines()[-1]
    assert expect in summary and summary.endswith("status=PASS")


def test_enumerate_qubit(capsys):
    code, out, _ = run(capsys, "enumerate", "--target", "qubit", "--lambda1", "0.1", "--lambda2", "0.1", "--ec", "1")
    assert code == 0 and "status=PASS" in out


def test_compare_models_pass(capsys):
    code, out, err = run(capsys, "compare-models", "--count", "17")
    assert code == 0
    data = rows(out)
    assert {r["status"] for r in data} == {"PASS"}
    assert len(data) == 4


def test_compare_models_strong_coupling_fails(capsys):
    code, out, err = run(capsys, "compare-models", "--count", "5", "--lambda1", "0.3", "--lambda2", "0.3")
    assert code == 1
    assert "max relative deviation" in err and "ValidityWarning" in err


def test_compare_models_decoupled_island(capsys):
    code, out, _ = run(capsys, "compare-models", "--count", "5", "--lambda1", "0", "--lambda2", "0")
    assert code == 0
    assert all(float(r["max_rel_dev"]) < 1e-12 for r in rows(out))


@pytest.mark.parametrize("argv", [
    ["sweep", "--symbol", "phi", "--from", "0", "--to", "1", "--count", "1"],
    ["sweep", "--symbol", "phi", "--from", "0", "--to", "1", "--models", "nope"],
    ["sweep", "--symbol", "phi", "--from", "0", "--to", "1", "--z", "2"],
    ["sweep", "--symbol", "gamma", "--from", "-1", "--to", "1"],
    ["sweep", "--symbol", "kappa", "--from", "0", "--to", "1"],
    ["sweep", "--symbol", "phi", "--from", "0", "--to", "1", "--Gamma", "-1"],
    ["enumerate", "--target", "code", "--dng", "0,0"],
    ["enumerate", "--target", "shortcut", "--dng", "0.6,0"],
    ["visibility", "--deltas", "a,b"],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_solver_failure_exit_code(capsys, monkeypatch):
    from majorana_dqd import cli
    from majorana_dqd.redfield import SteadyStateError

    def boom(*a, **k):
        raise SteadyStateError("forced")

    monkeypatch.setattr(cli, "solve", boom)
    code, _, err = run(capsys, "sweep", "--symbol", "phi", "--from", "0", "--to", "1", "--count", "2",
                       "--models", "effective-numeric")
    assert code == 3 and "solver failure" in err
