import json
import subprocess
import sys

import numpy as np
import pytest

from fxadequacy import __version__
from fxadequacy.cli import main
from fxadequacy.datasets import reference_panel_path
from fxadequacy.monetary import golden_checksum

REF = str(reference_panel_path())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert __version__ in out and golden_checksum() in out


def test_regress_builtin(capsys):
    rep = run_json(capsys, "regress", "--spec", "builtin:monetary_static", "--input", REF)
    assert rep["kind"] == "fit"
    assert rep["coefficients"]["m1-m2"] == 1.0
    assert 0.0 <= rep["r_squared"] <= 1.0


def test_regress_json_spec(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"response": "fx", "factors": ["inflation", "rate_ua"]}))
    rep = run_json(capsys, "regress", "--spec", str(spec), "--input", REF)
    assert rep["labels"] == ["const", "inflation", "rate_ua"]


def test_regress_lagged_with_y0(capsys):
    rep = run_json(capsys, "regress", "--spec", "builtin:monetary_lagged", "--input", REF, "--y0", "6.68")
    assert rep["labels"][-1] == "y[-1]"
    assert len(rep["residuals"]) == 12


def test_filter_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "filter", "--input", str(tmp_path / "nope.csv"))
    assert code == 2
    assert json.loads(err)["error"] == "input"


def test_filter_then_report(capsys, tmp_path):
    out = tmp_path / "traj.json"
    code, _, err = run(capsys, "filter", "--input", REF, "--out", str(out))
    assert code == 0, err
    code, table, _ = run(capsys, "report", str(out))
    assert code == 0
    assert "2012Q1" in table and "798.90" in table and "next" in table


def test_velocity_normalized(capsys):
    rep = run_json(capsys, "velocity", "--model", "static", "--params", "golden:§5",
                   "--input", REF, "--normalize")
    assert rep["values"][0] == 1.0
    assert len(rep["values"]) == 12


def test_velocity_lagged_drops_first_period(capsys):
    rep = run_json(capsys, "velocity", "--model", "lagged", "--params", "golden:§6", "--input", REF)
    assert rep["periods"][0] == "2012Q2"


def test_velocity_params_from_json(capsys, tmp_path):
    p = tmp_path / "params.json"
    p.write_text(json.dumps({"kind": "monetary_static", "b0": 0, "b1": 1, "b2": -1, "b3": 0.5}))
    rep = run_json(capsys, "velocity", "--params", str(p), "--input", REF)
    assert all(v > 0 for v in rep["values"])


def test_report_golden_prints_exact_text(capsys):
    code, out, _ = run(capsys, "report", "golden:§6")
    assert code == 0
    assert "b4 = 1.53031" in out
    assert "b1 = 1" in out


@pytest.mark.parametrize("form", [["--golden:§6"], ["--golden", "§6"], ["--golden", "monetary_lagged"]])
def test_forecast_golden_forms(capsys, form):
    rep = run_json(capsys, "forecast", *form, "--panel", REF)
    assert rep["kind"] == "forecast"
    assert rep["next_level"] == pytest.approx(np.exp(rep["next_log"]))


def test_identity_check(capsys, tmp_path):
    rng = np.random.default_rng(0)
    cols = {c: rng.normal(size=6) for c in ("m", "m_star", "y", "y_star", "i", "i_star")}
    cols["s"] = 0.3 + cols["m"] - cols["m_star"] - 0.8 * (cols["y"] - cols["y_star"]) + 0.05 * (cols["i"] - cols["i_star"])
    names = list(cols)
    lines = ["period," + ",".join(names)]
    for j, p in enumerate(["2001Q1", "2001Q2", "2001Q3", "2001Q4", "2002Q1", "2002Q2"]):
        lines.append(p + "," + ",".join(repr(float(cols[n][j])) for n in names))
    path = tmp_path / "id.csv"
    path.write_text("\n".join(lines) + "\n")
    rep = run_json(capsys, "identity-check", "--params", "0.3,0.8,0.05", "--input", str(path))
    assert max(abs(r) for r in rep["residuals"]) < 1e-12


def test_identity_check_missing_series(capsys):
    code, _, err = run(capsys, "identity-check", "--params", "0,1,0", "--input", REF)
    assert code == 3
    assert json.loads(err)["error"] == "spec"


def test_empty_trajectory_report(capsys, tmp_path):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"kind": "trajectory", "steps": []}))
    code, _, err = run(capsys, "report", str(path))
    assert code == 2
    assert json.loads(err)["error"] == "input"


def test_unknown_report_kind(capsys, tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps({"kind": "mystery"}))
    assert run(capsys, "report", str(path))[0] == 2


def test_report_consumes_every_artifact(capsys, tmp_path):
    jobs = {
        "fit": ["regress", "--spec", "builtin:monetary_static", "--input", REF],
        "traj": ["filter", "--input", REF],
        "vel": ["velocity", "--input", REF],
        "fc": ["forecast", "--golden", "§6", "--panel", REF],
    }
    for name, argv in jobs.items():
        out = tmp_path / f"{name}.json"
        assert run(capsys, *argv, "--out", str(out))[0] == 0
        code, text, err = run(capsys, "report", str(out))
        assert code == 0, (name, err)
        assert text.strip()


def test_outputs_are_deterministic(capsys, tmp_path):
    outputs = []
    for i in range(2):
        out = tmp_path / f"run{i}.json"
        run(capsys, "filter", "--input", REF, "--out", str(out))
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_synth_is_seeded(capsys):
    a = run(capsys, "--seed", "4", "synth", "--kind", "inflation", "--n", "6")[1]
    b = run(capsys, "--seed", "4", "synth", "--kind", "inflation", "--n", "6")[1]
    c = run(capsys, "--seed", "5", "synth", "--kind", "inflation", "--n", "6")[1]
    assert a == b != c
    assert a.count("\n") == 8


def test_synth_round_trips_into_regress(capsys, tmp_path):
    path = tmp_path / "syn.csv"
    assert run(capsys, "synth", "--kind", "monetary_static", "--n", "80", "--out", str(path))[0] == 0
    rep = run_json(capsys, "regress", "--spec", "builtin:monetary_static", "--input", str(path))
    assert rep["coefficients"]["g1-g2"] == pytest.approx(-1.15037, abs=0.2)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fxadequacy", "report", "golden:§5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "0.67707" in proc.stdout
