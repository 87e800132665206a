"""Command-line interface: outputs, determinism and exit codes."""

import json

import numpy as np
import pytest

from radpde.cli import main


def test_hardy_table_limit_column(tmp_path):
    rc = main(["--out", str(tmp_path), "hardy-table", "--kind", "hyperbolic",
               "--m", "3", "--p", "2", "--kappa", "1", "--rmax", "50"])
    assert rc == 0
    rows = (tmp_path / "hardy_table.csv").read_text().strip().splitlines()
    assert rows[0] == "r,chi,limit,ratio_to_limit"
    last = [float(x) for x in rows[-1].split(",")]
    assert abs(last[1] - 1.0) <= 1e-4


def test_green_subcommand(tmp_path):
    rc = main(["--out", str(tmp_path), "green", "--kind", "flat", "--m", "3"])
    assert rc == 0
    payload = json.loads((tmp_path / "green.json").read_text())
    assert payload["subcriticality"] == "subcritical"
    assert payload["asymptotic_class"] == "power"
    assert payload["schema_version"] == 1


def test_tone_subcommand(tmp_path):
    rc = main(["--out", str(tmp_path), "tone", "--kind", "flat", "--m", "3",
               "--radius", "2.0", "--inner", "1.0"])
    assert rc == 0
    payload = json.loads((tmp_path / "tone.json").read_text())
    assert payload["lambda"] == pytest.approx(np.pi ** 2, rel=1e-3)
    assert set(payload) >= {"lambda", "method", "iterations", "residual"}


def test_capacity_and_classify(tmp_path):
    rc = main(["--out", str(tmp_path), "capacity", "--kind", "flat", "--m", "3",
               "--rungs", "6"])
    assert rc == 0
    payload = json.loads((tmp_path / "capacity.json").read_text())
    assert payload["monotone"]
    assert payload["rungs"][0]["value"] == pytest.approx(4.0 * np.pi, rel=5e-3)
    rc = main(["--out", str(tmp_path), "classify", "--kind", "flat", "--m", "2",
               "--rungs", "8"])
    assert rc == 0
    payload = json.loads((tmp_path / "classify.json").read_text())
    assert payload["classification"] == "critical"
    assert (tmp_path / "ground_state.csv").exists()


SCENARIO = {
    "model": {"kind": "flat", "m": 3, "p": 2.0},
    "domain": {"kind": "ball", "radius": 8.0, "elements": 800, "rungs": 3,
               "ladder_factor": 3.0},
    "coefficients": {
        "a": {"kind": "bump", "amp": 0.2, "lo": 0.25, "hi": 1.0},
        "b": [{"kind": "bump", "amp": 0.3, "lo": 2.0, "hi": 3.0},
              {"kind": "bump", "amp": -0.01, "lo": 0.25, "hi": 1.0}],
    },
    "nonlinearity": {"kind": "power", "sigma": 3.0},
    "solver": {"epsilon": 0.5, "window": [0.25, 1.0]},
}


def test_solve_scenario_and_determinism(tmp_path):
    scn = tmp_path / "scenario.json"
    scn.write_text(json.dumps(SCENARIO))
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert main(["--out", str(out1), "solve", str(scn)]) == 0
    assert main(["--out", str(out2), "solve", str(scn)]) == 0
    assert (out1 / "solve.json").read_bytes() == (out2 / "solve.json").read_bytes()
    assert (out1 / "solution_0.csv").exists()
    payload = json.loads((out1 / "solve.json").read_text())
    rep = payload["reports"][0]
    assert rep["converged"]
    assert rep["sup_norm"] <= rep["upper_bound"] + 1e-9


def test_yamabe_scenario(tmp_path):
    scn = tmp_path / "yamabe.json"
    scn.write_text(json.dumps({
        "model": {"kind": "flat", "m": 4, "p": 2.0},
        "domain": {"kind": "ball", "radius": 4.0, "elements": 800, "rungs": 2,
                   "ladder_factor": 1.5},
        "curvature": {
            "s": {"kind": "gaussian", "amp": -0.5, "center": 0.0, "width": 1.0},
            "s_tilde": {"kind": "gaussian", "amp": 0.3, "center": 2.0, "width": 1.0},
        },
        "solver": {"epsilon": 0.3, "window": [0.5, 3.5]},
    }))
    out = tmp_path / "out"
    assert main(["--out", str(out), "yamabe", str(scn)]) == 0
    payload = json.loads((out / "yamabe.json").read_text())
    assert payload["uniform_equivalence"]
    assert 0.0 < payload["C1"] <= payload["C2"]


def test_missing_scenario_is_config_error(tmp_path):
    assert main(["--out", str(tmp_path), "solve",
                 str(tmp_path / "missing.json")]) == 2


def test_negative_radius_is_config_error(tmp_path):
    scn = tmp_path / "bad.json"
    bad = dict(SCENARIO, domain={"kind": "ball", "radius": -2.0})
    scn.write_text(json.dumps(bad))
    assert main(["--out", str(tmp_path), "solve", str(scn)]) == 2


def test_computational_failure_is_exit_one(tmp_path):
    scn = tmp_path / "deep.json"
    deep = json.loads(json.dumps(SCENARIO))
    deep["coefficients"]["b"][1]["amp"] = -5.0  # sinks b far below -delta
    scn.write_text(json.dumps(deep))
    assert main(["--out", str(tmp_path), "solve", str(scn)]) == 1
