import json
import math
from pathlib import Path

import pytest

from ouexec import cli
from ouexec.errors import NumericalError

E = 2.718281828459045


def _write_config(tmp_path: Path, name: str, **overrides) -> Path:
    cfg = {"alpha": 1.0, "beta": 1.0, "sigma": 0.2, "F": 0.0, "t": 1.0,
           "w": 0.0, "phi": 3.0, "s": E}
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def _read_dir(out: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_solve_outputs(tmp_path):
    cfg = _write_config(tmp_path, "c.json", grid_points=200)
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert names == {"schedule.csv", "schedule.json", "zeta.svg",
                     "holdings.svg", "strategy.csv"}
    meta = json.loads((out / "schedule.json").read_text())
    assert meta["closed_form"] is True
    assert meta["regime"] == "large_holdings"
    assert meta["p_star"] + meta["density_integral"] + meta["q_star"] == \
        pytest.approx(3.0, abs=1e-9)
    header = (out / "schedule.csv").read_text().splitlines()[0]
    assert header == "r,xi_star,zeta_star,eta_star,expected_price"


def test_solve_gap_reports_no_closed_form(tmp_path):
    cfg = _write_config(tmp_path, "c.json", phi=1.5)
    out = tmp_path / "out"
    assert cli.main(["solve", "--config", str(cfg), "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} == {"schedule.json"}
    meta = json.loads((out / "schedule.json").read_text())
    assert meta["closed_form"] is False
    assert meta["regime"] == "gap"
    assert math.isfinite(meta["value"])


def test_converge_outputs(tmp_path):
    cfg = _write_config(tmp_path, "c.json", n_list=[1, 5, 25])
    out = tmp_path / "out"
    assert cli.main(["converge", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "convergence.csv").read_text().splitlines()
    assert lines[0] == "n,lambda_hat,psi_0,psi_last,objective,err_vs_continuous"
    assert len(lines) == 4
    assert lines[1].startswith("1,")
    errs = [float(row.split(",")[-1]) for row in lines[1:]]
    assert errs[0] > errs[1] > errs[2]
    assert (out / "convergence.svg").exists()


def test_simulate_flags_override_config(tmp_path):
    cfg = _write_config(tmp_path, "c.json", grid_points=100,
                        paths=50, steps=100, seed=3)
    out = tmp_path / "out"
    rc = cli.main(["simulate", "--config", str(cfg), "--out", str(out),
                   "--paths", "400", "--seed", "8"])
    assert rc == 0
    meta = json.loads((out / "simulate.json").read_text())
    assert meta["paths"] == 400
    assert meta["seed"] == 8
    assert meta["steps"] == 100
    assert "elapsed" not in meta
    assert meta["within_3_std_errors"] in (True, False)


def test_simulate_rounds_steps_up(tmp_path):
    cfg = _write_config(tmp_path, "c.json", grid_points=100,
                        paths=50, steps=150, seed=0)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    meta = json.loads((out / "simulate.json").read_text())
    assert meta["steps"] == 200  # rounded to a multiple of 100 cells


def test_verify_outputs(tmp_path):
    cfg = _write_config(tmp_path, "c.json", grid_points=100, paths=400,
                        steps=100, seed=1, n_list=[4, 16], delta_list=[0.1])
    out = tmp_path / "out"
    assert cli.main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "verify.csv").read_text().splitlines()
    assert lines[0] == "method,value,detail"
    methods = [row.split(",")[0] for row in lines[1:]]
    assert methods == ["continuous", "discrete", "brute_force",
                       "delta_family", "monte_carlo"]
    meta = json.loads((out / "verify.json").read_text())
    assert meta["discrete"]["n"] == 16
    assert meta["brute_force"]["n"] == 4
    assert abs(meta["discrete_minus_continuous"]) < 0.05
    assert meta["delta_family"][0]["value"] < meta["continuous_value"]


def test_manipulate_outputs(tmp_path):
    cfg = _write_config(tmp_path, "c.json", phi=0.0, s=1.0,
                        z_range=[2.0, 5.0], grid_points=100)
    out = tmp_path / "out"
    assert cli.main(["manipulate", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "manipulation.csv").read_text().splitlines()
    assert lines[0] == "z,L,bound,verified_profit"
    assert len(lines) == 201  # default 200 scan points
    meta = json.loads((out / "manipulation.json").read_text())
    assert meta["points"] == 200
    assert meta["first_profitable_z"] == pytest.approx(2.0)
    assert (out / "manipulation.svg").exists()


def test_manipulate_requires_flat_book(tmp_path):
    cfg = _write_config(tmp_path, "c.json")  # phi = 3
    assert cli.main(["manipulate", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 1


def test_solve_rerun_is_byte_identical(tmp_path):
    cfg = _write_config(tmp_path, "c.json", grid_points=150)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["solve", "--config", str(cfg), "--out", str(out1)]) == 0
    assert cli.main(["solve", "--config", str(cfg), "--out", str(out2)]) == 0
    assert _read_dir(out1) == _read_dir(out2)


def test_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha": 1.0, "beta": 1.0, "sigma": 0.2,
                               "F": 0.0, "t": 1.0, "w": 0.0, "phi": 3.0,
                               "s": E, "stray": 1}))
    assert cli.main(["solve", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 1


def test_missing_config_is_config_error(tmp_path):
    assert cli.main(["solve", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o")]) == 1


def test_gap_simulate_is_regime_error(tmp_path):
    cfg = _write_config(tmp_path, "c.json", phi=1.5)
    assert cli.main(["simulate", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 2


def test_numerical_failure_maps_to_exit_3(tmp_path, monkeypatch):
    cfg = _write_config(tmp_path, "c.json")

    def boom(*args, **kwargs):
        raise NumericalError("synthetic failure")

    monkeypatch.setitem(cli._COMMANDS, "solve", boom)
    assert cli.main(["solve", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 3


def test_bad_tolerance_rejected(tmp_path):
    cfg = _write_config(tmp_path, "c.json")
    assert cli.main(["solve", "--config", str(cfg), "--out",
                     str(tmp_path / "o"), "--tol", "-1"]) == 1


@pytest.mark.parametrize("key,value", [
    ("alpha", "x"), ("paths", 0), ("n_list", [0]), ("z_range", [2.0, 1.0]),
    ("delta_list", [-0.1]), ("tol", 0),
])
def test_config_validation_rejects(tmp_path, key, value):
    cfg = _write_config(tmp_path, "c.json", **{key: value})
    assert cli.main(["solve", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 1
