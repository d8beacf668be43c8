"""Smoke tests for the Python bindings: exercises class construction,
certificates, experiment runs, divergences, and bound formulas."""

import json
import math
import os

import numpy as np
import pytest

import _gpbandit as gp

SMALL_CONFIG = {
    "schema_version": 1,
    "name": "pysmoke",
    "setting": "standard_simple",
    "kernel": {"family": "matern", "lengthscale": 0.05, "nu": 1.0},
    "class": {
        "kind": "simplified_matern",
        "epsilon": 0.1,
        "B": 1.0,
        "dim": 1,
        "kappa": 1.0,
    },
    "algorithm": {"name": "gp_ucb", "delta": 0.1},
    "noise_var": 0.25,
    "horizon": 120,
    "replicates": 3,
    "seed": 5,
    "grid": {"per_axis": 64},
}


def test_kernel_closed_forms():
    k = gp.Kernel.matern(0.5, 0.2)
    assert k.at_distance(0.3) == pytest.approx(math.exp(-0.3 / 0.2), rel=1e-12)
    se = gp.Kernel.se(0.2)
    assert se.at_distance(0.3) == pytest.approx(
        math.exp(-(0.3**2) / (2 * 0.2**2)), rel=1e-12
    )
    assert se.at_distance(0.0) == 1.0


def test_class_build_and_certificates():
    cls = gp.build_simplified_matern_class(1.0, 0.05, 0.1, 1.0, 1)
    assert cls.M() == 5
    assert cls.width == pytest.approx(0.2)
    for i, f in enumerate(cls.members):
        assert f.norm_certificate <= 1.0
        center = cls.region_center(i)
        assert f(center) == pytest.approx(2 * cls.epsilon, rel=1e-9)
    # Peaks of distinct members never overlap.
    grid = gp.uniform_grid(1, 400)
    vals = np.column_stack([f.values(grid) for f in cls.members])
    assert np.all((np.abs(vals) > 1e-12).sum(axis=1) <= 1)


def test_experiment_run_is_deterministic():
    cfg = gp.parse_config(json.dumps(SMALL_CONFIG))
    a = gp.run_experiment(cfg, workers=4)
    b = gp.run_experiment(cfg, workers=1)
    assert gp.rows_csv(a.rows) == gp.rows_csv(b.rows)
    assert a.agg.n == 15 and a.agg.errored == 0
    assert a.agg.median_RT > 0


def test_csv_round_trip():
    cfg = gp.parse_config(json.dumps(SMALL_CONFIG))
    result = gp.run_experiment(cfg, workers=4)
    back = gp.parse_rows_csv(gp.rows_csv(result.rows))
    agg = gp.aggregate_rows(back)
    assert agg.median_RT == pytest.approx(result.agg.median_RT, abs=1e-12)
    assert agg.successes == result.agg.successes


def test_divergence_identities():
    assert gp.kl_gaussian(0.2, 0.0, 0.25) == pytest.approx(
        0.2**2 / (2 * 0.25), rel=1e-12
    )
    check = gp.relating_check(
        np.array([30.0, 10.0]), np.array([0.3, 0.1]), 0.05
    )
    assert check.lhs == pytest.approx(10.0)
    assert check.rhs == pytest.approx(math.log(1.0 / (2.4 * 0.05)))
    assert check.holds


def test_lower_bound_scalings():
    spec = gp.BoundSpec()
    spec.setting = "standard_simple"
    spec.family = "matern"
    spec.epsilon = 0.05
    spec.B = 1.0
    spec.noise_var = 0.25
    spec.delta = 0.1
    spec.dim = 1
    spec.nu = 1.0
    base = gp.lower_bound(spec)
    assert base > 0
    spec.delta = 0.01
    tighter = gp.lower_bound(spec)
    assert tighter == pytest.approx(base * math.log(100) / math.log(10))
    spec.delta = 0.5  # outside (0, 1/3)
    with pytest.raises(ValueError):
        gp.lower_bound(spec)


def test_info_gain_matches_hand_value():
    k = gp.Kernel.se(0.2)
    X = np.array([[0.5]])
    assert gp.info_gain(k, 1.0, X) == pytest.approx(0.5 * math.log(2.0))


def test_shipped_configs_parse():
    cfg_dir = os.environ.get("GPBANDIT_CONFIG_DIR")
    if not cfg_dir:
        pytest.skip("GPBANDIT_CONFIG_DIR not set")
    names = sorted(n for n in os.listdir(cfg_dir) if n.endswith(".json"))
    assert names, "no shipped configs found"
    for name in names:
        with open(os.path.join(cfg_dir, name)) as fh:
            text = fh.read()
        if "bound" in json.loads(text):
            curve = gp.bound_curve_csv(gp.parse_bound_query(text))
            lines = curve.strip().splitlines()
            assert lines[0] == "parameter,value,bound" and len(lines) >= 2
        else:
            cfg = gp.parse_config(text)
            assert cfg.name == name[: -len(".json")]
