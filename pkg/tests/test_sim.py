"""Simulator: reproducibility, backend agreement, and statistics plumbing."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitq import (
    HAVE_COMPILED,
    REGIME_PRESETS,
    SystemParams,
    regime_demo,
    simulate,
)
from orbitq import _simloop
from conftest import BENCH


def _strip_backend(summary):
    d = summary.to_dict()
    d.pop("backend")
    return d


def test_same_seed_same_run(bench_params):
    a = simulate(bench_params, 500.0, seed=42)
    b = simulate(bench_params, 500.0, seed=42)
    assert a.summary == b.summary
    np.testing.assert_array_equal(a.n1, b.n1)
    np.testing.assert_array_equal(a.n2, b.n2)
    np.testing.assert_array_equal(a.busy, b.busy)


def test_different_seed_different_run(bench_params):
    a = simulate(bench_params, 500.0, seed=1)
    b = simulate(bench_params, 500.0, seed=2)
    assert a.summary.n_events != b.summary.n_events or not np.array_equal(
        a.n1, b.n1)


@pytest.mark.skipif(not HAVE_COMPILED, reason="extension not built")
@given(seed=st.integers(min_value=0, max_value=2**64 - 1))
@settings(max_examples=25, deadline=None)
def test_backends_bit_identical(seed):
    py = simulate(BENCH, 200.0, seed=seed, backend="python")
    cy = simulate(BENCH, 200.0, seed=seed, backend="compiled")
    np.testing.assert_array_equal(py.n1, cy.n1)
    np.testing.assert_array_equal(py.n2, cy.n2)
    np.testing.assert_array_equal(py.busy, cy.busy)
    assert _strip_backend(py.summary) == _strip_backend(cy.summary)
    assert py.backend == "python" and cy.backend == "compiled"


def test_all_rates_zero_freezes_the_clock():
    # raw-loop call: an empty idle system with no arrivals has total rate 0,
    # and the loop must jump straight to the horizon instead of spinning
    out = _simloop.run_loop(0.0, 0.0, 0.0, 0.7, 0.0, 0.0,
                            10.0, 12345, 1.0, 0.0, 2)
    times, sn1, sn2, sbusy, n_events = out[:5]
    assert n_events == 0
    assert out[-1] == 10.0
    assert not sn1.any() and not sn2.any() and not sbusy.any()
    assert len(times) == 11


def test_batch_integrals_partition_the_totals():
    out = _simloop.run_loop(0.15, 0.05, 0.01, 0.44, 0.25, 0.1,
                            2000.0, 99, 1.0, 500.0, 16)
    (_, _, _, _, _, _, _, int_busy, int_min, batch_min, batch_busy,
     _) = out
    assert batch_min.sum() == pytest.approx(int_min, rel=1e-12)
    assert batch_busy.sum() == pytest.approx(int_busy, rel=1e-12)


def test_event_rate_within_physical_bounds(bench_params):
    traj = simulate(bench_params, 5000.0, seed=11)
    per_unit = traj.summary.n_events / 5000.0
    lam = bench_params.total_arrival_rate
    assert lam * 0.8 < per_unit < bench_params.uniformization_rate * 1.2


def test_long_run_matches_offered_load(bench_params):
    traj = simulate(bench_params, 2e5, seed=5)
    expected = bench_params.total_arrival_rate / bench_params.mu
    assert traj.summary.busy_fraction == pytest.approx(expected, abs=0.02)
    assert traj.summary.se_busy < 0.01


def test_snapshot_grid_shape(bench_params):
    traj = simulate(bench_params, 100.0, seed=0, sample_dt=0.5)
    assert len(traj.times) == 201
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(100.0)
    assert len(traj.n1) == len(traj.n2) == len(traj.busy) == 201


def test_trajectory_csv(bench_params):
    traj = simulate(bench_params, 10.0, seed=1, sample_dt=1.0)
    lines = traj.to_csv().strip().splitlines()
    assert lines[0] == "time,n1,n2,busy"
    assert len(lines) == 12
    assert all(len(line.split(",")) == 4 for line in lines[1:])


def test_warmup_defaults_to_half_horizon(bench_params):
    traj = simulate(bench_params, 80.0, seed=1)
    assert traj.summary.warmup == 40.0


@pytest.mark.parametrize("kwargs", [
    dict(horizon=0.0, seed=1),
    dict(horizon=-5.0, seed=1),
    dict(horizon=10.0, seed=1, sample_dt=0.0),
    dict(horizon=10.0, seed=1, warmup=10.0),
    dict(horizon=10.0, seed=1, warmup=-1.0),
    dict(horizon=10.0, seed=1, n_batches=1),
])
def test_rejects_bad_run_settings(bench_params, kwargs):
    with pytest.raises(ValueError):
        simulate(bench_params, **kwargs)


def test_rejects_unknown_backend(bench_params):
    with pytest.raises(ValueError):
        simulate(bench_params, 10.0, seed=1, backend="fortran")


@pytest.mark.parametrize("scenario,expect_stable", [
    ("criterion1-pooled", True),
    ("criterion1-unpooled", True),
    ("rho-ge-1", False),
    ("criterion2-stable", True),
    ("criterion2-unstable", False),
    ("criterion3-stable", True),
    ("criterion3-unstable", False),
    ("heavy-traffic-collapse", True),
])
def test_regime_presets_have_advertised_verdicts(scenario, expect_stable):
    demo = regime_demo(scenario, horizon=200.0, seed=3)
    assert demo.report.stable is expect_stable
    assert demo.description
    assert demo.trajectory.summary.n_events > 0


def test_regime_demo_rejects_unknown_scenario():
    with pytest.raises(ValueError, match="unknown scenario"):
        regime_demo("laplace-demon")


def test_regime_demo_accepts_explicit_params():
    params = SystemParams(0.1, 0.02, 0.02, 0.5, 0.2, 0.2)
    demo = regime_demo("custom", horizon=100.0, seed=1, params=params)
    assert demo.trajectory.params == params
    assert demo.description == "user supplied"


def test_preset_catalog_is_consistent():
    for name, (tup, description) in REGIME_PRESETS.items():
        params = SystemParams(*tup)
        assert params.mu > 0
        assert description
        assert name == name.lower()
