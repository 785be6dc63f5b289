"""Stability criteria, drift vectors, and the regime classification flags."""

import pytest
from hypothesis import given, strategies as st

from orbitq import SystemParams, check_stability, derive_rates, drift_vectors
from conftest import BENCH, POOLED_UNBALANCED

rate = st.floats(min_value=1e-3, max_value=2.0, allow_nan=False)


@st.composite
def param_sets(draw):
    return SystemParams(
        lambda0=draw(rate),
        lambda1=draw(rate),
        lambda2=draw(rate),
        mu=draw(rate),
        alpha1=draw(rate),
        alpha2=draw(rate),
    )


def test_benchmark_is_stable_pooled_balanced():
    rep = check_stability(BENCH)
    assert rep.criterion1
    assert not rep.criterion2 and not rep.criterion3
    assert rep.stable
    assert rep.strongly_pooled
    assert rep.strongly_balanced
    assert rep.pooled_margin == pytest.approx(0.0679127272727, rel=1e-9)


def test_pooled_but_unbalanced_preset():
    rep = check_stability(POOLED_UNBALANCED)
    assert rep.stable and rep.strongly_pooled
    assert not rep.strongly_balanced


def test_unstable_when_pooled_load_exceeds_one():
    rep = check_stability(SystemParams(0.3, 0.05, 0.01, 0.44, 0.25, 0.1))
    assert rep.rho > 1
    assert rep.rho1 < 1 and rep.rho2 < 1
    assert not rep.stable


def test_overloaded_orbit_stabilized_by_interception():
    # orbit 1 overloaded on its own (rho1 > 1) yet the chain is stable
    # because the idle-interception functional is negative
    rep = check_stability(SystemParams(0.005, 0.05, 0.005, 0.6, 0.02, 1.0))
    assert rep.rho1 > 1
    assert rep.f1 < 0
    assert rep.criterion2
    assert rep.stable


def test_overloaded_orbit_with_positive_interception_is_unstable():
    rep = check_stability(SystemParams(0.02, 0.3, 0.005, 0.6, 0.02, 1.0))
    assert rep.rho1 > 1
    assert rep.f1 > 0
    assert not rep.stable


@given(param_sets())
def test_stable_flag_is_disjunction_of_criteria(p):
    rep = check_stability(p)
    assert rep.stable == (rep.criterion1 or rep.criterion2 or rep.criterion3)


@given(param_sets())
def test_criteria_mutually_exclusive_with_criterion1(p):
    rep = check_stability(p)
    if rep.criterion1:
        assert not rep.criterion2 and not rep.criterion3


@given(param_sets())
def test_drift_sum_identity(p):
    # the interior drifts of the two ordering half-planes average to the
    # all-busy drift and their coordinate sums agree with the load gap
    dv = drift_vectors(p)
    d = derive_rates(p)
    t = p.total_arrival_rate + p.alpha1 + p.alpha2
    expected = (d.lambda_hat - d.mu_hat1 - d.mu_hat2) / t
    assert sum(dv.r1) == pytest.approx(expected, rel=1e-9, abs=1e-12)
    assert sum(dv.r2) == pytest.approx(expected, rel=1e-9, abs=1e-12)
    assert dv.d[0] == pytest.approx((dv.r1[0] + dv.r2[0]) / 2, abs=1e-12)
    assert dv.d[1] == pytest.approx((dv.r1[1] + dv.r2[1]) / 2, abs=1e-12)


def test_report_serializes(bench_params):
    rep = check_stability(bench_params)
    data = rep.to_dict()
    assert data["stable"] is True
    assert "note" in data
    assert "rho" in data
