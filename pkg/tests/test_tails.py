"""Decay rate root-finding, the quadratic root identities, and the tail
profile's interior balance equation."""

import math

import pytest

from orbitq import (
    BalanceConditionError,
    DiscriminantError,
    PoolingConditionError,
    StabilityConditionError,
    SystemParams,
    decay_profile,
    derive_rates,
    f_value,
    halfplane_kernel,
    marginal_sum,
    quadratic_roots,
    solve_f,
    tail_evaluate,
)
from conftest import BENCH, POOLED_UNBALANCED, draw_pooled_stable


def test_root_equals_inverse_square_load(bench_params):
    z = solve_f(bench_params)
    assert z == pytest.approx(1.7148526077097505, abs=1e-8)
    rho = derive_rates(bench_params).rho
    assert z == pytest.approx(1.0 / rho**2, abs=1e-8)


def test_f_is_one_at_unit_argument_when_routing_dominates(rng):
    # f(1) = 1 needs the routed share to outweigh the raw (unweighted)
    # asymmetry of the two orbits; under the weaker pooling condition the
    # value can dip below 1 while the root identity still holds
    checked = 0
    while checked < 100:
        p = draw_pooled_stable(rng)
        d = derive_rates(p)
        gap = (d.mu_hat1 - d.mu_hat2) - (d.lambda_hat1 - d.lambda_hat2)
        if d.lambda_hat0 < abs(gap):
            continue
        assert f_value(p, 1.0) == pytest.approx(1.0, abs=1e-12)
        checked += 1


def test_root_identity_for_random_pooled_draws(rng):
    for _ in range(100):
        p = draw_pooled_stable(rng)
        d = derive_rates(p)
        assert f_value(p, 1.0 / d.rho**2) == pytest.approx(1.0, abs=1e-9)
        assert solve_f(p) == pytest.approx(1.0 / d.rho**2, abs=1e-8)


def test_f_is_one_at_found_root(bench_params):
    z = solve_f(bench_params)
    assert f_value(bench_params, z) == pytest.approx(1.0, abs=1e-10)


def test_discriminant_error_far_out(bench_params):
    with pytest.raises(DiscriminantError):
        f_value(bench_params, 1e6)


def test_quadratic_roots_closed_forms(rng):
    for _ in range(200):
        p = draw_pooled_stable(rng)
        d = derive_rates(p)
        z = 1.0 / d.rho**2
        eta_min, eta_max, theta_min, theta_max = quadratic_roots(p, z)
        eta_expected = sorted([d.rho, d.rho * d.gamma2 / (d.gamma1 + d.lambda_hat0)])
        theta_expected = sorted([d.rho, d.rho * d.gamma1 / (d.gamma2 + d.lambda_hat0)])
        assert eta_min == pytest.approx(eta_expected[0], abs=1e-10)
        assert eta_max == pytest.approx(eta_expected[1], abs=1e-10)
        assert theta_min == pytest.approx(theta_expected[0], abs=1e-10)
        assert theta_max == pytest.approx(theta_expected[1], abs=1e-10)


def test_profile_fields(bench_params):
    profile = decay_profile(bench_params)
    d = derive_rates(bench_params)
    assert profile.decay_rate == pytest.approx(d.rho**2, abs=1e-10)
    assert profile.rho == d.rho
    assert profile.x0 == 1.0
    t = bench_params.total_arrival_rate + bench_params.alpha1 + bench_params.alpha2
    assert profile.idle_factor == pytest.approx(bench_params.mu / t, rel=1e-12)
    assert 0 < profile.ratio_neg < 1
    assert 0 < profile.ratio_pos < 1
    assert profile.strongly_balanced


def test_profile_satisfies_interior_balance(bench_params):
    # the cross-sectional profile is an eigenvector of the half-plane walk
    # weighted by z^dm at z = 1/rho^2; residuals must vanish identically
    profile = decay_profile(bench_params)
    hk = halfplane_kernel(bench_params)
    z = 1.0 / profile.rho**2

    def interior_zone(l):
        return "-" if l <= -1 else ("2" if l == 0 else "+")

    for l_target in range(-10, 11):
        total = 0.0
        for l_src in (l_target - 1, l_target, l_target + 1):
            for (dm, dl), p in hk.row(interior_zone(l_src)).items():
                if l_src + dl == l_target:
                    total += profile.x(l_src) * z**dm * p
        assert total == pytest.approx(profile.x(l_target), rel=1e-10)


def test_tail_evaluate_server_split(bench_params):
    profile = decay_profile(bench_params)
    for m, l in [(3, 0), (5, -2), (4, 7)]:
        busy = tail_evaluate(profile, m, l, server=1)
        idle = tail_evaluate(profile, m, l, server=0)
        assert busy == pytest.approx(profile.decay_rate**m * profile.x(l), rel=1e-12)
        assert idle == pytest.approx(profile.idle_factor * busy, rel=1e-12)


def test_marginal_sum_matches_partial_sum(bench_params):
    profile = decay_profile(bench_params)
    partial = math.fsum(
        (1.0 + profile.idle_factor) * profile.x(l) for l in range(-200, 201)
    )
    assert marginal_sum(profile) == pytest.approx(partial, rel=1e-12)


def test_unstable_params_refused():
    with pytest.raises(StabilityConditionError):
        decay_profile(SystemParams(0.3, 0.05, 0.01, 0.44, 0.25, 0.1))


def test_weakly_pooled_params_refused():
    with pytest.raises(PoolingConditionError):
        decay_profile(SystemParams(0.01, 0.12, 0.01, 0.44, 0.25, 0.1))


def test_marginal_sum_refused_when_unbalanced():
    profile = decay_profile(POOLED_UNBALANCED)
    assert not profile.strongly_balanced
    with pytest.raises(BalanceConditionError):
        marginal_sum(profile)


def test_profile_serializes(bench_params):
    data = decay_profile(bench_params).to_dict()
    assert set(data) >= {"z_star", "decay_rate", "x0", "ratio_neg",
                         "ratio_pos", "strongly_balanced"}
