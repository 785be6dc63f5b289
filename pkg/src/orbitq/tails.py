"""Geometric tail profile of the stationary distribution.

In the difference/minimum frame (l, m) the busy-state stationary mass decays
as pi_{m,l}(1) ~ rho^(2m) * x_l for m -> infinity, where x_l is geometric on
each side of l = 0 with region-specific ratios. The profile is pinned down
by the root z* = rho^-2 of a scalar equation f(z) = 1 built from the two
quadratics whose roots carry the difference-direction geometry. This module
finds that root by bisection (independently of the closed form, so the two
can be cross-checked), evaluates the quadratic roots, assembles the profile,
and sums the invariant sequence for the minimum-direction marginal.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .model import SystemParams, derive_rates
from .stability import check_stability

__all__ = [
    "HypothesisError",
    "StabilityConditionError",
    "PoolingConditionError",
    "BalanceConditionError",
    "DiscriminantError",
    "DecayProfile",
    "solve_f",
    "f_value",
    "quadratic_roots",
    "decay_profile",
    "tail_evaluate",
    "marginal_sum",
]


class HypothesisError(ValueError):
    """A closed form was requested outside its domain of validity."""


class StabilityConditionError(HypothesisError):
    """Parameters are not stable by the pooled-load criterion."""


class PoolingConditionError(HypothesisError):
    """Parameters are not strongly pooled."""


class BalanceConditionError(HypothesisError):
    """Parameters are not strongly balanced."""


class DiscriminantError(HypothesisError):
    """A difference-direction quadratic has complex roots at the given z."""


def _beta(d, first, second, z):
    """Discriminant of the difference-direction quadratic for one side.

    ``first``/``second`` select the orbit orientation: (1, 2) gives the
    discriminant of the l < 0 side quadratic, (2, 1) the l > 0 side.
    """
    mh = {1: d.mu_hat1, 2: d.mu_hat2}
    lh = {1: d.lambda_hat1, 2: d.lambda_hat2}
    s = d.lambda_hat + d.mu_hat1 + d.mu_hat2
    return s * s - 4.0 * (mh[first] + (d.lambda_hat0 + lh[second]) * z) * (
        mh[second] / z + lh[first]
    )


def f_value(params: SystemParams, z: float) -> float:
    """The root function f at z (> 1). Raises if a discriminant is negative."""
    d = derive_rates(params)
    s = d.lambda_hat + d.mu_hat1 + d.mu_hat2
    b12 = _beta(d, 1, 2, z)
    b21 = _beta(d, 2, 1, z)
    if b12 < 0 or b21 < 0:
        which = "l<0 side" if b12 < 0 else "l>0 side"
        raise DiscriminantError(
            f"difference-direction discriminant ({which}) negative at z={z!r}"
        )
    neg = d.mu_hat2 / z + d.lambda_hat1
    pos = d.mu_hat1 / z + d.lambda_hat2
    return (neg + d.lambda_hat0 / 2) / (2 * neg) * (1 - math.sqrt(b12) / s) + (
        pos + d.lambda_hat0 / 2
    ) / (2 * pos) * (1 - math.sqrt(b21) / s)


def solve_f(params: SystemParams, tol: float = 1e-12) -> float:
    """Find the unique z > 1 with f(z) = 1 by bisection.

    The bracket starts just above 1, where f - 1 is negative (f(1) = 1 when
    the routed stream dominates the raw rate asymmetry, slightly below 1
    otherwise), and extends to the largest z keeping both discriminants
    nonnegative (the admissible set is an interval because each discriminant
    is concave in z). The root equals rho^-2; callers cross-check that
    identity rather than assuming it.
    """
    d = derive_rates(params)
    if d.rho >= 1:
        raise StabilityConditionError(
            f"no tail root sought for rho = {d.rho:.6g} >= 1"
        )
    lo = 1.0 + 1e-9
    if _beta(d, 1, 2, lo) < 0 or _beta(d, 2, 1, lo) < 0:
        raise DiscriminantError("discriminant negative at the lower bracket edge")
    sign_lo = math.copysign(1.0, f_value(params, lo) - 1.0)

    # march outward while the discriminants allow, looking for a sign change
    hi = 2.0
    prev = lo
    sign_hi = None
    while hi < 1e12:
        if _beta(d, 1, 2, hi) < 0 or _beta(d, 2, 1, hi) < 0:
            # shrink back onto the admissible interval's right edge
            bad = hi
            good = prev
            for _ in range(200):
                mid = 0.5 * (good + bad)
                if _beta(d, 1, 2, mid) < 0 or _beta(d, 2, 1, mid) < 0:
                    bad = mid
                else:
                    good = mid
            hi = good
            sign_hi = math.copysign(1.0, f_value(params, hi) - 1.0)
            break
        if math.copysign(1.0, f_value(params, hi) - 1.0) != sign_lo:
            sign_hi = -sign_lo
            break
        prev = hi
        hi *= 1.5
    if sign_hi is None or sign_hi == sign_lo:
        raise DiscriminantError(
            "f(z) - 1 does not change sign on the admissible bracket"
        )

    a, b = lo, hi
    while b - a > tol * max(1.0, a):
        mid = 0.5 * (a + b)
        if math.copysign(1.0, f_value(params, mid) - 1.0) == sign_lo:
            a = mid
        else:
            b = mid
    z_star = 0.5 * (a + b)
    if abs(f_value(params, z_star) - 1.0) > 1e-10:
        raise DiscriminantError(
            f"bisection converged to z={z_star!r} but |f(z)-1| > 1e-10"
        )
    return z_star


def quadratic_roots(params: SystemParams, z: float):
    """Roots (eta_min, eta_max, theta_min, theta_max) of the two quadratics.

    eta solves (mu_hat1 + (lambda_hat0+lambda_hat2) z) eta^2 - (lambda_hat +
    mu_hat1 + mu_hat2) eta + mu_hat2/z + lambda_hat1 = 0 (the l < 0 side);
    theta solves the mirror equation for the l > 0 side.
    """
    d = derive_rates(params)
    s = d.lambda_hat + d.mu_hat1 + d.mu_hat2
    b12 = _beta(d, 1, 2, z)
    b21 = _beta(d, 2, 1, z)
    if b12 < 0:
        raise DiscriminantError(f"l<0 side discriminant negative at z={z!r}")
    if b21 < 0:
        raise DiscriminantError(f"l>0 side discriminant negative at z={z!r}")
    lead_neg = 2 * (d.mu_hat1 + (d.lambda_hat0 + d.lambda_hat2) * z)
    lead_pos = 2 * (d.mu_hat2 + (d.lambda_hat0 + d.lambda_hat1) * z)
    eta_min = (s - math.sqrt(b12)) / lead_neg
    eta_max = (s + math.sqrt(b12)) / lead_neg
    theta_min = (s - math.sqrt(b21)) / lead_pos
    theta_max = (s + math.sqrt(b21)) / lead_pos
    return eta_min, eta_max, theta_min, theta_max


@dataclass(frozen=True)
class DecayProfile:
    """Everything needed to evaluate the geometric tail.

    ``decay_rate`` is rho^2 (per unit step of the minimum); ``ratio_neg`` /
    ``ratio_pos`` are the geometric ratios of x_l for l <= -1 / l >= 1 with
    prefactors ``prefactor_neg`` / ``prefactor_pos``; ``x0`` is the (free)
    normalization of the invariant sequence, fixed to 1 by convention.
    ``idle_factor`` = mu/(lambda+alpha1+alpha2) converts busy-state tail
    values to idle-state ones at m >= 1.
    """

    z_star: float
    decay_rate: float
    eta_min: float
    eta_max: float
    theta_min: float
    theta_max: float
    x0: float
    ratio_neg: float
    ratio_pos: float
    prefactor_neg: float
    prefactor_pos: float
    rho: float
    idle_factor: float
    strongly_balanced: bool

    def to_dict(self):
        return asdict(self)

    def x(self, l: int) -> float:
        """Invariant-sequence value x_l at the tail root."""
        if l == 0:
            return self.x0
        if l < 0:
            return self.prefactor_neg * self.x0 * self.ratio_neg ** (-l)
        return self.prefactor_pos * self.x0 * self.ratio_pos**l


def decay_profile(params: SystemParams) -> DecayProfile:
    """Assemble the tail profile; requires criterion 1 and strong pooling.

    The bisection root and the quadratic roots are computed numerically and
    carried alongside the closed-form ratios so downstream checks can compare
    the two derivations.
    """
    report = check_stability(params)
    if not report.criterion1:
        raise StabilityConditionError(
            "tail profile needs stability by criterion 1 "
            f"(rho={report.rho:.6g}, rho1={report.rho1:.6g}, rho2={report.rho2:.6g})"
        )
    if not report.strongly_pooled:
        raise PoolingConditionError(
            f"not strongly pooled (margin {report.pooled_margin:.6g} <= 0)"
        )

    d = derive_rates(params)
    z_star = solve_f(params)
    eta_min, eta_max, theta_min, theta_max = quadratic_roots(params, z_star)
    ratio_neg = d.rho * d.gamma2 / (d.gamma1 + d.lambda_hat0)
    ratio_pos = d.rho * d.gamma1 / (d.gamma2 + d.lambda_hat0)
    t = d.lam + params.alpha1 + params.alpha2
    return DecayProfile(
        z_star=z_star,
        decay_rate=d.rho**2,
        eta_min=eta_min,
        eta_max=eta_max,
        theta_min=theta_min,
        theta_max=theta_max,
        x0=1.0,
        ratio_neg=ratio_neg,
        ratio_pos=ratio_pos,
        prefactor_neg=(d.gamma2 + d.lambda_hat0 / 2) / d.gamma2,
        prefactor_pos=(d.gamma1 + d.lambda_hat0 / 2) / d.gamma1,
        rho=d.rho,
        idle_factor=params.mu / t,
        strongly_balanced=report.strongly_balanced,
    )


def tail_evaluate(profile: DecayProfile, m: int, l: int, server: int = 1) -> float:
    """Asymptotic stationary value at minimum m, difference l, server phase.

    Returns rho^(2m) * x_l for the busy phase; the idle phase carries the
    exact extra factor mu/(lambda+alpha1+alpha2) (valid for m >= 1, where
    both orbits are nonempty).
    """
    if m < 0:
        raise ValueError(f"minimum coordinate must be nonnegative, got {m}")
    if server not in (0, 1):
        raise ValueError(f"server phase must be 0 or 1, got {server!r}")
    value = profile.decay_rate**m * profile.x(l)
    if server == 0:
        value *= profile.idle_factor
    return value


def marginal_sum(profile: DecayProfile) -> float:
    """Prefactor of the conjectured minimum-direction marginal tail.

    Closed-form value of (1 + idle_factor) * sum over all l of x_l — the
    constant in P(min = m) ~ const * rho^(2m). The interchange of limit and
    summation behind that display is *conjectural* and only safely dominated
    when the difference direction decays faster than the minimum direction
    (strong balance), so anything else is refused.
    """
    if not profile.strongly_balanced:
        raise BalanceConditionError(
            "marginal tail sum diverges (or is unsupported) without strong "
            "balance: both geometric ratios must lie below the decay rate"
        )
    total = profile.x0 * (
        1.0
        + profile.prefactor_neg * profile.ratio_neg / (1.0 - profile.ratio_neg)
        + profile.prefactor_pos * profile.ratio_pos / (1.0 - profile.ratio_pos)
    )
    return (1.0 + profile.idle_factor) * total
