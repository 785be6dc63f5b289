"""Closed-form stationary approximations on the whole orbit lattice.

Two evaluators: one for symmetric load (equal dedicated rates and equal
retrial rates) and a general one. Both produce, per cell (i, j) and server
phase, an unnormalized stationary weight of the form

    prefactor * (growth toward the diagonal)^min * (decay off-diagonal)^...
        * [1 + correction * contraction^min]

whose leading geometry matches the exact tail profile: along the diagonal
the weight decays at rho^2 per step, and off the diagonal at the same
geometric ratios the tail profile carries. The bracketed correction absorbs
the axis boundary effect and dies out geometrically away from the axes, so
the formulas are asymptotic — accurate when at least one orbit is long —
but evaluable everywhere.

The normalization constant is fixed at c = 1 by convention; every supported
comparison is a ratio or a matched-constant difference, so c never matters.
Pass ``normalize_grid`` to get weights rescaled to sum to one over a finite
window instead.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .model import SystemParams, derive_rates
from .stability import check_stability
from .tails import PoolingConditionError, StabilityConditionError

__all__ = [
    "ApproxWarning",
    "AsymmetricParamsError",
    "SymmetricApprox",
    "AsymmetricApprox",
    "approx_symmetric",
    "approx_asymmetric",
    "symmetric_coefficients",
    "asymmetric_coefficients",
    "ratio_curve",
    "approx_grid",
]

_SYM_RTOL = 1e-12


class ApproxWarning(UserWarning):
    """A closed-form approximation is being used outside its comfort zone."""


class AsymmetricParamsError(ValueError):
    """Symmetric evaluator called with asymmetric parameters."""


def _require_pooled_stable(params):
    report = check_stability(params)
    if not (report.rho < 1):
        raise StabilityConditionError(
            f"approximation needs rho < 1, got rho = {report.rho:.6g}"
        )
    if not report.strongly_pooled:
        raise PoolingConditionError(
            f"approximation needs strong pooling (margin {report.pooled_margin:.6g})"
        )
    return report


@dataclass(frozen=True)
class AsymmetricApprox:
    """Coefficient bundle for the general closed-form approximation.

    ``x_plus``/``x_minus`` govern the i < j branch (growth toward the
    diagonal and the correction contraction), ``y_plus``/``y_minus`` the
    i > j branch; ``A_minus``/``B_minus`` are the boundary-correction
    coefficients, and ``eps_plus``/``eps_minus`` the saddle curvatures whose
    square-root ratio sets the two off-diagonal prefactors.
    """

    x_plus: float
    x_minus: float
    y_plus: float
    y_minus: float
    A_minus: float
    B_minus: float
    eps_plus: float
    eps_minus: float
    c: float
    # internal geometry, precomputed once
    rho: float = field(repr=False, default=0.0)
    off_pos: float = field(repr=False, default=0.0)  # j-direction decay, i < j
    off_neg: float = field(repr=False, default=0.0)  # i-direction decay, i > j
    diag_coeff: float = field(repr=False, default=0.0)
    pref_lt: float = field(repr=False, default=0.0)  # sqrt(eps_minus/eps_plus)
    pref_gt: float = field(repr=False, default=0.0)  # sqrt(eps_plus/eps_minus)
    mu: float = field(repr=False, default=0.0)
    lam: float = field(repr=False, default=0.0)
    alpha1: float = field(repr=False, default=0.0)
    alpha2: float = field(repr=False, default=0.0)

    def idle_factor(self, i, j):
        """Exact idle/busy mass ratio at cell (i, j)."""
        denom = self.lam
        if i > 0:
            denom += self.alpha1
        if j > 0:
            denom += self.alpha2
        return self.mu / denom

    def busy(self, i, j):
        """Unnormalized busy-phase weight at (i, j)."""
        if i < j:
            bracket = 1.0 + self.A_minus * (self.x_minus / self.x_plus) ** i
            return self.c * self.pref_lt * self.x_plus**i * self.off_pos**j * bracket
        if i == j:
            return self.c * self.rho ** (2 * i) * self.diag_coeff
        bracket = 1.0 + self.B_minus * (self.y_minus / self.y_plus) ** j
        return self.c * self.pref_gt * self.off_neg**i * self.y_plus**j * bracket

    def log_busy(self, i, j):
        """log of :meth:`busy`; raises ValueError on a nonpositive bracket."""
        if i < j:
            bracket = 1.0 + self.A_minus * (self.x_minus / self.x_plus) ** i
            if bracket <= 0:
                raise ValueError(f"nonpositive correction bracket at ({i}, {j})")
            return (
                math.log(self.c * self.pref_lt)
                + i * math.log(self.x_plus)
                + j * math.log(self.off_pos)
                + math.log(bracket)
            )
        if i == j:
            return math.log(self.c * self.diag_coeff) + 2 * i * math.log(self.rho)
        bracket = 1.0 + self.B_minus * (self.y_minus / self.y_plus) ** j
        if bracket <= 0:
            raise ValueError(f"nonpositive correction bracket at ({i}, {j})")
        return (
            math.log(self.c * self.pref_gt)
            + i * math.log(self.off_neg)
            + j * math.log(self.y_plus)
            + math.log(bracket)
        )

    def value(self, i, j, server=1):
        v = self.busy(i, j)
        if server == 0:
            v *= self.idle_factor(i, j)
        return v


def asymmetric_coefficients(params: SystemParams, c: float = 1.0) -> AsymmetricApprox:
    """Build the coefficient bundle for the general approximation.

    Requires rho < 1 and strong pooling. If a correction contraction ratio
    fails to be < 1 the formulas are still evaluated (the condition is
    sufficient, not necessary) but an :class:`ApproxWarning` is emitted.
    """
    _require_pooled_stable(params)
    d = derive_rates(params)
    lam, rho = d.lam, d.rho
    r2 = rho * rho
    lh0, lh1, lh2 = d.lambda_hat0, d.lambda_hat1, d.lambda_hat2
    mh1, mh2 = d.mu_hat1, d.mu_hat2
    l0, l1, l2 = params.lambda0, params.lambda1, params.lambda2
    a1, a2 = params.alpha1, params.alpha2
    t = lam + a1 + a2

    eps_plus = (lh2 + mh1 * r2) * (lh0 + 2 * lh1 + 2 * mh2 * r2) / (2 * r2)
    eps_minus = (lh1 + mh2 * r2) * (lh0 + 2 * lh2 + 2 * mh1 * r2) / (2 * r2)

    x_plus = rho * (lh0 + lh1 + r2 * mh2) / (lh2 + r2 * mh1)
    x_minus = (lh0 + lh1) * (lh2 + r2 * mh1) / (mh1 * rho * (lh0 + lh1 + r2 * mh2))
    y_plus = rho * (lh0 + lh2 + r2 * mh1) / (lh1 + r2 * mh2)
    y_minus = (lh0 + lh2) * (lh1 + r2 * mh2) / (mh2 * rho * (lh0 + lh2 + r2 * mh1))

    # boundary-correction coefficients, from the axis balance equations
    a_num = (
        x_plus**2 * (mh1 * (lam + a2) / t + l2 * (lam + a2) / r2)
        - x_plus * (lam * (lam + a2) + mh2)
        + r2 * mh2
    )
    a_den = (
        x_plus * (lam * (lam + a2) + mh2)
        - ((l0 + l1) * (lam + a2) + r2 * mh2)
        - (l2 * (lam + a2) / r2) * x_plus**2
    )
    b_num = (
        y_plus**2 * (mh2 * (lam + a1) / t + l1 * (lam + a1) / r2)
        - y_plus * (lam * (lam + a1) + mh1)
        + r2 * mh1
    )
    b_den = (
        y_plus * (lam * (lam + a1) + mh1)
        - ((l0 + l2) * (lam + a1) + r2 * mh1)
        - (l1 * (lam + a1) / r2) * y_plus**2
    )
    A_minus = a_num / a_den
    B_minus = b_num / b_den

    if x_minus / x_plus >= 1:
        warnings.warn(
            "i<j correction ratio >= 1; the boundary term does not contract",
            ApproxWarning,
            stacklevel=2,
        )
    if y_minus / y_plus >= 1:
        warnings.warn(
            "i>j correction ratio >= 1; the boundary term does not contract",
            ApproxWarning,
            stacklevel=2,
        )

    pref_lt = math.sqrt(eps_minus / eps_plus)
    pref_gt = math.sqrt(eps_plus / eps_minus)
    diag_coeff = (
        (lh1 + r2 * mh2) * pref_gt + (lh2 + r2 * mh1) * pref_lt
    ) / (d.lambda_hat * (1 + rho))

    return AsymmetricApprox(
        x_plus=x_plus,
        x_minus=x_minus,
        y_plus=y_plus,
        y_minus=y_minus,
        A_minus=A_minus,
        B_minus=B_minus,
        eps_plus=eps_plus,
        eps_minus=eps_minus,
        c=c,
        rho=rho,
        off_pos=rho * (lh2 + r2 * mh1) / (lh0 + lh1 + r2 * mh2),
        off_neg=rho * (lh1 + r2 * mh2) / (lh0 + lh2 + r2 * mh1),
        diag_coeff=diag_coeff,
        pref_lt=pref_lt,
        pref_gt=pref_gt,
        mu=params.mu,
        lam=lam,
        alpha1=a1,
        alpha2=a2,
    )


@dataclass(frozen=True)
class SymmetricApprox:
    """Coefficient bundle for the symmetric-load approximation.

    Valid when lambda1 == lambda2 and alpha1 == alpha2. ``x_plus`` is the
    toward-diagonal growth factor, ``x_minus = (lambda_hat0 + lambda_hat_side)
    / (mu_hat * x_plus)`` the correction companion, ``A_minus`` the boundary
    coefficient shared by both off-diagonal wedges.
    """

    x_plus: float
    x_minus: float
    A_minus: float
    c: float
    lambda_hat: float = field(repr=False, default=0.0)
    lambda_hat0: float = field(repr=False, default=0.0)
    lambda_hat_side: float = field(repr=False, default=0.0)
    mu_hat: float = field(repr=False, default=0.0)
    off_diag: float = field(repr=False, default=0.0)
    diag_coeff: float = field(repr=False, default=0.0)
    mu: float = field(repr=False, default=0.0)
    lam: float = field(repr=False, default=0.0)
    alpha: float = field(repr=False, default=0.0)

    def idle_factor(self, i, j):
        return self.mu / (self.lam + self.alpha * ((i > 0) + (j > 0)))

    def busy(self, i, j):
        if i == j:
            return self.c * (self.lambda_hat / (2 * self.mu_hat)) ** (2 * i) * self.diag_coeff
        lo, hi = (i, j) if i < j else (j, i)
        bracket = 1.0 + self.A_minus * (self.x_minus / self.x_plus) ** lo
        return self.c * self.x_plus**lo * self.off_diag**hi * bracket

    def value(self, i, j, server=1):
        v = self.busy(i, j)
        if server == 0:
            v *= self.idle_factor(i, j)
        return v


def symmetric_coefficients(params: SystemParams, c: float = 1.0) -> SymmetricApprox:
    """Build the symmetric coefficient bundle; requires lambda_hat < 2 mu_hat.

    The boundary coefficient is taken from the axis balance equation
    directly (solving the idle-excursion flow at min(i, j) = 0), which keeps
    it consistent with the general bundle's ``A_minus`` at symmetric inputs.
    """
    rel = max(params.lambda1, params.lambda2, params.alpha1, params.alpha2)
    if (
        abs(params.lambda1 - params.lambda2) > _SYM_RTOL * max(rel, 1e-300)
        or abs(params.alpha1 - params.alpha2) > _SYM_RTOL * max(rel, 1e-300)
    ):
        raise AsymmetricParamsError(
            "parameters are asymmetric; use the general evaluator"
        )
    _require_pooled_stable(params)

    lam = params.total_arrival_rate
    alpha = params.alpha1
    lp = params.lambda1
    t = lam + 2 * alpha
    lh = lam * t
    lh0 = params.lambda0 * t
    lhp = lp * t
    mh = params.mu * alpha

    x_plus = lh * (lh**2 + 4 * mh * (lh0 + lhp)) / (2 * mh * (lh**2 + 4 * mh * lhp))
    x_minus = (lh0 + lhp) / (mh * x_plus)

    rho = lh / (2 * mh)
    r2 = rho * rho
    g = lam * (lam + alpha) + mh
    h = mh * (lam + alpha) / (lam + 2 * alpha)
    k = mh * r2 / x_plus
    m = lp * (lam + alpha) * x_plus / r2
    A_minus = (h * x_plus + k + m - g) / (g - h * x_minus - k - m)

    return SymmetricApprox(
        x_plus=x_plus,
        x_minus=x_minus,
        A_minus=A_minus,
        c=c,
        lambda_hat=lh,
        lambda_hat0=lh0,
        lambda_hat_side=lhp,
        mu_hat=mh,
        off_diag=lh * (lh**2 + 4 * lhp * mh) / (2 * mh * (lh**2 + 4 * (lh0 + lhp) * mh)),
        diag_coeff=(lh**2 + 4 * lhp * mh) / (lh * (lh + 2 * mh)),
        mu=params.mu,
        lam=lam,
        alpha=alpha,
    )


def approx_symmetric(params: SystemParams, i: int, j: int, server: int = 1,
                     c: float = 1.0) -> float:
    """Symmetric-load approximation at cell (i, j), server phase 0 or 1."""
    _check_cell(i, j, server)
    return symmetric_coefficients(params, c).value(i, j, server)


def approx_asymmetric(params: SystemParams, i: int, j: int, server: int = 1,
                      c: float = 1.0) -> float:
    """General closed-form approximation at cell (i, j), server phase 0 or 1.

    A nonpositive correction bracket (possible very close to the origin,
    where the asymptotic formula has no business being accurate) is reported
    via :class:`ApproxWarning`; the raw value is returned unclipped.
    """
    _check_cell(i, j, server)
    bundle = asymmetric_coefficients(params, c)
    value = bundle.value(i, j, server)
    if value <= 0:
        warnings.warn(
            f"approximation nonpositive at ({i}, {j}): correction bracket "
            "dominates this close to the origin",
            ApproxWarning,
            stacklevel=2,
        )
    return value


def _check_cell(i, j, server):
    if i < 0 or j < 0:
        raise ValueError(f"orbit sizes must be nonnegative, got ({i}, {j})")
    if server not in (0, 1):
        raise ValueError(f"server phase must be 0 or 1, got {server!r}")


def _bundle_for(params, c=1.0):
    if (
        abs(params.lambda1 - params.lambda2) <= _SYM_RTOL * max(params.lambda1, params.lambda2, 1e-300)
        and abs(params.alpha1 - params.alpha2) <= _SYM_RTOL * max(params.alpha1, params.alpha2)
    ):
        return symmetric_coefficients(params, c)
    return asymmetric_coefficients(params, c)


def _log_total(bundle, i, j):
    """log of (idle + busy) mass at a cell, stable for deep-tail cells."""
    if isinstance(bundle, SymmetricApprox):
        if i == j:
            lb = math.log(bundle.c * bundle.diag_coeff) + 2 * i * math.log(
                bundle.lambda_hat / (2 * bundle.mu_hat)
            )
        else:
            lo, hi = (i, j) if i < j else (j, i)
            bracket = 1.0 + bundle.A_minus * (bundle.x_minus / bundle.x_plus) ** lo
            if bracket <= 0:
                raise ValueError(f"nonpositive correction bracket at ({i}, {j})")
            lb = (
                math.log(bundle.c)
                + lo * math.log(bundle.x_plus)
                + hi * math.log(bundle.off_diag)
                + math.log(bracket)
            )
    else:
        lb = bundle.log_busy(i, j)
    return lb + math.log1p(bundle.idle_factor(i, j))


def ratio_curve(params: SystemParams, k_max: int, c: float = 1.0):
    """Successive ratios of the total-population weights Pr(k+1)/Pr(k).

    Pr(k) sums the idle + busy approximation over the anti-diagonal
    i + j = k (the only reading under which it is a function of k alone).
    Sums are accumulated in log space, so the curve stays finite far past
    the point where the raw weights underflow; the ratios tend to rho from
    above as k grows.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    bundle = _bundle_for(params, c)
    log_pr = []
    for k in range(k_max + 1):
        logs = [_log_total(bundle, i, k - i) for i in range(k + 1)]
        peak = max(logs)
        log_pr.append(peak + math.log(math.fsum(math.exp(x - peak) for x in logs)))
    return [(k, math.exp(log_pr[k + 1] - log_pr[k])) for k in range(k_max)]


def approx_grid(params: SystemParams, i_max: int, j_max: int, c: float = 1.0,
                normalize_grid: bool = False, near_field: int = 5):
    """Tabulate the applicable approximation over a rectangle of cells.

    Returns rows (i, j, server, value, regime_tag); cells with
    min(i, j) + |i - j| < ``near_field`` are tagged ``near-origin`` because
    the closed forms are asymptotic and unreliable there, everything else
    ``asymptotic``. With ``normalize_grid`` the values are rescaled to sum
    to one over the tabulated window.
    """
    bundle = _bundle_for(params, c)
    rows = []
    total = 0.0
    for i in range(i_max + 1):
        for j in range(j_max + 1):
            for server in (0, 1):
                v = bundle.value(i, j, server)
                total += v
                tag = "near-origin" if min(i, j) + abs(i - j) < near_field else "asymptotic"
                rows.append((i, j, server, v, tag))
    if normalize_grid:
        rows = [(i, j, s, v / total, tag) for (i, j, s, v, tag) in rows]
    return rows
