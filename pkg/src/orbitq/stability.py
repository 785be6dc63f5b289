"""Stability classification and region drift vectors.

The criteria below are derived for the chain watched only while the server
is busy (idle excursions integrated out). Transfer of positive recurrence to
the full process is a conjecture, not a theorem; the simulator provides the
empirical check for that step, and :class:`StabilityReport` carries a note
to that effect.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

from .model import SystemParams, derive_rates

__all__ = ["DriftVectors", "StabilityReport", "drift_vectors", "check_stability"]

_CAVEAT = (
    "criteria proven for the busy-period censored chain; transfer to the "
    "full process is conjectural (checked empirically by simulation)"
)


@dataclass(frozen=True)
class DriftVectors:
    """Mean one-step drift (di, dj) of the censored walk, per region.

    Interior drifts (r1, r2, d) share the total sum
    (lambda_hat - mu_hat1 - mu_hat2) / (lambda + alpha1 + alpha2); the axis
    drifts (h, v) lose one retrial contribution because the empty orbit
    cannot fire during idle excursions.
    """

    r1: tuple
    r2: tuple
    d: tuple
    h: tuple
    v: tuple

    def to_dict(self):
        return asdict(self)


def drift_vectors(params: SystemParams) -> DriftVectors:
    """Per-region mean jump vectors of the censored (busy-only) walk."""
    l0, l1, l2 = params.lambda0, params.lambda1, params.lambda2
    lam = params.total_arrival_rate
    t = lam + params.alpha1 + params.alpha2
    mh1 = params.mu * params.alpha1
    mh2 = params.mu * params.alpha2

    r1 = (l1 - mh1 / t, l0 + l2 - mh2 / t)
    r2 = (l0 + l1 - mh1 / t, l2 - mh2 / t)
    d = ((r1[0] + r2[0]) / 2, (r1[1] + r2[1]) / 2)
    h = (l1 - mh1 / (lam + params.alpha1), l0 + l2)
    v = (l0 + l1, l2 - mh2 / (lam + params.alpha2))
    return DriftVectors(r1=r1, r2=r2, d=d, h=h, v=v)


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of the three positive-recurrence criteria plus regime flags.

    Exactly one criterion can hold for a given parameter set:

    1. ``rho1 < 1 and rho2 < 1 and rho < 1`` — both dedicated loads and the
       pooled load below capacity.
    2. ``rho1 >= 1 and f1 < 0`` — orbit 1 overloaded by its dedicated stream
       but the axis drift geometry still pulls the walk back.
    3. the mirror image for orbit 2.

    ``f1 = lambda*(lambda1+alpha1)/mu_hat1 - 1`` and symmetrically ``f2``;
    both are reported even when inactive, for diagnostics. Boundary cases
    (rho == 1, f == 0) are classified unstable: the criteria use strict
    inequalities, and the boundary is a convention, not a derived result.

    ``strongly_pooled``  : lambda_hat0 > |lambda_hat2 - lambda_hat1 +
    rho^2 (mu_hat1 - mu_hat2)| — smart traffic dominates the asymmetry.
    ``strongly_balanced``: gamma2 < rho*(gamma1 + lambda_hat0) and
    gamma1 < rho*(gamma2 + lambda_hat0) — the minimum direction dominates
    the difference direction. Neither flag implies the other.
    """

    criterion1: bool
    criterion2: bool
    criterion3: bool
    f1: float
    f2: float
    stable: bool
    strongly_pooled: bool
    strongly_balanced: bool
    rho: float
    rho1: float
    rho2: float
    pooled_margin: float
    note: str = _CAVEAT

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def check_stability(params: SystemParams) -> StabilityReport:
    """Evaluate the positive-recurrence criteria and the pooling flags."""
    d = derive_rates(params)
    lam = d.lam
    f1 = lam * (params.lambda1 + params.alpha1) / d.mu_hat1 - 1
    f2 = lam * (params.lambda2 + params.alpha2) / d.mu_hat2 - 1

    criterion1 = d.rho1 < 1 and d.rho2 < 1 and d.rho < 1
    criterion2 = d.rho1 >= 1 and f1 < 0
    criterion3 = d.rho2 >= 1 and f2 < 0

    asym = d.lambda_hat2 - d.lambda_hat1 + d.rho**2 * (d.mu_hat1 - d.mu_hat2)
    pooled_margin = d.lambda_hat0 - abs(asym)
    balanced = (
        d.gamma2 < d.rho * (d.gamma1 + d.lambda_hat0)
        and d.gamma1 < d.rho * (d.gamma2 + d.lambda_hat0)
    )

    return StabilityReport(
        criterion1=criterion1,
        criterion2=criterion2,
        criterion3=criterion3,
        f1=f1,
        f2=f2,
        stable=criterion1 or criterion2 or criterion3,
        strongly_pooled=pooled_margin > 0,
        strongly_balanced=balanced,
        rho=d.rho,
        rho1=d.rho1,
        rho2=d.rho2,
        pooled_margin=pooled_margin,
    )
