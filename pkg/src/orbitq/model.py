"""Model primitives: input rates, derived quantities, and transition blocks.

The system is a single exponential server fed by three Poisson streams and
backed by two infinite retrial orbits. A blocked "smart" arrival (rate
``lambda0``) joins the shorter orbit, ties split 1/2; blocked dedicated
arrivals (rates ``lambda1``, ``lambda2``) always join their own orbit. Each
orbit re-attempts service at a constant rate (``alpha1``, ``alpha2``)
regardless of how many jobs it holds; a retrial succeeds only if the server
is idle. The state is (n1, n2, c) with c = 0 (idle) or 1 (busy).

Everything downstream (stability criteria, censored kernels, tail profiles,
approximations) consumes the :class:`DerivedRates` computed here, so this
module is the single source of truth for those definitions.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "SystemParams",
    "DerivedRates",
    "TransitionBlock",
    "REGIONS",
    "derive_rates",
    "region_of",
    "transition_blocks",
]

#: Lattice region tags for the orbit plane (i, j) = (n1, n2):
#:   r1: i > j > 0      (first orbit strictly longer, both busy regions interior)
#:   r2: j > i > 0      (second orbit strictly longer)
#:   d:  i = j > 0      (diagonal, equal nonempty orbits)
#:   h:  i > 0, j = 0   (horizontal axis)
#:   v:  j > 0, i = 0   (vertical axis)
#:   O:  i = j = 0      (origin)
REGIONS = ("r1", "r2", "d", "h", "v", "O")

IDLE, BUSY = 0, 1


@dataclass(frozen=True)
class SystemParams:
    """The six exogenous rates of the model (per unit time).

    Parameters
    ----------
    lambda0 : float
        Arrival rate of the smart stream (blocked jobs join the shorter orbit).
    lambda1, lambda2 : float
        Arrival rates of the dedicated streams for orbit 1 / orbit 2. May be
        zero (pure-smart traffic), in which case ``lambda0`` must be positive.
    mu : float
        Service rate.
    alpha1, alpha2 : float
        Constant retrial rates of the two orbits. Strictly positive.
    """

    lambda0: float
    lambda1: float
    lambda2: float
    mu: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        for name in ("lambda0", "lambda1", "lambda2", "mu", "alpha1", "alpha2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value!r}")
        for name in ("mu", "alpha1", "alpha2"):
            if getattr(self, name) == 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.lambda0 == 0 and (self.lambda1 == 0 or self.lambda2 == 0):
            raise ValueError(
                "lambda0 may be zero only if both lambda1 and lambda2 are positive"
            )

    @property
    def total_arrival_rate(self):
        """lambda = lambda0 + lambda1 + lambda2."""
        return self.lambda0 + self.lambda1 + self.lambda2

    @property
    def uniformization_rate(self):
        """theta = lambda + mu + alpha1 + alpha2, the uniformization constant."""
        return self.total_arrival_rate + self.mu + self.alpha1 + self.alpha2

    def scaled(self, factor):
        """Return a copy with every rate multiplied by ``factor`` (> 0)."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return SystemParams(
            self.lambda0 * factor,
            self.lambda1 * factor,
            self.lambda2 * factor,
            self.mu * factor,
            self.alpha1 * factor,
            self.alpha2 * factor,
        )

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        missing = [k for k in ("lambda0", "lambda1", "lambda2", "mu", "alpha1", "alpha2")
                   if k not in data]
        if missing:
            raise ValueError(f"missing parameter keys: {', '.join(missing)}")
        return cls(
            float(data["lambda0"]),
            float(data["lambda1"]),
            float(data["lambda2"]),
            float(data["mu"]),
            float(data["alpha1"]),
            float(data["alpha2"]),
        )

    @classmethod
    def from_json(cls, path):
        """Load parameters from a JSON document with the six rate keys."""
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class DerivedRates:
    """Rate-squared quantities and loads derived from :class:`SystemParams`.

    With t = lambda + alpha1 + alpha2:

    - ``lambda_hat``  = lambda * t, and ``lambda_hat_k`` = lambda_k * t
    - ``mu_hat_1/2``  = mu * alpha_1/2 (effective orbit drain rates)
    - ``rho``         = lambda_hat / (mu_hat_1 + mu_hat_2), the system load
    - ``rho1/rho2``   = lambda_hat_k / mu_hat_k, per-orbit dedicated loads
      (0 when the dedicated stream is absent)
    - ``gamma1``      = mu_hat_1 * rho**2 + lambda_hat_2 and symmetrically
      ``gamma2``; these drive the difference-direction geometric ratios.

    All fields are degree-2 homogeneous in the raw rates, so every
    dimensionless combination is invariant under uniform rescaling.
    """

    lam: float
    lambda_hat: float
    lambda_hat0: float
    lambda_hat1: float
    lambda_hat2: float
    mu_hat1: float
    mu_hat2: float
    rho: float
    rho1: float
    rho2: float
    gamma1: float
    gamma2: float

    def to_dict(self):
        return asdict(self)


def derive_rates(params: SystemParams) -> DerivedRates:
    """Compute all derived quantities for ``params``.

    The identity gamma1 + gamma2 + lambda_hat0 = rho * (lambda_hat + mu_hat1
    + mu_hat2) holds exactly (used as a numerical self-check downstream).
    """
    lam = params.total_arrival_rate
    t = lam + params.alpha1 + params.alpha2
    lambda_hat = lam * t
    lh0 = params.lambda0 * t
    lh1 = params.lambda1 * t
    lh2 = params.lambda2 * t
    mh1 = params.mu * params.alpha1
    mh2 = params.mu * params.alpha2
    rho = lambda_hat / (mh1 + mh2)
    rho1 = lh1 / mh1 if params.lambda1 > 0 else 0.0
    rho2 = lh2 / mh2 if params.lambda2 > 0 else 0.0
    return DerivedRates(
        lam=lam,
        lambda_hat=lambda_hat,
        lambda_hat0=lh0,
        lambda_hat1=lh1,
        lambda_hat2=lh2,
        mu_hat1=mh1,
        mu_hat2=mh2,
        rho=rho,
        rho1=rho1,
        rho2=rho2,
        gamma1=mh1 * rho**2 + lh2,
        gamma2=mh2 * rho**2 + lh1,
    )


def region_of(i: int, j: int) -> str:
    """Region tag of lattice point (i, j); exactly one tag per point."""
    if i < 0 or j < 0:
        raise ValueError(f"orbit sizes must be nonnegative, got ({i}, {j})")
    if i == 0 and j == 0:
        return "O"
    if j == 0:
        return "h"
    if i == 0:
        return "v"
    if i == j:
        return "d"
    return "r1" if i > j else "r2"


@dataclass(frozen=True)
class TransitionBlock:
    """One uniformized jump block: direction and its 2x2 server-phase matrix.

    ``matrix[k, k']`` is the probability of jumping by ``direction`` in the
    orbit plane while the server phase moves k -> k' (0 = idle, 1 = busy),
    in the uniformized chain (all rates divided by theta).
    """

    direction: tuple
    matrix: np.ndarray


def transition_blocks(params: SystemParams, region: str):
    """Uniformized transition blocks of the (n1, n2, c) chain in ``region``.

    Returns the list of :class:`TransitionBlock` for every direction with a
    nonzero block, including the (0, 0) self block. The blocks of a region
    sum to a row-stochastic matrix (uniformization with theta).

    Rates by phase:

    - idle row: an arrival (any stream) starts service in place; a retrial
      from a nonempty orbit moves that orbit down by one and starts service.
    - busy row: dedicated arrival pushes its orbit up; a smart arrival pushes
      the *shorter* orbit up (split 1/2 on the diagonal); service completion
      drops to idle in place.
    """
    if region not in REGIONS:
        raise ValueError(f"unknown region {region!r}, expected one of {REGIONS}")
    l0, l1, l2 = params.lambda0, params.lambda1, params.lambda2
    mu, a1, a2 = params.mu, params.alpha1, params.alpha2
    lam = params.total_arrival_rate
    theta = params.uniformization_rate

    # busy-row arrival rates by direction, depending on which orbit is shorter
    if region in ("r1", "h"):        # j shorter (or empty): smart joins orbit 2
        up1, up2 = l1, l0 + l2
    elif region in ("r2", "v"):      # i shorter: smart joins orbit 1
        up1, up2 = l0 + l1, l2
    else:                            # diagonal and origin: split the smart stream
        up1, up2 = l1 + l0 / 2, l2 + l0 / 2

    has_orbit1 = region in ("r1", "r2", "d", "h")
    has_orbit2 = region in ("r1", "r2", "d", "v")

    idle_self = mu + (0.0 if has_orbit1 else a1) + (0.0 if has_orbit2 else a2)

    blocks = []

    def add(di, dj, m):
        blocks.append(TransitionBlock((di, dj), np.asarray(m, dtype=float) / theta))

    add(1, 0, [[0.0, 0.0], [0.0, up1]])
    add(0, 1, [[0.0, 0.0], [0.0, up2]])
    if has_orbit1:
        add(-1, 0, [[0.0, a1], [0.0, 0.0]])
    if has_orbit2:
        add(0, -1, [[0.0, a2], [0.0, 0.0]])
    add(0, 0, [[idle_self, lam], [mu, a1 + a2]])
    return blocks
