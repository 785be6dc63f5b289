"""Single-orbit reference system: a two-phase quasi-birth-death chain.

Merging the two orbits into one (every blocked job joins a common orbit that
retries at rate alpha1 + alpha2) yields a level-independent QBD whose level
is the orbit size and whose phase is the server state. Its stationary
distribution is matrix-geometric and its tail decay rate factors in closed
form to zeta = rho — the square root of the joint system's minimum-direction
decay rate — which is what makes it a useful comparison point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .model import SystemParams, derive_rates
from .tails import StabilityConditionError

__all__ = ["ReferenceQBD", "reference_blocks", "reference_qbd",
           "reference_decay_rate", "reference_stationary"]

_R_TOL = 1e-14
_R_MAXITER = 100_000


def reference_blocks(params: SystemParams):
    """Generator blocks (level up, in-level, level down) plus boundary rows.

    Returns a dict with keys ``up``, ``local``, ``down`` (homogeneous part,
    levels >= 2) and ``local0``, ``local1``, ``down1`` (level-0 and level-1
    boundary corrections: an empty orbit cannot retry, and from level 1 only
    the first orbit's retrial stream is active — a quirk kept deliberately,
    it does not affect the decay rate). Phase order: (idle, busy).
    """
    lam = params.total_arrival_rate
    mu, a1, a2 = params.mu, params.alpha1, params.alpha2
    up = np.array([[0.0, 0.0], [0.0, lam]])
    down = np.array([[0.0, a1 + a2], [0.0, 0.0]])
    local = np.array([[-(lam + a1 + a2), lam], [mu, -(lam + mu)]])
    return {
        "up": up,
        "down": down,
        "local": local,
        "local0": np.array([[-lam, lam], [mu, -(lam + mu)]]),
        "local1": np.array([[-(lam + a1), lam], [mu, -(lam + mu)]]),
        "down1": np.array([[0.0, a1], [0.0, 0.0]]),
    }


@dataclass(frozen=True)
class ReferenceQBD:
    """Blocks, rate matrix, and decay rate of the merged-orbit system."""

    blocks: dict
    R: np.ndarray
    zeta: float
    rho: float = field(repr=False, default=0.0)


def reference_decay_rate(params: SystemParams) -> float:
    """Tail decay rate zeta: the root in (0, 1) of the block determinant.

    det(up + local*z + down*z^2) factors as z (1 - z) (z (mu_hat1 + mu_hat2)
    - lambda_hat), so zeta always equals rho; the root is still located
    numerically so the identity stays a test, not an assumption.
    """
    d = derive_rates(params)
    if d.rho >= 1:
        raise StabilityConditionError(
            f"merged-orbit system unstable: rho = {d.rho:.6g} >= 1"
        )
    b = reference_blocks(params)

    def det(z):
        m = b["up"] + b["local"] * z + b["down"] * z * z
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]

    return brentq(det, 1e-12, 1 - 1e-12, xtol=1e-14, rtol=8.9e-16)


def rate_matrix(params: SystemParams) -> np.ndarray:
    """Minimal nonnegative solution R of up + R local + R^2 down = 0."""
    b = reference_blocks(params)
    local_inv = np.linalg.inv(b["local"])
    R = np.zeros((2, 2))
    for _ in range(_R_MAXITER):
        R_next = -(b["up"] + R @ R @ b["down"]) @ local_inv
        if np.max(np.abs(R_next - R)) < _R_TOL:
            return R_next
        R = R_next
    raise RuntimeError("rate-matrix iteration did not converge")


def reference_qbd(params: SystemParams) -> ReferenceQBD:
    d = derive_rates(params)
    return ReferenceQBD(
        blocks=reference_blocks(params),
        R=rate_matrix(params),
        zeta=reference_decay_rate(params),
        rho=d.rho,
    )


def reference_stationary(params: SystemParams, n_max: int) -> np.ndarray:
    """Stationary probabilities by level and phase, shape (n_max+1, 2).

    Levels 0 and 1 are boundary-special; levels >= 2 follow the
    matrix-geometric law pi_m = pi_2 R^(m-2). Normalization uses the full
    infinite sum, so the returned window sums to slightly below one with the
    deficit bounded by the zeta^n_max tail.
    """
    if n_max < 2:
        raise ValueError("need n_max >= 2 to cover the boundary levels")
    d = derive_rates(params)
    if d.rho >= 1:
        raise StabilityConditionError(
            f"merged-orbit system unstable: rho = {d.rho:.6g} >= 1"
        )
    b = reference_blocks(params)
    R = rate_matrix(params)

    # balance equations for the three boundary unknowns pi_0, pi_1, pi_2:
    #   level-0 column pair, level-1 column pair, level-2-with-tail pair;
    # one redundant column is replaced by the normalization condition.
    M = np.zeros((6, 6))
    M[0:2, 0:2] = b["local0"]
    M[2:4, 0:2] = b["down1"]
    M[0:2, 2:4] = b["up"]
    M[2:4, 2:4] = b["local1"]
    M[4:6, 2:4] = b["down"]
    M[2:4, 4:6] = b["up"]
    M[4:6, 4:6] = b["local"] + R @ b["down"]

    tail_weight = np.linalg.solve(np.eye(2) - R, np.ones(2))  # (I-R)^-1 1
    M[0:2, 0] = 1.0
    M[2:4, 0] = 1.0
    M[4:6, 0] = tail_weight
    rhs = np.zeros(6)
    rhs[0] = 1.0

    x = np.linalg.solve(M.T, rhs)
    pi = np.zeros((n_max + 1, 2))
    pi[0], pi[1], pi[2] = x[0:2], x[2:4], x[4:6]
    for m in range(3, n_max + 1):
        pi[m] = pi[m - 1] @ R
    return pi
