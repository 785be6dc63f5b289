"""Tools for a two-orbit constant-retrial queue with a smart routing stream.

A single server takes jobs from three Poisson streams.  Two streams are
dedicated, one is routed: when the routed stream finds the server busy
the job joins the shorter of two infinite orbits (ties split evenly),
and each orbit retries at a constant rate while the server is idle.

The package provides exact stability conditions, the censored
idle-server random walk, tail decay rates and constants for the
stationary distribution, closed-form approximations far from the
origin, an exactly solvable single-orbit reference system, a truncated
generator oracle, and an event-driven simulator.
"""

from .model import (
    IDLE,
    BUSY,
    REGIONS,
    DerivedRates,
    SystemParams,
    TransitionBlock,
    derive_rates,
    region_of,
    transition_blocks,
)
from .stability import (
    DriftVectors,
    StabilityReport,
    check_stability,
    drift_vectors,
)
from .censored import (
    ZONES,
    CensoredKernel,
    HalfPlaneKernel,
    censored_kernel,
    halfplane_kernel,
    kernel_to_csv,
    zone_of,
)
from .tails import (
    BalanceConditionError,
    DecayProfile,
    DiscriminantError,
    HypothesisError,
    PoolingConditionError,
    StabilityConditionError,
    decay_profile,
    f_value,
    marginal_sum,
    quadratic_roots,
    solve_f,
    tail_evaluate,
)
from .approx import (
    ApproxWarning,
    AsymmetricApprox,
    AsymmetricParamsError,
    SymmetricApprox,
    approx_asymmetric,
    approx_grid,
    approx_symmetric,
    asymmetric_coefficients,
    ratio_curve,
    symmetric_coefficients,
)
from .reference import (
    ReferenceQBD,
    rate_matrix,
    reference_blocks,
    reference_decay_rate,
    reference_qbd,
    reference_stationary,
)
from .oracle import (
    MinDiffTable,
    TruncatedSolution,
    build_generator,
    solve_stationary,
    transform_min_diff,
)
from .sim import (
    HAVE_COMPILED,
    REGIME_PRESETS,
    RegimeDemo,
    SimSummary,
    Trajectory,
    regime_demo,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "IDLE",
    "BUSY",
    "REGIONS",
    "ZONES",
    "SystemParams",
    "DerivedRates",
    "TransitionBlock",
    "derive_rates",
    "region_of",
    "transition_blocks",
    "DriftVectors",
    "StabilityReport",
    "check_stability",
    "drift_vectors",
    "CensoredKernel",
    "HalfPlaneKernel",
    "censored_kernel",
    "halfplane_kernel",
    "kernel_to_csv",
    "zone_of",
    "HypothesisError",
    "StabilityConditionError",
    "PoolingConditionError",
    "BalanceConditionError",
    "DiscriminantError",
    "DecayProfile",
    "decay_profile",
    "f_value",
    "solve_f",
    "quadratic_roots",
    "tail_evaluate",
    "marginal_sum",
    "ApproxWarning",
    "AsymmetricParamsError",
    "AsymmetricApprox",
    "SymmetricApprox",
    "asymmetric_coefficients",
    "symmetric_coefficients",
    "approx_asymmetric",
    "approx_symmetric",
    "approx_grid",
    "ratio_curve",
    "ReferenceQBD",
    "reference_blocks",
    "reference_decay_rate",
    "reference_qbd",
    "reference_stationary",
    "rate_matrix",
    "TruncatedSolution",
    "MinDiffTable",
    "build_generator",
    "solve_stationary",
    "transform_min_diff",
    "HAVE_COMPILED",
    "REGIME_PRESETS",
    "RegimeDemo",
    "SimSummary",
    "Trajectory",
    "simulate",
    "regime_demo",
    "__version__",
]
