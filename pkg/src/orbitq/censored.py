"""One-step kernels of the busy-period walk, in two coordinate systems.

Censoring the uniformized chain on busy states has a closed form here:
an idle excursion can only sit still (probability mu/theta per uniformized
step) before an arrival or retrial ends it, so the excursion matrix is
diagonal and the censored jump probabilities come out as explicit rational
expressions in the rates. ``censored_kernel`` returns those expressions per
lattice region; ``halfplane_kernel`` re-expresses them in the coordinates
(l, m) = (n2 - n1, min(n1, n2)), the difference/minimum frame used by the
tail analysis. Both are exact, not truncations.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

from .model import REGIONS, SystemParams, region_of

__all__ = [
    "CensoredKernel",
    "HalfPlaneKernel",
    "ZONES",
    "censored_kernel",
    "halfplane_kernel",
    "zone_of",
    "kernel_to_csv",
]

#: Zone tags for the half-plane walk in (l, m) = (n2 - n1, min(n1, n2)):
#:   "-"  : l <= -1, m >= 1   (first orbit longer, interior)
#:   "+"  : l >= +1, m >= 1   (second orbit longer, interior)
#:   "2"  : l == 0,  m >= 1   (equal orbits, interior)
#:   "1-" : l <= -1, m == 0   (first orbit longer, second empty)
#:   "1+" : l >= +1, m == 0   (second orbit longer, first empty)
#:   "0"  : l == 0,  m == 0   (both empty)
ZONES = ("-", "+", "2", "1-", "1+", "0")


@dataclass(frozen=True)
class CensoredKernel:
    """Censored jump probabilities per region: {region: {(di, dj): p}}."""

    regions: dict

    def row(self, region):
        return self.regions[region]

    def at(self, i, j):
        """Kernel row applying at lattice point (i, j)."""
        return self.regions[region_of(i, j)]


@dataclass(frozen=True)
class HalfPlaneKernel:
    """Censored jump probabilities per zone: {zone: {(dm, dl): p}}.

    Directions are (dm, dl): change of the minimum, change of the difference.
    """

    zones: dict

    def row(self, zone):
        return self.zones[zone]

    def at(self, m, l):
        return self.zones[zone_of(m, l)]


def zone_of(m: int, l: int) -> str:
    """Zone tag of the half-plane point (m, l), m >= 0."""
    if m < 0:
        raise ValueError(f"minimum coordinate must be nonnegative, got {m}")
    if m == 0:
        return "0" if l == 0 else ("1-" if l < 0 else "1+")
    return "2" if l == 0 else ("-" if l < 0 else "+")


def censored_kernel(params: SystemParams) -> CensoredKernel:
    """Exact one-step kernel of the chain censored on busy states.

    Probabilities are expressed in the uniformized scale (divide by theta).
    Each region row sums to 1. The (0, 0) entries bundle the failed-retrial
    mass with the censored idle excursions (service completion followed by
    the excursion-ending arrival), hence the lambda*mu terms.
    """
    l0, l1, l2 = params.lambda0, params.lambda1, params.lambda2
    mu, a1, a2 = params.mu, params.alpha1, params.alpha2
    lam = params.total_arrival_rate
    t = lam + a1 + a2
    th = params.uniformization_rate
    mh1, mh2 = mu * a1, mu * a2

    interior_self = a1 + a2 + lam * mu / t

    regions = {
        "r1": {
            (1, 0): l1 / th,
            (0, 1): (l0 + l2) / th,
            (-1, 0): mh1 / (t * th),
            (0, -1): mh2 / (t * th),
            (0, 0): interior_self / th,
        },
        "r2": {
            (1, 0): (l0 + l1) / th,
            (0, 1): l2 / th,
            (-1, 0): mh1 / (t * th),
            (0, -1): mh2 / (t * th),
            (0, 0): interior_self / th,
        },
        "d": {
            (1, 0): (l1 + l0 / 2) / th,
            (0, 1): (l2 + l0 / 2) / th,
            (-1, 0): mh1 / (t * th),
            (0, -1): mh2 / (t * th),
            (0, 0): interior_self / th,
        },
        "h": {
            (1, 0): l1 / th,
            (0, 1): (l0 + l2) / th,
            (-1, 0): mh1 / ((lam + a1) * th),
            (0, 0): (a1 + a2 + lam * mu / (lam + a1)) / th,
        },
        "v": {
            (1, 0): (l0 + l1) / th,
            (0, 1): l2 / th,
            (0, -1): mh2 / ((lam + a2) * th),
            (0, 0): (a1 + a2 + lam * mu / (lam + a2)) / th,
        },
        "O": {
            (1, 0): (l1 + l0 / 2) / th,
            (0, 1): (l2 + l0 / 2) / th,
            (0, 0): (a1 + a2 + mu) / th,
        },
    }
    return CensoredKernel(regions=regions)


def halfplane_kernel(params: SystemParams) -> HalfPlaneKernel:
    """The censored kernel in difference/minimum coordinates.

    This is the pointwise image of :func:`censored_kernel` under
    (i, j) -> (l, m) = (j - i, min(i, j)); e.g. in zone "-" (i > j >= 1) an
    arrival to the shorter orbit 2 raises both the minimum and the
    difference, giving direction (dm, dl) = (1, 1).
    """
    ck = censored_kernel(params).regions

    def remap(region, mapping):
        return {new: ck[region][old] for old, new in mapping.items()}

    zones = {
        # interior, first orbit longer (region r1): minimum is j
        "-": remap("r1", {
            (1, 0): (0, -1),   # i up: difference falls, min (j) unchanged
            (0, 1): (1, 1),    # j up: both min and difference rise
            (-1, 0): (0, 1),
            (0, -1): (-1, -1),
            (0, 0): (0, 0),
        }),
        # interior, second orbit longer (region r2): minimum is i
        "+": remap("r2", {
            (1, 0): (1, -1),
            (0, 1): (0, 1),
            (-1, 0): (-1, 1),
            (0, -1): (0, -1),
            (0, 0): (0, 0),
        }),
        # interior diagonal: either step leaves the minimum in place
        "2": remap("d", {
            (1, 0): (0, -1),
            (0, 1): (0, 1),
            (-1, 0): (-1, 1),
            (0, -1): (-1, -1),
            (0, 0): (0, 0),
        }),
        "1-": remap("h", {
            (1, 0): (0, -1),
            (0, 1): (1, 1),
            (-1, 0): (0, 1),
            (0, 0): (0, 0),
        }),
        "1+": remap("v", {
            (1, 0): (1, -1),
            (0, 1): (0, 1),
            (0, -1): (0, -1),
            (0, 0): (0, 0),
        }),
        "0": remap("O", {
            (1, 0): (0, -1),
            (0, 1): (0, 1),
            (0, 0): (0, 0),
        }),
    }
    return HalfPlaneKernel(zones=zones)


def kernel_to_csv(kernel) -> str:
    """Dump a kernel as CSV text for inspection.

    Columns are ``region,di,dj,probability`` for a :class:`CensoredKernel`
    and ``zone,dm,dl,probability`` for a :class:`HalfPlaneKernel`.
    """
    buf = io.StringIO()
    if isinstance(kernel, CensoredKernel):
        buf.write("region,di,dj,probability\n")
        rows, order = kernel.regions, REGIONS
    elif isinstance(kernel, HalfPlaneKernel):
        buf.write("zone,dm,dl,probability\n")
        rows, order = kernel.zones, ZONES
    else:
        raise TypeError(f"expected a kernel object, got {type(kernel).__name__}")
    for tag in order:
        for (da, db), p in sorted(rows[tag].items()):
            buf.write(f"{tag},{da},{db},{p!r}\n")
    return buf.getvalue()
