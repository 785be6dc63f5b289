"""Pure-Python event loop, used when the compiled extension is unavailable.

Behavioral twin of ``_simcore.pyx`` — same RNG (splitmix64), same draw
order, same event ordering, same accumulation order; both call the
platform log1p, so the two backends produce identical trajectories.
Keep any edit mirrored in the Cython twin.
"""

from math import log1p

import numpy as np

_MASK = (1 << 64) - 1
_INV53 = 1.1102230246251565e-16  # 2^-53


def run_loop(l0, l1, l2, mu, a1, a2, horizon, seed, sample_dt, warmup,
             n_batches):
    """Run the continuous-time event loop and return raw statistics.

    Returns a 12-tuple: sample times, orbit-1 snapshots, orbit-2
    snapshots, server snapshots, event count, time integrals of orbit 1,
    orbit 2, the busy indicator and the shorter orbit over
    ``[warmup, horizon)``, per-batch integrals of the shorter orbit and
    the busy indicator, and the final clock value.
    """
    lam = l0 + l1 + l2
    c1 = l1
    c2 = l1 + l2
    c3 = l1 + l2 + l0

    ns = int(horizon / sample_dt) + 1
    times = np.arange(ns) * sample_dt
    sn1 = np.zeros(ns, dtype=np.int64)
    sn2 = np.zeros(ns, dtype=np.int64)
    sbusy = np.zeros(ns, dtype=np.uint8)

    bl = (horizon - warmup) / n_batches
    batch_min = np.zeros(n_batches)
    batch_busy = np.zeros(n_batches)

    state = seed & _MASK

    def nxt():
        nonlocal state
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        z = z ^ (z >> 31)
        return (z >> 11) * _INV53

    t = 0.0
    n1 = 0
    n2 = 0
    busy = 0
    s = 0
    n_events = 0
    int_n1 = 0.0
    int_n2 = 0.0
    int_busy = 0.0
    int_min = 0.0

    while True:
        if busy:
            rate = lam + mu
        else:
            rate = lam
            if n1 > 0:
                rate += a1
            if n2 > 0:
                rate += a2

        if rate == 0.0:
            stopping = True
            hi = horizon
        else:
            u = nxt()
            t_new = t + (-log1p(-u) / rate)
            while s < ns and s * sample_dt < t_new:
                sn1[s] = n1
                sn2[s] = n2
                sbusy[s] = busy
                s += 1
            if t_new >= horizon:
                stopping = True
                hi = horizon
            else:
                stopping = False
                hi = t_new

        # integrate the constant-state interval [t, hi) over [warmup, horizon)
        lo = t
        if hi > warmup:
            if lo < warmup:
                lo = warmup
            if hi > lo:
                w = hi - lo
                mn = float(n1 if n1 < n2 else n2)
                int_n1 += w * n1
                int_n2 += w * n2
                int_busy += w * busy
                int_min += w * mn
                while lo < hi:
                    b = int((lo - warmup) / bl)
                    if b >= n_batches:
                        b = n_batches - 1
                    seg = warmup + (b + 1) * bl
                    if seg > hi:
                        seg = hi
                    if seg <= lo:
                        break
                    batch_min[b] += (seg - lo) * mn
                    batch_busy[b] += (seg - lo) * busy
                    lo = seg

        if stopping:
            t = horizon
            break
        t = t_new
        n_events += 1

        v = nxt() * rate
        if v < c1:
            if busy:
                n1 += 1
            else:
                busy = 1
        elif v < c2:
            if busy:
                n2 += 1
            else:
                busy = 1
        elif v < c3:
            if not busy:
                busy = 1
            elif n1 < n2:
                n1 += 1
            elif n2 < n1:
                n2 += 1
            elif nxt() < 0.5:
                n1 += 1
            else:
                n2 += 1
        elif busy:
            busy = 0
        else:
            acc = c3
            if n1 > 0:
                acc += a1
                if v < acc:
                    n1 -= 1
                    busy = 1
                else:
                    n2 -= 1
                    busy = 1
            else:
                n2 -= 1
                busy = 1

    while s < ns:
        sn1[s] = n1
        sn2[s] = n2
        sbusy[s] = busy
        s += 1

    return (times, sn1, sn2, sbusy, n_events, int_n1, int_n2, int_busy,
            int_min, batch_min, batch_busy, t)
