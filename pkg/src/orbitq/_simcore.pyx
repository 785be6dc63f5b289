# cython: language_level=3
"""Compiled event loop. Behavioral twin of ``_simloop.py`` — same RNG,
same draw order, same event ordering, same accumulation order; both call
the platform log1p, so the two backends produce identical trajectories.
Keep any edit mirrored in the pure-Python twin.
"""

from libc.math cimport log1p

import numpy as np

cdef double _INV53 = 1.1102230246251565e-16  # 2^-53


cdef inline double _next(unsigned long long *state) nogil:
    cdef unsigned long long z
    state[0] = state[0] + <unsigned long long>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <unsigned long long>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <unsigned long long>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return <double>(z >> 11) * _INV53


def run_loop(double l0, double l1, double l2, double mu, double a1, double a2,
             double horizon, unsigned long long seed, double sample_dt,
             double warmup, int n_batches):
    """See ``_simloop.run_loop`` — identical contract and return layout."""
    cdef double lam = l0 + l1 + l2
    cdef double c1 = l1
    cdef double c2 = l1 + l2
    cdef double c3 = l1 + l2 + l0

    cdef Py_ssize_t ns = <Py_ssize_t>(horizon / sample_dt) + 1
    times_arr = np.arange(ns) * sample_dt
    sn1_arr = np.zeros(ns, dtype=np.int64)
    sn2_arr = np.zeros(ns, dtype=np.int64)
    sbusy_arr = np.zeros(ns, dtype=np.uint8)
    cdef long long[::1] sn1 = sn1_arr
    cdef long long[::1] sn2 = sn2_arr
    cdef unsigned char[::1] sbusy = sbusy_arr

    cdef double bl = (horizon - warmup) / n_batches
    batch_min_arr = np.zeros(n_batches)
    batch_busy_arr = np.zeros(n_batches)
    cdef double[::1] batch_min = batch_min_arr
    cdef double[::1] batch_busy = batch_busy_arr

    cdef unsigned long long state = seed
    cdef double t = 0.0
    cdef long long n1 = 0
    cdef long long n2 = 0
    cdef int busy = 0
    cdef Py_ssize_t s = 0
    cdef long long n_events = 0
    cdef double int_n1 = 0.0
    cdef double int_n2 = 0.0
    cdef double int_busy = 0.0
    cdef double int_min = 0.0

    cdef double rate, u, t_new, v, acc, lo, hi, w, seg
    cdef double mn
    cdef Py_ssize_t b
    cdef int stopping

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
            stopping = 1
            hi = horizon
        else:
            u = _next(&state)
            t_new = t + (-log1p(-u) / rate)
            while s < ns and s * sample_dt < t_new:
                sn1[s] = n1
                sn2[s] = n2
                sbusy[s] = busy
                s += 1
            if t_new >= horizon:
                stopping = 1
                hi = horizon
            else:
                stopping = 0
                hi = t_new

        # integrate the constant-state interval [t, hi) over [warmup, horizon)
        lo = t
        if hi > warmup:
            if lo < warmup:
                lo = warmup
            if hi > lo:
                w = hi - lo
                mn = <double>(n1 if n1 < n2 else n2)
                int_n1 += w * n1
                int_n2 += w * n2
                int_busy += w * busy
                int_min += w * mn
                while lo < hi:
                    b = <Py_ssize_t>((lo - warmup) / bl)
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

        v = _next(&state) * rate
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
            elif _next(&state) < 0.5:
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

    return (times_arr, sn1_arr, sn2_arr, sbusy_arr, int(n_events), int_n1,
            int_n2, int_busy, int_min, batch_min_arr, batch_busy_arr, t)
