"""In-place numba kernels for the hot loops (forward chain, coupled pairs, CFTP).

Heights live in an int64 array h[0..n-1] (h[p] = S_{p+1}, S_0 = 0 implicit).
A family is passed as (lower, exc, culm, k): per-position lower bounds, the
excursion end constraint, the culminating flag and the culminating suffix length.
"""

import numpy as np
from numba import njit

from .rng import raw_draw, unpack

F_FINAL, F_MAX, F_AREA, F_PEAKS = 0, 1, 2, 3


@njit(cache=True, inline="always")
def pick_site(cdf, guide, u):
    """Smallest 1-based i with cdf[i-1] > u, scanning up from the guide bucket."""
    n = cdf.shape[0]
    j = guide[min(np.int64(u * n), n - 1)]
    while cdf[j] <= u:
        j += 1
    return j + 1


@njit(cache=True, nogil=True)
def step(h, i, up, plus, a, b, lower, exc, culm, k):
    """Apply the constrained flip (i, up, plus) in place; return True if h changed."""
    n = h.shape[0]
    p = i - 1
    prev = h[p - 1] if p > 0 else 0
    cur = h[p]
    if i < n:
        nxt = h[p + 1]
        if up:
            if cur != prev - b or nxt != cur + a:
                return False
            new = cur + a + b
        else:
            if cur != prev + a or nxt != cur - b:
                return False
            new = cur - a - b
        if new < lower[p]:
            return False
        if culm and new > h[n - 1]:
            return False
        h[p] = new
        return True
    if culm:
        base = h[n - k - 1] if n - k - 1 >= 0 else 0
        if up:
            first = base + a
        else:
            first = base - b
        final = first + (k - 1) * a
        if h[n - k] == first and h[n - 1] == final:
            return False
        if first < 0:
            return False
        m = 0
        for q in range(n - k):
            if h[q] > m:
                m = h[q]
        if final < m:
            return False
        x = first
        for q in range(n - k, n):
            h[q] = x
            x += a
        return True
    if up and plus and cur == prev - b:
        new = prev + a
    elif (not up) and (not plus) and cur == prev + a:
        new = prev - b
    else:
        return False
    if exc or new < lower[p]:
        return False
    h[p] = new
    return True


@njit(cache=True, nogil=True)
def touched_range(i, n, culm, k):
    """0-based [start, stop) of positions that the tuple at site i may change."""
    if i < n:
        return i - 1, i
    if culm:
        return n - k, n
    return n - 1, n


@njit(cache=True, nogil=True)
def run_forward(h, key, t_first, T, cdf, guide, a, b, lower, exc, culm, k):
    """Apply tuples t_first, ..., t_first + T - 1 to h; return number of accepted moves."""
    moved = 0
    for t in range(t_first, t_first + T):
        u, up, plus = unpack(raw_draw(key, t))
        i = pick_site(cdf, guide, u)
        if step(h, i, up, plus, a, b, lower, exc, culm, k):
            moved += 1
    return moved


@njit(cache=True, nogil=True)
def run_forward_many(init, keys, T, cdf, guide, a, b, lower, exc, culm, k):
    """Independent replicas from a common start; row r uses keys[r], times 1..T."""
    out = np.empty((keys.shape[0], init.shape[0]), dtype=np.int64)
    h = np.empty_like(init)
    for r in range(keys.shape[0]):
        h[:] = init
        run_forward(h, keys[r], 1, T, cdf, guide, a, b, lower, exc, culm, k)
        out[r] = h
    return out


@njit(cache=True, nogil=True)
def run_pair(h0, h1, key, t_first, T, cdf, guide, a, b, lower, exc, culm, k, check):
    """Drive two paths with the same tuples. With ``check`` set, verify h0 <= h1
    after every step and return the first offending time (else returns t_first - 1)."""
    n = h0.shape[0]
    for t in range(t_first, t_first + T):
        u, up, plus = unpack(raw_draw(key, t))
        i = pick_site(cdf, guide, u)
        step(h0, i, up, plus, a, b, lower, exc, culm, k)
        step(h1, i, up, plus, a, b, lower, exc, culm, k)
        if check:
            s, e = touched_range(i, n, culm, k)
            for q in range(s, e):
                if h0[q] > h1[q]:
                    return t
    return t_first - 1


@njit(cache=True, nogil=True)
def coupling_time(h0, h1, key, cap, cdf, guide, a, b, lower, exc, culm, k):
    """First t >= 0 at which the coupled paths agree, or -1 if not within cap steps."""
    n = h0.shape[0]
    diff = 0
    for q in range(n):
        if h0[q] != h1[q]:
            diff += 1
    if diff == 0:
        return 0
    for t in range(1, cap + 1):
        u, up, plus = unpack(raw_draw(key, t))
        i = pick_site(cdf, guide, u)
        s, e = touched_range(i, n, culm, k)
        for q in range(s, e):
            if h0[q] != h1[q]:
                diff -= 1
        step(h0, i, up, plus, a, b, lower, exc, culm, k)
        step(h1, i, up, plus, a, b, lower, exc, culm, k)
        for q in range(s, e):
            if h0[q] != h1[q]:
                diff += 1
        if diff == 0:
            return t
    return -1


@njit(cache=True, nogil=True)
def coupling_times_many(h0, h1, keys, cap, cdf, guide, a, b, lower, exc, culm, k):
    out = np.empty(keys.shape[0], dtype=np.int64)
    x = np.empty_like(h0)
    y = np.empty_like(h1)
    for r in range(keys.shape[0]):
        x[:] = h0
        y[:] = h1
        out[r] = coupling_time(x, y, keys[r], cap, cdf, guide, a, b, lower, exc, culm, k)
    return out


@njit(cache=True, nogil=True)
def functional_value(h, code, a, b):
    n = h.shape[0]
    if code == F_FINAL:
        return np.float64(h[n - 1])
    if code == F_MAX:
        m = h[0]
        for q in range(1, n):
            if h[q] > m:
                m = h[q]
        return np.float64(m)
    if code == F_AREA:
        s = 0
        for q in range(n):
            s += h[q]
        return np.float64(s)
    c = 0
    prev = 0
    for q in range(n - 1):
        if h[q] == prev + a and h[q + 1] == h[q] - b:
            c += 1
        prev = h[q]
    return np.float64(c)


@njit(cache=True, nogil=True)
def run_estimate(h, key, T, code, cdf, guide, a, b, lower, exc, culm, k):
    """Sum of the functional over S(1), ..., S(T); recomputed only after accepted moves."""
    total = 0.0
    value = functional_value(h, code, a, b)
    for t in range(1, T + 1):
        u, up, plus = unpack(raw_draw(key, t))
        i = pick_site(cdf, guide, u)
        if step(h, i, up, plus, a, b, lower, exc, culm, k):
            value = functional_value(h, code, a, b)
        total += value
    return total
