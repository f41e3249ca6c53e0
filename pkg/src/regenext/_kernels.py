"""Jitted inner loops for bulk cycle sampling and trajectory order statistics.

Every kernel takes a ``numpy.random.Generator`` and consumes uniforms in
exactly the same order and via exactly the same inverse-CDF formulas as the
scalar ``cycle_steps`` iterators in :mod:`regenext.models`, so the two routes
reproduce identical cycles from identical streams.  Sentinels are plain -inf
here; the tagged NEG_INF object exists only at the :class:`CycleRecord`
boundary.

Batch kernels return 0 on success and 1 if a cycle ran past the step cap.
"""

import numpy as np
from numba import njit


@njit(inline="always")
def _push(top, q, v):
    # insert v into the descending top-q buffer (no-op if too small)
    if v > top[q - 1]:
        i = q - 1
        while i > 0 and top[i - 1] < v:
            top[i] = top[i - 1]
            i -= 1
        top[i] = v


# ---------------------------------------------------------------------------
# Geometric jump
# ---------------------------------------------------------------------------

@njit(cache=True)
def geo_cycle_batch(p, size, r, cap, lengths, maxima, rng):
    lg = np.log1p(-p)
    for c in range(size):
        u = 1.0 - rng.random()
        k = int(np.log(u) / lg)
        if k + 1 > cap:
            return 1
        lengths[c] = k + 1
        for j in range(r):
            # cycle values are k, k-1, ..., 1, 0: the (j+1)-th max is k-j
            maxima[c, j] = k - j if j <= k else -np.inf
    return 0


@njit(cache=True)
def geo_path_topq(p, n, q, top, rng):
    lg = np.log1p(-p)
    s = 0
    for _ in range(n):
        if s == 0:
            u = 1.0 - rng.random()
            s = int(np.log(u) / lg)
        else:
            s -= 1
        _push(top, q, float(s))


# ---------------------------------------------------------------------------
# Reflected simple random walk
# ---------------------------------------------------------------------------

@njit(cache=True)
def rw_cycle_batch(p, size, r, cap, lengths, maxima, rng):
    for c in range(size):
        for j in range(r):
            maxima[c, j] = -np.inf
        _push(maxima[c], r, 0.0)
        s = 0
        length = 1
        while True:
            if rng.random() < p:
                s += 1
            else:
                s -= 1
            if s <= 0:
                break
            length += 1
            if length > cap:
                return 1
            _push(maxima[c], r, float(s))
        lengths[c] = length
    return 0


@njit(cache=True)
def rw_path_topq(p, n, q, top, rng):
    s = 0
    for _ in range(n):
        if rng.random() < p:
            s += 1
        elif s > 0:
            s -= 1
        _push(top, q, float(s))


@njit(cache=True)
def rw_exceedance_counts(p, x0, size, counts, rng):
    """Exceedance counts of threshold x0 over cycles conditioned to exceed it.

    The walk first passes above x0 exactly at x0 + 1, so the conditional
    post-passage trajectory is an unconditioned walk started there; count its
    visits to states > x0 before it returns to 0.  ``counts[i-1]`` accumulates
    cycles with exactly i exceedances; the last bin is an overflow bucket.
    """
    nbins = counts.shape[0]
    for _ in range(size):
        s = x0 + 1
        cnt = 1
        while True:
            if rng.random() < p:
                s += 1
            else:
                s -= 1
            if s <= 0:
                break
            if s > x0:
                cnt += 1
        idx = cnt - 1 if cnt <= nbins else nbins - 1
        counts[idx] += 1


# ---------------------------------------------------------------------------
# Lindley process (kind 0: constant step, kind 1: shifted Pareto step)
# ---------------------------------------------------------------------------

@njit(inline="always")
def _lindley_step(kind, alpha, scale, shift, constv, rng):
    if kind == 0:
        return constv
    u = 1.0 - rng.random()
    return scale * u ** (-1.0 / alpha) + shift


@njit(cache=True)
def lindley_cycle_batch(kind, alpha, scale, shift, constv, size, r, cap,
                        lengths, maxima, rng):
    for c in range(size):
        for j in range(r):
            maxima[c, j] = -np.inf
        _push(maxima[c], r, 0.0)
        s = 0.0
        length = 1
        while True:
            z = _lindley_step(kind, alpha, scale, shift, constv, rng)
            s = max(s + z, 0.0)
            if s == 0.0:
                break
            length += 1
            if length > cap:
                return 1
            _push(maxima[c], r, s)
        lengths[c] = length
    return 0


@njit(cache=True)
def lindley_path_topq(kind, alpha, scale, shift, constv, n, q, top, rng):
    s = 0.0
    for _ in range(n):
        z = _lindley_step(kind, alpha, scale, shift, constv, rng)
        s = max(s + z, 0.0)
        _push(top, q, s)


# ---------------------------------------------------------------------------
# Prescribed cluster sizes
# ---------------------------------------------------------------------------

@njit(inline="always")
def _pb_jump(vf, alpha, rng):
    # ladder index of the entry state: largest idx with v[idx] <= X, X ~ F
    u = 1.0 - rng.random()
    x = u ** (-1.0 / alpha)
    if x < vf[0]:
        return -1
    idx = np.searchsorted(vf, x, side="right") - 1
    if idx > len(vf) - 1:
        idx = len(vf) - 1
    return idx


@njit(inline="always")
def _pb_cluster(bcum, m_here, rng):
    lim = min(m_here, len(bcum))
    target = rng.random() * bcum[lim - 1]
    for i in range(lim):
        if target < bcum[i]:
            return i + 1
    return lim


@njit(cache=True)
def pb_cycle_batch(vf, mv, bcum, alpha, size, r, lengths, maxima, rng):
    for c in range(size):
        idx = _pb_jump(vf, alpha, rng)
        if idx < 0:
            lengths[c] = 1
            maxima[c, 0] = 0.0
            for j in range(1, r):
                maxima[c, j] = -np.inf
            continue
        peak = vf[idx]
        cs = _pb_cluster(bcum, mv[idx], rng)
        # cycle values: 0, peak, peak+cs-1, ..., peak+1
        lengths[c] = cs + 1
        for j in range(r):
            if j < cs:
                maxima[c, j] = peak + cs - 1 - j
            elif j == cs:
                maxima[c, j] = 0.0
            else:
                maxima[c, j] = -np.inf
    return 0


@njit(cache=True)
def pb_path_topq(vf, mv, bcum, alpha, n, q, top, rng):
    step = 0
    while step < n:
        idx = _pb_jump(vf, alpha, rng)
        if idx < 0:
            _push(top, q, 0.0)
            step += 1
            continue
        peak = vf[idx]
        _push(top, q, peak)
        step += 1
        if step >= n:
            break
        cs = _pb_cluster(bcum, mv[idx], rng)
        sv = peak + cs - 1.0
        while sv > peak and step < n:
            _push(top, q, sv)
            step += 1
            sv -= 1.0
        if step < n:
            _push(top, q, 0.0)
            step += 1


# ---------------------------------------------------------------------------
# I.i.d. blocks
# ---------------------------------------------------------------------------

@njit(inline="always")
def _iid_block(row_cum, rng):
    u = 1.0 - rng.random()
    m = int(np.floor(-np.log2(u))) + 1
    M, L = row_cum.shape
    row = row_cum[min(m, M) - 1]
    u2 = rng.random()
    y = L
    for i in range(L):
        if u2 < row[i]:
            y = i + 1
            break
    return m, y


@njit(cache=True)
def iid_cycle_batch(row_cum, size, r, lengths, maxima, rng):
    for c in range(size):
        m, y = _iid_block(row_cum, rng)
        lengths[c] = y
        val = float(m)
        for j in range(r):
            maxima[c, j] = val if j < y else -np.inf
    return 0


@njit(cache=True)
def iid_path_topq(row_cum, n, q, top, rng):
    step = 0
    while step < n:
        m, y = _iid_block(row_cum, rng)
        val = float(m)
        for _ in range(y):
            _push(top, q, val)
            step += 1
            if step >= n:
                break
