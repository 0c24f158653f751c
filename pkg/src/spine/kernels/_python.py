"""Pure-NumPy reference implementations of the hot kernels.

These are the import-time fallback when the compiled extension is absent
and the ground truth the extension is tested against.  Both backends must
produce identical results: the curveball trade consumes randomness in a
fixed order (pre-drawn row picks plus one splitmix64 stream per trade) and
the tail recursion performs the same arithmetic in the same order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def poibin_tail_pairs(cell_probs, idx_i, idx_j, weights):
    """Both tail probabilities of per-pair Poisson-binomial weights.

    For each pair (idx_i[e], idx_j[e]) the null weight is a sum of
    independent Bernoulli cells with success probabilities
    ``cell_probs[i, k] * cell_probs[j, k]``.  The convolution is truncated
    at the largest observed weight, with everything above folded into an
    overflow bucket, so both tails at the observed weights stay exact.

    Returns ``(upper, lower)`` with ``upper[e] = Pr(W >= weights[e])`` and
    ``lower[e] = Pr(W <= weights[e])``, both inclusive.
    """
    probs = np.ascontiguousarray(cell_probs, dtype=np.float64)
    idx_i = np.asarray(idx_i, dtype=np.int64)
    idx_j = np.asarray(idx_j, dtype=np.int64)
    w = np.asarray(weights, dtype=np.int64)
    n_pairs = idx_i.size
    if n_pairs == 0:
        return np.zeros(0), np.zeros(0)
    n = probs.shape[1]
    support = int(w.max(initial=0)) + 1
    pmf = np.zeros((n_pairs, support))
    pmf[:, 0] = 1.0
    over = np.zeros(n_pairs)
    for k in range(n):
        q = probs[idx_i, k] * probs[idx_j, k]
        hi = min(k + 1, support - 1)
        if k >= support - 1:
            over += pmf[:, support - 1] * q
        if hi >= 1:
            qc = q[:, None]
            pmf[:, 1 : hi + 1] = pmf[:, 1 : hi + 1] * (1.0 - qc) + pmf[:, :hi] * qc
        pmf[:, 0] *= 1.0 - q
    suffix = np.cumsum(pmf[:, ::-1], axis=1)[:, ::-1]
    prefix = np.cumsum(pmf, axis=1)
    rows = np.arange(n_pairs)
    upper = over + suffix[rows, w]
    lower = prefix[rows, w]
    return upper, lower


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def curveball_trades(row_data, row_ptr, n_cols, row_lo, row_delta, seeds):
    """Apply a batch of curveball trades in place.

    ``row_data``/``row_ptr`` hold each agent's artifact indices in CSR
    layout (trades permute entries inside the two row slices, so offsets
    never change).  Trade t exchanges rows ``row_lo[t]`` and
    ``(row_lo[t] + row_delta[t]) % m``: artifacts held by both stay put,
    the union of the exclusive artifacts is reshuffled between the rows
    with a Fisher-Yates pass driven by splitmix64 seeded at ``seeds[t]``.
    Row and column sums are invariant by construction.
    """
    row_data = np.asarray(row_data, dtype=np.int64)
    row_ptr = np.asarray(row_ptr, dtype=np.int64)
    m = row_ptr.size - 1
    mark = np.zeros(int(n_cols), dtype=np.uint8)
    for t in range(len(row_lo)):
        i = int(row_lo[t])
        j = (i + int(row_delta[t])) % m
        a0, a1 = row_ptr[i], row_ptr[i + 1]
        b0, b1 = row_ptr[j], row_ptr[j + 1]
        row_i = row_data[a0:a1]
        row_j = row_data[b0:b1]
        mark[row_j] = 1
        in_j = mark[row_i] == 1
        shared_i = row_i[in_j]
        excl_i = row_i[~in_j]
        mark[row_i] += 2
        only_j = mark[row_j] == 1
        shared_j = row_j[~only_j]
        excl_j = row_j[only_j]
        mark[row_i] = 0
        mark[row_j] = 0
        if excl_i.size == 0 and excl_j.size == 0:
            continue
        pool = np.concatenate([excl_i, excl_j])
        state = int(seeds[t])
        for p in range(pool.size - 1, 0, -1):
            state, z = _splitmix64(state)
            sel = z % (p + 1)
            pool[p], pool[sel] = pool[sel], pool[p]
        ni = excl_i.size
        row_data[a0 : a0 + shared_i.size] = shared_i
        row_data[a0 + shared_i.size : a1] = pool[:ni]
        row_data[b0 : b0 + shared_j.size] = shared_j
        row_data[b0 + shared_j.size : b1] = pool[ni:]
