# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels.

Mirrors :mod:`spine.kernels._python` operation for operation: the curveball
trade consumes the same pre-drawn row picks and per-trade splitmix64 seeds,
and the truncated Poisson-binomial recursion applies the same update order,
so both backends agree (bit-for-bit for the integer curveball state).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline unsigned long long _splitmix64(unsigned long long *state) nogil:
    cdef unsigned long long z
    state[0] = state[0] + <unsigned long long>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <unsigned long long>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <unsigned long long>0x94D049BB133111EB
    return z ^ (z >> 31)


def poibin_tail_pairs(cell_probs, idx_i, idx_j, weights):
    """Both tail probabilities of per-pair Poisson-binomial weights."""
    cdef const double[:, ::1] probs = np.ascontiguousarray(cell_probs, dtype=np.float64)
    cdef const long long[::1] ii = np.ascontiguousarray(idx_i, dtype=np.int64)
    cdef const long long[::1] jj = np.ascontiguousarray(idx_j, dtype=np.int64)
    cdef const long long[::1] ww = np.ascontiguousarray(weights, dtype=np.int64)
    cdef Py_ssize_t n_pairs = ii.shape[0]
    upper_arr = np.zeros(n_pairs, dtype=np.float64)
    lower_arr = np.zeros(n_pairs, dtype=np.float64)
    if n_pairs == 0:
        return upper_arr, lower_arr
    cdef double[::1] upper = upper_arr
    cdef double[::1] lower = lower_arr
    cdef Py_ssize_t n = probs.shape[1]
    cdef long long support = 1
    cdef Py_ssize_t e, k, t, hi, w
    for e in range(n_pairs):
        if ww[e] + 1 > support:
            support = ww[e] + 1
    pmf_arr = np.zeros(support, dtype=np.float64)
    cdef double[::1] pmf = pmf_arr
    cdef double q, over, acc
    cdef Py_ssize_t i_row, j_row
    with nogil:
        for e in range(n_pairs):
            i_row = ii[e]
            j_row = jj[e]
            for t in range(support):
                pmf[t] = 0.0
            pmf[0] = 1.0
            over = 0.0
            for k in range(n):
                q = probs[i_row, k] * probs[j_row, k]
                if q == 0.0:
                    continue
                hi = k + 1
                if hi > support - 1:
                    hi = support - 1
                if k >= support - 1:
                    over += pmf[support - 1] * q
                for t in range(hi, 0, -1):
                    pmf[t] = pmf[t] * (1.0 - q) + pmf[t - 1] * q
                pmf[0] *= 1.0 - q
            w = ww[e]
            acc = 0.0
            for t in range(support - 1, w - 1, -1):
                acc += pmf[t]
            upper[e] = over + acc
            acc = 0.0
            for t in range(w + 1):
                acc += pmf[t]
            lower[e] = acc
    return upper_arr, lower_arr


def curveball_trades(row_data, row_ptr, n_cols, row_lo, row_delta, seeds):
    """Apply a batch of curveball trades in place (CSR row layout)."""
    cdef long long[::1] data = row_data
    cdef const long long[::1] ptr = np.ascontiguousarray(row_ptr, dtype=np.int64)
    cdef const long long[::1] lo = np.ascontiguousarray(row_lo, dtype=np.int64)
    cdef const long long[::1] delta = np.ascontiguousarray(row_delta, dtype=np.int64)
    cdef const unsigned long long[::1] sd = np.ascontiguousarray(seeds, dtype=np.uint64)
    cdef Py_ssize_t m = ptr.shape[0] - 1
    cdef Py_ssize_t n_trades = lo.shape[0]

    cdef long long max_row = 0
    cdef Py_ssize_t r
    for r in range(m):
        if ptr[r + 1] - ptr[r] > max_row:
            max_row = ptr[r + 1] - ptr[r]

    mark_arr = np.zeros(int(n_cols), dtype=np.uint8)
    shared_i_arr = np.empty(max_row, dtype=np.int64)
    shared_j_arr = np.empty(max_row, dtype=np.int64)
    pool_arr = np.empty(2 * max_row, dtype=np.int64)
    cdef unsigned char[::1] mark = mark_arr
    cdef long long[::1] shared_i = shared_i_arr
    cdef long long[::1] shared_j = shared_j_arr
    cdef long long[::1] pool = pool_arr

    cdef Py_ssize_t t, i, j, a0, a1, b0, b1, k
    cdef Py_ssize_t n_shared_i, n_shared_j, n_excl_i, n_pool, p, sel
    cdef long long col, tmp
    cdef unsigned long long state

    with nogil:
        for t in range(n_trades):
            i = lo[t]
            j = (lo[t] + delta[t]) % m
            a0 = ptr[i]
            a1 = ptr[i + 1]
            b0 = ptr[j]
            b1 = ptr[j + 1]
            for k in range(b0, b1):
                mark[data[k]] = 1
            # split row i into shared (also in j) and exclusive entries
            n_shared_i = 0
            n_excl_i = 0
            for k in range(a0, a1):
                col = data[k]
                if mark[col] == 1:
                    shared_i[n_shared_i] = col
                    n_shared_i += 1
                    mark[col] = 3
                else:
                    pool[n_excl_i] = col
                    n_excl_i += 1
                    mark[col] = 2
            # row j entries still marked 1 are exclusive to j
            n_shared_j = 0
            n_pool = n_excl_i
            for k in range(b0, b1):
                col = data[k]
                if mark[col] == 1:
                    pool[n_pool] = col
                    n_pool += 1
                else:
                    shared_j[n_shared_j] = col
                    n_shared_j += 1
            for k in range(a0, a1):
                mark[data[k]] = 0
            for k in range(b0, b1):
                mark[data[k]] = 0
            if n_pool == 0:
                continue
            # Fisher-Yates with the trade's own splitmix64 stream
            state = sd[t]
            for p in range(n_pool - 1, 0, -1):
                sel = <Py_ssize_t>(_splitmix64(&state) % (<unsigned long long>(p + 1)))
                tmp = pool[p]
                pool[p] = pool[sel]
                pool[sel] = tmp
            for k in range(n_shared_i):
                data[a0 + k] = shared_i[k]
            for k in range(n_excl_i):
                data[a0 + n_shared_i + k] = pool[k]
            for k in range(n_shared_j):
                data[b0 + k] = shared_j[k]
            for k in range(n_pool - n_excl_i):
                data[b0 + n_shared_j + k] = pool[n_excl_i + k]
