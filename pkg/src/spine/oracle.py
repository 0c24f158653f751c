"""Exhaustive enumeration of small fixed-margin ensembles.

Ground truth for everything else: cell marginals for judging probability
estimators, exact edge-weight distributions for checking Monte-Carlo
p-values, and an independent matrix count for validating the enumeration
itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .bigraph import BipartiteGraph
from .pmf import Pmf

__all__ = [
    "EnsembleEnumeration",
    "enumerate_fdsm",
    "exact_edge_pmf",
    "gale_ryser_feasible",
    "count_fixed_margin_matrices",
]

_MAX_LEN = 6


def gale_ryser_feasible(row_sums, col_sums) -> bool:
    """Whether any binary matrix realizes the given margins."""
    r = np.asarray(row_sums, dtype=np.int64)
    c = np.asarray(col_sums, dtype=np.int64)
    if r.size == 0 or c.size == 0:
        return r.sum() == 0 and c.sum() == 0
    if np.any(r < 0) or np.any(c < 0) or np.any(r > c.size) or np.any(c > r.size):
        return False
    if r.sum() != c.sum():
        return False
    r_desc = np.sort(r)[::-1]
    for k in range(1, r_desc.size + 1):
        if r_desc[:k].sum() > np.minimum(c, k).sum():
            return False
    return True


@dataclass(frozen=True)
class EnsembleEnumeration:
    """Every binary matrix with the given margins, under the uniform measure."""

    members: tuple
    row_sums: np.ndarray
    col_sums: np.ndarray
    cell_marginals: np.ndarray

    @property
    def cardinality(self) -> int:
        return len(self.members)


def enumerate_fdsm(row_sums, col_sums) -> EnsembleEnumeration:
    """Enumerate all binary matrices with the given row and column sums.

    Rows are filled in order; each row picks its column subset
    lexicographically and the branch is pruned unless the residual margins
    stay realizable.  Sequences longer than 6 are rejected outright since
    the ensemble size explodes combinatorially.
    """
    r = np.asarray(row_sums, dtype=np.int64)
    c = np.asarray(col_sums, dtype=np.int64)
    if r.ndim != 1 or c.ndim != 1 or r.size < 1 or c.size < 1:
        raise ValueError("row and column sums must be non-empty vectors")
    if r.size > _MAX_LEN or c.size > _MAX_LEN:
        raise ValueError(f"sequences longer than {_MAX_LEN} are rejected (combinatorial blowup)")
    m, n = r.size, c.size
    members: list[np.ndarray] = []
    if gale_ryser_feasible(r, c):
        work = np.zeros((m, n), dtype=np.uint8)
        residual = c.copy()
        _fill_rows(work, r, residual, 0, members)
    counts = np.zeros((m, n), dtype=np.int64)
    for cells in members:
        counts += cells
    marginals = counts / len(members) if members else counts.astype(np.float64)
    r.flags.writeable = False
    c.flags.writeable = False
    marginals.flags.writeable = False
    return EnsembleEnumeration(
        members=tuple(BipartiteGraph(cells) for cells in members),
        row_sums=r,
        col_sums=c,
        cell_marginals=marginals,
    )


def _fill_rows(work, row_sums, residual, i, members):
    m, n = work.shape
    if i == m:
        members.append(work.copy())
        return
    need = int(row_sums[i])
    open_cols = [k for k in range(n) if residual[k] > 0]
    if need > len(open_cols):
        return
    rest_rows = row_sums[i + 1 :]
    for chosen in combinations(open_cols, need):
        residual[list(chosen)] -= 1
        if gale_ryser_feasible(rest_rows, residual):
            for k in chosen:
                work[i, k] = 1
            _fill_rows(work, row_sums, residual, i + 1, members)
            for k in chosen:
                work[i, k] = 0
        residual[list(chosen)] += 1


def exact_edge_pmf(enum: EnsembleEnumeration, i: int, j: int) -> Pmf:
    """Exact distribution of the (i, j) projection weight across the ensemble."""
    if enum.cardinality == 0:
        raise ValueError("cannot take an edge distribution over an empty enumeration")
    m = enum.row_sums.size
    n = enum.col_sums.size
    if not (0 <= i < m and 0 <= j < m):
        raise ValueError(f"agent indices ({i}, {j}) out of range for m={m}")
    if i == j:
        raise ValueError("diagonal entries are excluded from edge distributions")
    counts = np.zeros(n + 1, dtype=np.int64)
    for member in enum.members:
        w = int(np.dot(member.cells[i].astype(np.int64), member.cells[j].astype(np.int64)))
        counts[w] += 1
    return Pmf(probs=counts / enum.cardinality)


def count_fixed_margin_matrices(row_sums, col_sums) -> int:
    """Count binary matrices with the given margins, without enumerating them.

    Independent of :func:`enumerate_fdsm`: distributes each column's sum
    over the rows in turn, memoizing on the multiset of residual row
    capacities, so it extends to cardinalities far beyond what enumeration
    can list.
    """
    r = tuple(int(x) for x in np.asarray(row_sums, dtype=np.int64))
    c = tuple(sorted((int(x) for x in np.asarray(col_sums, dtype=np.int64)), reverse=True))
    if any(x < 0 for x in r) or any(x < 0 for x in c):
        return 0
    if sum(r) != sum(c):
        return 0

    @lru_cache(maxsize=None)
    def rec(residual: tuple, cols: tuple) -> int:
        if not cols:
            return 1 if all(x == 0 for x in residual) else 0
        ck, rest = cols[0], cols[1:]
        if ck > sum(1 for x in residual if x > 0):
            return 0
        total = 0
        rows_open = [idx for idx, x in enumerate(residual) if x > 0]
        for chosen in combinations(rows_open, ck):
            nxt = list(residual)
            for idx in chosen:
                nxt[idx] -= 1
            total += rec(tuple(sorted(nxt, reverse=True)), rest)
        return total

    return rec(tuple(sorted(r, reverse=True)), c)
