"""Core representations: bipartite incidence, co-occurrence projection, backbone.

All three types are immutable after construction (arrays are marked
read-only), so they can be shared across parallel workers without copies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError

__all__ = ["BipartiteGraph", "Projection", "Backbone", "project", "density", "jaccard"]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class BipartiteGraph:
    """Binary agent-by-artifact incidence matrix with cached margins.

    ``cells[i, k]`` is 1 when agent ``i`` is incident to artifact ``k``.
    Row sums are the agent degrees, column sums the artifact degrees, and
    ``fill`` their common total.
    """

    cells: np.ndarray
    row_sums: np.ndarray = field(init=False, repr=False, compare=False)
    col_sums: np.ndarray = field(init=False, repr=False, compare=False)
    fill: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cells = np.asarray(self.cells)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise ValueError(f"incidence must be a non-empty 2-D matrix, got shape {cells.shape}")
        as_u8 = cells.astype(np.uint8, copy=True)
        if not np.array_equal(as_u8, cells) or as_u8.max(initial=0) > 1:
            raise ValueError("incidence cells must all be 0 or 1")
        object.__setattr__(self, "cells", _frozen(as_u8))
        object.__setattr__(self, "row_sums", _frozen(self.cells.sum(axis=1, dtype=np.int64)))
        object.__setattr__(self, "col_sums", _frozen(self.cells.sum(axis=0, dtype=np.int64)))
        object.__setattr__(self, "fill", int(self.row_sums.sum()))

    @property
    def m(self) -> int:
        """Number of agents (rows)."""
        return self.cells.shape[0]

    @property
    def n(self) -> int:
        """Number of artifacts (columns)."""
        return self.cells.shape[1]

    def __eq__(self, other) -> bool:
        return isinstance(other, BipartiteGraph) and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.cells.shape, self.cells.tobytes()))

    def transpose(self) -> "BipartiteGraph":
        """Swap the agent and artifact roles."""
        return BipartiteGraph(self.cells.T)


@dataclass(frozen=True)
class Projection:
    """Symmetric co-occurrence counts between agents.

    ``weights[i, j]`` counts artifacts shared by agents ``i`` and ``j``;
    the matrix diagonal equals the agent degrees and is kept out of all
    significance tests.
    """

    weights: np.ndarray
    diagonal: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.int64)
        d = np.asarray(self.diagonal, dtype=np.int64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("projection weights must be square")
        if d.shape != (w.shape[0],):
            raise DimensionMismatchError("diagonal length must match weight matrix size")
        if not np.array_equal(w, w.T):
            raise ValueError("projection weights must be symmetric")
        if w.min(initial=0) < 0:
            raise ValueError("projection weights must be non-negative")
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "diagonal", _frozen(d))

    @property
    def m(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class Backbone:
    """Binary agent network of significant co-occurrences plus both tail p-values.

    ``pvalues_upper[i, j]`` records the probability of seeing a weight at
    least as large as the observed one under the null ensemble, and
    ``pvalues_lower`` the mirror tail; ``model_tag`` names the model,
    significance level, and correction that produced the edge set.
    """

    edges: np.ndarray
    pvalues_upper: np.ndarray
    pvalues_lower: np.ndarray
    model_tag: str

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.uint8)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("backbone edges must be square")
        if e.max(initial=0) > 1:
            raise ValueError("backbone edges must be 0/1")
        if np.any(np.diag(e)):
            raise ValueError("backbone diagonal must be zero")
        if not np.array_equal(e, e.T):
            raise ValueError("backbone edges must be symmetric")
        pu = np.asarray(self.pvalues_upper, dtype=np.float64)
        pl = np.asarray(self.pvalues_lower, dtype=np.float64)
        if pu.shape != e.shape or pl.shape != e.shape:
            raise DimensionMismatchError("p-value matrices must match the edge matrix shape")
        object.__setattr__(self, "edges", _frozen(e))
        object.__setattr__(self, "pvalues_upper", _frozen(pu))
        object.__setattr__(self, "pvalues_lower", _frozen(pl))

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @property
    def edge_count(self) -> int:
        """Number of undirected edges retained."""
        return int(self.edges.sum()) // 2

    def edge_pairs(self) -> np.ndarray:
        """Retained (i, j) pairs with i < j, sorted lexicographically."""
        iu, ju = np.triu_indices(self.m, k=1)
        keep = self.edges[iu, ju] == 1
        return np.column_stack([iu[keep], ju[keep]])


def project(g: BipartiteGraph) -> Projection:
    """Co-occurrence projection: weight(i, j) = number of shared artifacts.

    Computed as the Gram matrix of the incidence rows; exact because counts
    stay far below the float64 integer range.
    """
    b = g.cells.astype(np.float64)
    w = np.rint(b @ b.T).astype(np.int64)
    return Projection(weights=w, diagonal=np.diag(w).copy())


def density(g: BipartiteGraph) -> float:
    """Fraction of incidence cells that are filled."""
    return g.fill / (g.m * g.n)


def jaccard(a: Backbone, b: Backbone) -> float:
    """Jaccard similarity of two backbones' edge sets.

    Two empty edge sets count as identical (returns 1.0), which keeps
    similarity sweeps total when sparse settings empty both backbones.
    """
    if a.m != b.m:
        raise DimensionMismatchError(f"backbones disagree on agent count: {a.m} != {b.m}")
    iu, ju = np.triu_indices(a.m, k=1)
    ea = a.edges[iu, ju] == 1
    eb = b.edges[iu, ju] == 1
    union = int(np.sum(ea | eb))
    if union == 0:
        return 1.0
    return int(np.sum(ea & eb)) / union
