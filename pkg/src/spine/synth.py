"""Synthetic bipartite generators: shaped degree distributions and planted blocks.

Degree sequences are drawn from beta-distributed node weights scaled to a
target density, rounded to integers, and realized exactly; the matrix is
then randomized among all matrices with those margins by curveball trades.
Constant shapes therefore yield exactly constant degrees.  Two-group
community structure is planted afterwards by degree-preserving
checkerboard swaps that concentrate edges inside the diagonal blocks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bigraph import BipartiteGraph
from .errors import GenerationError, TargetNotReachedWarning
from .fdsm import CurveballSampler
from .oracle import gale_ryser_feasible
from .seeding import derive_rng

__all__ = [
    "DegreeShape",
    "PlantedPartition",
    "generate",
    "plant_blocks",
    "within_fraction",
]

_SHAPE_PRESETS = {
    "right": (1.0, 10.0),
    "left": (10.0, 1.0),
    "uniform": (1.0, 1.0),
    "constant": (10_000.0, 10_000.0),
    "normal": (10.0, 10.0),
}


@dataclass(frozen=True)
class DegreeShape:
    """A beta-distributed node-weight family shaping one side's degrees."""

    name: str
    beta_a: float
    beta_b: float

    def __post_init__(self):
        if self.beta_a <= 0 or self.beta_b <= 0:
            raise ValueError("beta parameters must be positive")

    @classmethod
    def preset(cls, name: str) -> "DegreeShape":
        try:
            a, b = _SHAPE_PRESETS[name]
        except KeyError:
            raise ValueError(
                f"unknown shape {name!r}; choose from {tuple(_SHAPE_PRESETS)}"
            ) from None
        return cls(name=name, beta_a=a, beta_b=b)


def _as_shape(shape) -> DegreeShape:
    return shape if isinstance(shape, DegreeShape) else DegreeShape.preset(str(shape))


@dataclass(frozen=True)
class PlantedPartition:
    """Two-group labels for agents and artifacts plus a within-group target.

    ``w`` is the fraction of edges that should join an agent and artifact
    of the same group; 0.5 is the no-structure baseline.
    """

    agent_groups: np.ndarray
    artifact_groups: np.ndarray
    w: float

    def __post_init__(self):
        ag = np.asarray(self.agent_groups, dtype=np.int8)
        rg = np.asarray(self.artifact_groups, dtype=np.int8)
        for labels, side in ((ag, "agent"), (rg, "artifact")):
            if labels.ndim != 1 or labels.size < 2:
                raise ValueError(f"{side} labels must be a vector of length >= 2")
            if not set(np.unique(labels)) <= {0, 1}:
                raise ValueError(f"{side} labels must be 0/1")
            if labels.min() == labels.max():
                raise ValueError(f"both groups must be non-empty on the {side} side")
        if not 0.5 <= self.w <= 1.0:
            raise ValueError("target within-group fraction must lie in [0.5, 1]")
        ag.flags.writeable = False
        rg.flags.writeable = False
        object.__setattr__(self, "agent_groups", ag)
        object.__setattr__(self, "artifact_groups", rg)

    @classmethod
    def balanced(cls, m: int, n: int, w: float) -> "PlantedPartition":
        """Split both sides in half: first ceil(x/2) nodes in group 0."""
        ag = np.zeros(m, dtype=np.int8)
        ag[(m + 1) // 2 :] = 1
        rg = np.zeros(n, dtype=np.int8)
        rg[(n + 1) // 2 :] = 1
        return cls(ag, rg, w)

    @classmethod
    def random(cls, m: int, n: int, w: float, seed: int = 0) -> "PlantedPartition":
        """Assign every node to a group by a fair coin (retry degenerate draws)."""
        rng = derive_rng(seed, "partition")
        for _ in range(1000):
            ag = rng.integers(0, 2, size=m).astype(np.int8)
            rg = rng.integers(0, 2, size=n).astype(np.int8)
            if ag.min() != ag.max() and rg.min() != rg.max():
                return cls(ag, rg, w)
        raise GenerationError("could not draw non-degenerate group labels")


def _integer_degrees(weights: np.ndarray, total: int, cap: int) -> np.ndarray:
    """Round scaled weights to integer degrees summing exactly to ``total``.

    Largest-remainder rounding, then any units lost to the per-node cap are
    moved to the nodes with the most headroom (deterministically).
    """
    raw = weights * (total / weights.sum())
    base = np.floor(raw).astype(np.int64)
    remainder = raw - base
    deficit = int(total - base.sum())
    if deficit > 0:
        order = np.lexsort((np.arange(weights.size), -remainder))
        base[order[:deficit]] += 1
    np.clip(base, 0, cap, out=base)
    while base.sum() < total:
        headroom = cap - base
        base[int(np.argmax(headroom))] += 1
    while base.sum() > total:
        base[int(np.argmax(base))] -= 1
    return base


def _realize_margins(row_sums: np.ndarray, col_sums: np.ndarray) -> np.ndarray:
    """Construct one incidence matrix with exactly the given margins.

    Greedy constructive proof of realizability: fill rows in descending
    degree order, always into the columns with the most remaining
    capacity.  Caller guarantees feasibility.
    """
    m, n = row_sums.size, col_sums.size
    cells = np.zeros((m, n), dtype=np.uint8)
    residual = col_sums.astype(np.int64).copy()
    col_ids = np.arange(n)
    for i in np.argsort(-row_sums, kind="stable"):
        k = int(row_sums[i])
        if k == 0:
            continue
        order = np.lexsort((col_ids, -residual))
        chosen = order[:k]
        cells[i, chosen] = 1
        residual[chosen] -= 1
    if residual.any():
        raise GenerationError("margin realization failed; sequences were not realizable")
    return cells


def generate(
    m: int,
    n: int,
    density: float,
    agent_shape: DegreeShape | str,
    artifact_shape: DegreeShape | str,
    seed: int = 0,
    max_attempts: int = 100,
) -> BipartiteGraph:
    """Random incidence with beta-shaped degree sequences and a target density.

    Agent and artifact weights are drawn from the shapes' beta
    distributions and scaled so each side's degrees sum to the target fill
    (density * m * n rounded); the rounded sequences are realized exactly
    and the matrix is randomized by degree-preserving curveball trades.
    Infeasible draws are regenerated; the realized density misses the
    target only through rounding, far inside the 10% tolerance.
    """
    if not 0 < density < 1:
        raise ValueError("density must lie strictly between 0 and 1")
    if m < 1 or n < 1:
        raise ValueError("need at least one agent and one artifact")
    a_shape = _as_shape(agent_shape)
    b_shape = _as_shape(artifact_shape)
    rng = derive_rng(seed, "generate")
    fill = int(round(density * m * n))
    if fill < 1:
        raise GenerationError(f"target density {density} rounds to an empty {m}x{n} graph")
    for _ in range(max_attempts):
        a = rng.beta(a_shape.beta_a, a_shape.beta_b, size=m)
        b = rng.beta(b_shape.beta_a, b_shape.beta_b, size=n)
        r = _integer_degrees(a, fill, cap=n)
        c = _integer_degrees(b, fill, cap=m)
        if not gale_ryser_feasible(r, c):
            continue
        g = BipartiteGraph(_realize_margins(r, c))
        if m >= 2:
            sampler = CurveballSampler(g, rng, swaps_per_sample=0)
            sampler.advance(max(2000, 10 * fill))
            g = sampler.state_graph()
        if abs(g.fill / (m * n) - density) <= 0.1 * density:
            return g
    raise GenerationError(
        f"could not realize density {density} within 10% after {max_attempts} attempts"
    )


def within_fraction(g: BipartiteGraph, part: PlantedPartition) -> float:
    """Fraction of edges joining an agent and artifact of the same group."""
    if g.fill == 0:
        raise ValueError("within-group fraction is undefined on an empty graph")
    same = part.agent_groups[:, None] == part.artifact_groups[None, :]
    return float(g.cells[same].sum()) / g.fill


def plant_blocks(
    g: BipartiteGraph,
    part: PlantedPartition,
    seed: int = 0,
    batch: int = 4096,
    stall_factor: int = 50,
) -> BipartiteGraph:
    """Raise the within-group edge fraction to the partition's target.

    Samples random pairs of existing edges; when the four cells form a
    checkerboard (both diagonal cells filled, both off-diagonal cells
    empty) and flipping it gains within-group edges, the swap is applied.
    Swaps exchange column positions between two rows, so every row and
    column sum is preserved exactly.  Gives up with a warning after
    ``stall_factor * fill`` candidate samples without progress.
    """
    if g.fill == 0:
        raise ValueError("cannot plant structure in an empty graph")
    if part.agent_groups.size != g.m or part.artifact_groups.size != g.n:
        raise ValueError("partition labels do not match the graph dimensions")
    cells = g.cells.copy()
    ag = part.agent_groups.astype(np.int64)
    rg = part.artifact_groups.astype(np.int64)
    ei, ek = np.nonzero(cells)
    ei = ei.astype(np.int64)
    ek = ek.astype(np.int64)
    f = ei.size
    within = int(np.sum(ag[ei] == rg[ek]))
    target = part.w * f
    rng = derive_rng(seed, "plant")
    max_stall = stall_factor * f
    stall = 0
    while within < target and stall < max_stall:
        xs = rng.integers(0, f, size=batch)
        ys = rng.integers(0, f, size=batch)
        i, k = ei[xs], ek[xs]
        j, l = ei[ys], ek[ys]
        gain = (
            (ag[i] == rg[l]).astype(np.int8)
            + (ag[j] == rg[k])
            - (ag[i] == rg[k])
            - (ag[j] == rg[l])
        )
        ok = (i != j) & (k != l) & (gain > 0) & (cells[i, l] == 0) & (cells[j, k] == 0)
        stall += batch
        for x, y in zip(xs[ok], ys[ok]):
            i, k = int(ei[x]), int(ek[x])
            j, l = int(ei[y]), int(ek[y])
            # revalidate: earlier swaps in this batch may have moved these cells
            if i == j or k == l or cells[i, l] or cells[j, k]:
                continue
            delta = (
                int(ag[i] == rg[l]) + int(ag[j] == rg[k])
                - int(ag[i] == rg[k]) - int(ag[j] == rg[l])
            )
            if delta <= 0:
                continue
            cells[i, k] = 0
            cells[j, l] = 0
            cells[i, l] = 1
            cells[j, k] = 1
            ek[x] = l
            ek[y] = k
            within += delta
            stall = 0
            if within >= target:
                break
    result = BipartiteGraph(cells)
    if within < target:
        warnings.warn(
            f"no improving checkerboard swap found after {max_stall} samples; "
            f"within-group fraction stopped at {within / f:.4f} (target {part.w})",
            TargetNotReachedWarning,
            stacklevel=2,
        )
    return result
