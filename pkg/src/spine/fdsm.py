"""Monte-Carlo machinery for the exact-degree-sequence null model.

The ensemble fixing both degree sequences has no known closed-form edge
weight distribution, so p-values are estimated by sampling: a curveball
chain randomizes the observed incidence while preserving every row and
column sum, and each thinned state is projected and compared against the
observed co-occurrence counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from . import kernels
from .bigraph import BipartiteGraph, Projection, project
from .errors import UndecidableEdgeError
from .seeding import derive_rng

__all__ = [
    "CurveballSampler",
    "McPvalues",
    "curveball_step",
    "sample",
    "fdsm_pvalues",
    "required_trials",
]


class CurveballSampler:
    """Markov chain over all incidence matrices sharing the observed margins.

    One trade picks two distinct agent rows, pools the artifacts held by
    exactly one of them, and deals the pool back at random while keeping
    each row's count, which leaves both degree sequences untouched.  The
    chain state is stored row-wise (CSR layout) so trades never move
    memory between rows.

    The stream of states is fully determined by ``seed``; two samplers
    built with the same seed produce byte-identical samples.
    """

    def __init__(
        self,
        graph: BipartiteGraph,
        seed: int | np.random.Generator = 0,
        swaps_per_sample: int | None = None,
        burn_in: int = 0,
    ):
        if graph.m < 2:
            raise ValueError("curveball trades need at least two agent rows")
        self.m = graph.m
        self.n = graph.n
        rows, cols = np.nonzero(graph.cells)
        self._row_data = cols.astype(np.int64)
        self._row_ptr = np.zeros(self.m + 1, dtype=np.int64)
        np.cumsum(graph.row_sums, out=self._row_ptr[1:])
        self._row_index = rows.astype(np.int64)
        if isinstance(seed, np.random.Generator):
            self.rng = seed
        else:
            self.rng = derive_rng(int(seed), "curveball")
        self.swaps_per_sample = 5 * self.m if swaps_per_sample is None else int(swaps_per_sample)
        if self.swaps_per_sample < 0:
            raise ValueError("swaps_per_sample must be non-negative")
        if burn_in:
            self.advance(burn_in)

    def advance(self, trades: int) -> None:
        """Run ``trades`` curveball trades in place."""
        if trades <= 0:
            return
        lo = self.rng.integers(0, self.m, size=trades, dtype=np.int64)
        delta = self.rng.integers(1, self.m, size=trades, dtype=np.int64)
        seeds = self.rng.integers(0, 2**64, size=trades, dtype=np.uint64)
        kernels.curveball_trades(self._row_data, self._row_ptr, self.n, lo, delta, seeds)

    def fill_dense(self, out: np.ndarray) -> np.ndarray:
        """Write the current state into a preallocated (m, n) float matrix."""
        out[:] = 0.0
        out[self._row_index, self._row_data] = 1.0
        return out

    def state_graph(self) -> BipartiteGraph:
        """Copy of the current chain state."""
        cells = np.zeros((self.m, self.n), dtype=np.uint8)
        cells[self._row_index, self._row_data] = 1
        return BipartiteGraph(cells)


def curveball_step(sampler: CurveballSampler) -> CurveballSampler:
    """Apply a single trade to the sampler and return it."""
    sampler.advance(1)
    return sampler


def sample(sampler: CurveballSampler) -> BipartiteGraph:
    """Advance by the sampler's thinning interval and return the new state."""
    sampler.advance(sampler.swaps_per_sample)
    return sampler.state_graph()


@dataclass(frozen=True)
class McPvalues:
    """Per-edge tail counts from Monte-Carlo projection trials.

    ``ge_counts[i, j]`` counts trials whose sampled weight was >= the
    observed one (ties count in both matrices, so the two counts sum to at
    least ``trials``).
    """

    trials: int
    ge_counts: np.ndarray
    le_counts: np.ndarray

    @property
    def p_upper(self) -> np.ndarray:
        return self.ge_counts / self.trials

    @property
    def p_lower(self) -> np.ndarray:
        return self.le_counts / self.trials


def _run_chain(
    g: BipartiteGraph,
    observed: np.ndarray,
    trials: int,
    rng: np.random.Generator,
    swaps_per_sample: int | None,
    burn_in: int,
):
    sampler = CurveballSampler(g, rng, swaps_per_sample=swaps_per_sample, burn_in=burn_in)
    m = g.m
    ge = np.zeros((m, m), dtype=np.int64)
    le = np.zeros((m, m), dtype=np.int64)
    dense = np.empty((m, g.n))
    proj = np.empty((m, m))
    for _ in range(trials):
        sampler.advance(sampler.swaps_per_sample)
        b = sampler.fill_dense(dense)
        np.matmul(b, b.T, out=proj)
        ge += proj >= observed
        le += proj <= observed
    return ge, le


def fdsm_pvalues(
    g: BipartiteGraph,
    trials: int,
    seed: int = 0,
    swaps_per_sample: int | None = None,
    burn_in: int | None = None,
    workers: int = 1,
    projection: Projection | None = None,
) -> McPvalues:
    """Empirical tail counts of co-occurrence weights under fixed margins.

    Each worker owns an independent chain seeded by (seed, worker index);
    counters merge by addition, so the result depends only on ``seed`` and
    ``workers``, not on scheduling.  Chains are burned in for 100 trades
    per agent by default and thinned by ``swaps_per_sample`` (default 5
    per agent) between retained samples.
    """
    if trials < 1:
        raise ValueError("need at least one Monte-Carlo trial")
    if workers < 1:
        raise ValueError("need at least one worker")
    observed = (projection if projection is not None else project(g)).weights.astype(np.float64)
    burn = 100 * g.m if burn_in is None else int(burn_in)
    workers = min(workers, trials)
    share = [trials // workers + (1 if w < trials % workers else 0) for w in range(workers)]
    jobs = [
        (g, observed, share[w], derive_rng(seed, "fdsm", w), swaps_per_sample, burn)
        for w in range(workers)
    ]
    if workers == 1:
        results = [_run_chain(*jobs[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda args: _run_chain(*args), jobs))
    ge = sum(r[0] for r in results)
    le = sum(r[1] for r in results)
    return McPvalues(trials=trials, ge_counts=ge, le_counts=le)


def required_trials(p_est: float, alpha_star: float, eps1: float, eps2: float) -> int:
    """Monte-Carlo trials needed to separate an estimated p-value from a threshold.

    Sample-size planning for comparing an estimated proportion ``p_est``
    against the target ``alpha_star`` with one-sided false-positive rate
    ``eps1`` and false-negative rate ``eps2``:

        N  = ceil([z1 sqrt(a(1-a)) + z2 sqrt(p(1-p))]^2 / (p-a)^2)
        N' = N + ceil(1 / |p - a|)

    Returns the adjusted estimate N'.
    """
    if not 0 < alpha_star < 1:
        raise ValueError("alpha_star must lie strictly between 0 and 1")
    if not 0 <= p_est < 1:
        raise ValueError("p_est must lie in [0, 1)")
    if not (0 < eps1 < 1 and 0 < eps2 < 1):
        raise ValueError("error rates must lie strictly between 0 and 1")
    if p_est == alpha_star:
        raise UndecidableEdgeError(
            f"estimated p equals the threshold {alpha_star}; no trial count can decide this edge"
        )
    z1 = norm.isf(eps1)
    z2 = norm.isf(eps2)
    numerator = z1 * math.sqrt(alpha_star * (1 - alpha_star)) + z2 * math.sqrt(p_est * (1 - p_est))
    gap = p_est - alpha_star
    n_base = math.ceil((numerator / gap) ** 2)
    return n_base + math.ceil(1.0 / abs(gap))
