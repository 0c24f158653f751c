"""Estimators of Bernoulli cell-filling probabilities from bipartite margins.

Each estimator maps a bipartite graph to an m x n matrix of probabilities
approximating how often each cell is filled across all fixed-margin
realizations of the graph.  These probabilities parameterize the stochastic
degree sequence null model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .bigraph import BipartiteGraph
from .errors import (
    CollinearPredictorWarning,
    ConvergenceError,
    DegenerateDesignError,
    DimensionMismatchError,
    PerfectSeparationWarning,
)

__all__ = ["CellProbMatrix", "rcf", "lpm", "logit", "bicm", "accuracy"]

_PROB_CLAMP = 1e-10
_SEPARATION_ETA = 30.0


@dataclass(frozen=True)
class CellProbMatrix:
    """An m x n matrix of cell probabilities plus the estimator that made it."""

    probs: np.ndarray
    method_tag: str

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 2:
            raise ValueError("cell probabilities must form a 2-D matrix")
        if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
            raise ValueError("cell probabilities must lie in [0, 1]")
        p = np.ascontiguousarray(p)
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def m(self) -> int:
        return self.probs.shape[0]

    @property
    def n(self) -> int:
        return self.probs.shape[1]


def rcf(g: BipartiteGraph) -> CellProbMatrix:
    """Row sum times column sum over fill, truncated into [0, 1]."""
    if g.fill == 0:
        raise ValueError("rcf is undefined on an empty graph (fill = 0)")
    probs = np.outer(g.row_sums, g.col_sums) / g.fill
    return CellProbMatrix(np.clip(probs, 0.0, 1.0), "rcf")


def _design_stats(g: BipartiteGraph, interaction: bool):
    """Collapsed sufficient statistics for degree-based regressions.

    Cells sharing the same (row degree, column degree) pair are
    exchangeable, so regressions only need one design row per distinct
    pair, weighted by how many cells it covers and how many of them are 1.
    """
    r_vals, r_inv, r_cnt = np.unique(g.row_sums, return_inverse=True, return_counts=True)
    c_vals, c_inv, c_cnt = np.unique(g.col_sums, return_inverse=True, return_counts=True)
    ones = np.zeros((r_vals.size, c_vals.size))
    np.add.at(ones, (r_inv[:, None], c_inv[None, :]), g.cells)
    counts = np.outer(r_cnt, c_cnt).astype(np.float64)
    rr, cc = np.meshgrid(r_vals, c_vals, indexing="ij")
    cols = [np.ones(rr.size), rr.ravel().astype(float), cc.ravel().astype(float)]
    names = ["intercept", "row_degree", "col_degree"]
    if interaction:
        cols.append((rr * cc).ravel().astype(float))
        names.append("row_degree*col_degree")
    design = np.column_stack(cols)
    return design, names, counts.ravel(), ones.ravel(), (r_inv, c_inv)


def _prune_collinear(design: np.ndarray, names: list[str], weights: np.ndarray):
    """Drop predictors that add no rank, warning for each one dropped."""
    live = weights > 0
    kept: list[int] = []
    rank = 0
    for idx in range(design.shape[1]):
        trial = design[np.ix_(live, kept + [idx])]
        new_rank = np.linalg.matrix_rank(trial)
        if new_rank > rank:
            kept.append(idx)
            rank = new_rank
        else:
            warnings.warn(
                f"predictor {names[idx]!r} is collinear with earlier terms; dropping it",
                CollinearPredictorWarning,
                stacklevel=3,
            )
    if not kept:
        raise DegenerateDesignError("no usable predictors remain after pruning")
    return design[:, kept], [names[i] for i in kept]


def _expand(fitted_flat: np.ndarray, index_maps, shape) -> np.ndarray:
    r_inv, c_inv = index_maps
    grid = fitted_flat.reshape(-1)
    n_c = np.unique(c_inv).size
    return grid.reshape((-1, n_c))[r_inv][:, c_inv].reshape(shape)


def lpm(g: BipartiteGraph, interaction: bool = False) -> CellProbMatrix:
    """Linear probability model: least-squares fit of cells on degrees.

    Fitted values are clamped into [0, 1].  Collinear predictors (for
    example a degree that never varies) are dropped with a warning, which
    reduces gracefully to an intercept-only fit in the fully constant case.
    """
    design, names, counts, ones, index_maps = _design_stats(g, interaction)
    design, names = _prune_collinear(design, names, counts)
    y_mean = np.divide(ones, counts, out=np.zeros_like(ones), where=counts > 0)
    w = counts
    xtwx = design.T @ (design * w[:, None])
    xtwy = design.T @ (w * y_mean)
    try:
        beta = np.linalg.solve(xtwx, xtwy)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pruning prevents this
        raise DegenerateDesignError(f"normal equations singular even after pruning: {exc}")
    fitted = design @ beta
    probs = _expand(fitted, index_maps, (g.m, g.n))
    tag = "lpm_i" if interaction else "lpm"
    return CellProbMatrix(np.clip(probs, 0.0, 1.0), tag)


def logit(g: BipartiteGraph, interaction: bool = False) -> CellProbMatrix:
    """Logistic regression of cells on degrees, fit by IRLS.

    Converges when the largest absolute score drops below 1e-8, capped at
    100 iterations.  Perfect separation is reported as a warning and the
    fitted probabilities are clamped away from exact 0 and 1.
    """
    if g.fill == 0 or g.fill == g.m * g.n:
        raise ValueError("logistic fit needs a non-constant response (0 < fill < m*n)")
    design, names, counts, ones, index_maps = _design_stats(g, interaction)
    design, names = _prune_collinear(design, names, counts)
    y_mean = np.divide(ones, counts, out=np.zeros_like(ones), where=counts > 0)

    beta = np.zeros(design.shape[1])
    beta[0] = np.log(g.fill / (g.m * g.n - g.fill))
    converged = False
    for _ in range(100):
        mu = expit(design @ beta)
        score = design.T @ (counts * (y_mean - mu))
        if np.max(np.abs(score)) < 1e-8:
            converged = True
            break
        w = counts * mu * (1.0 - mu)
        xtwx = design.T @ (design * w[:, None])
        try:
            beta = beta + np.linalg.solve(xtwx, score)
        except np.linalg.LinAlgError:
            # weights collapsed: the likelihood is maximized on the boundary
            break
    eta = design @ beta
    if not converged or np.max(np.abs(eta)) >= _SEPARATION_ETA:
        warnings.warn(
            "logistic fit shows signs of perfect separation; probabilities clamped",
            PerfectSeparationWarning,
            stacklevel=2,
        )
    probs = _expand(expit(eta), index_maps, (g.m, g.n))
    tag = "logit_i" if interaction else "logit"
    return CellProbMatrix(np.clip(probs, _PROB_CLAMP, 1.0 - _PROB_CLAMP), tag)


def bicm(
    g: BipartiteGraph,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    damping: float = 0.5,
) -> CellProbMatrix:
    """Maximum-entropy cell probabilities matching expected margins.

    Finds non-negative fitnesses x_i, y_k with p_ik = x_i y_k / (1 + x_i y_k)
    whose expected row and column sums reproduce the observed degrees within
    ``tol``.  Zero or full rows and columns are peeled off first (their
    probabilities are forced to exactly 0 or 1), and equal degrees share one
    fitness, so the iteration only works on distinct residual degrees.
    """
    m, n = g.m, g.n
    probs = np.full((m, n), np.nan)
    row_active = np.ones(m, dtype=bool)
    col_active = np.ones(n, dtype=bool)
    r = g.row_sums.astype(np.int64).copy()
    c = g.col_sums.astype(np.int64).copy()

    # peel forced margins until none remain
    while True:
        n_act = int(col_active.sum())
        m_act = int(row_active.sum())
        row_empty = row_active & (r == 0)
        row_full = row_active & (r == n_act) & (n_act > 0)
        col_empty = col_active & (c == 0)
        col_full = col_active & (c == m_act) & (m_act > 0)
        if not (row_empty.any() or row_full.any() or col_empty.any() or col_full.any()):
            break
        if row_empty.any():
            probs[np.ix_(row_empty, col_active)] = 0.0
            row_active &= ~row_empty
        if row_full.any():
            probs[np.ix_(row_full, col_active)] = 1.0
            c[col_active] -= int(row_full.sum())
            row_active &= ~row_full
        if col_empty.any():
            probs[np.ix_(row_active, col_empty)] = 0.0
            col_active &= ~col_empty
        if col_full.any():
            probs[np.ix_(row_active, col_full)] = 1.0
            r[row_active] -= int(col_full.sum())
            col_active &= ~col_full
        if n_act == 0 or m_act == 0:
            break

    if row_active.any() and col_active.any():
        r_act = r[row_active]
        c_act = c[col_active]
        r_vals, r_inv, r_cnt = np.unique(r_act, return_inverse=True, return_counts=True)
        c_vals, c_inv, c_cnt = np.unique(c_act, return_inverse=True, return_counts=True)
        f_act = float(r_act.sum())
        x = r_vals / np.sqrt(f_act)
        y = c_vals / np.sqrt(f_act)

        def occupancy(x, y):
            xy = np.outer(x, y)
            return xy / (1.0 + xy)

        residual = np.inf
        for _ in range(max_iter):
            p = occupancy(x, y)
            exp_rows = p @ c_cnt
            exp_cols = r_cnt @ p
            residual = max(
                np.max(np.abs(exp_rows - r_vals)), np.max(np.abs(exp_cols - c_vals))
            )
            if residual < tol:
                break
            denom_x = (y / (1.0 + np.outer(x, y))) @ c_cnt
            x_new = r_vals / denom_x
            x = x_new**damping * x ** (1.0 - damping)
            denom_y = r_cnt @ (x[:, None] / (1.0 + np.outer(x, y)))
            y_new = c_vals / denom_y
            y = y_new**damping * y ** (1.0 - damping)
        if residual >= tol:
            # the fixed point crawls near degenerate margins; polish with Newton
            x, y, residual = _newton_fitnesses(x, y, r_vals, c_vals, r_cnt, c_cnt, tol)
        if residual >= tol:
            raise ConvergenceError(
                f"fitness iteration did not reach tol={tol} (residual {residual:.3e})",
                residual=residual,
            )
        block = occupancy(x, y)[r_inv][:, c_inv]
        probs[np.ix_(row_active, col_active)] = block

    assert not np.isnan(probs).any()
    return CellProbMatrix(np.clip(probs, 0.0, 1.0), "bicm")


def _newton_fitnesses(x, y, r_vals, c_vals, r_cnt, c_cnt, tol, max_iter=200):
    """Newton refinement of the margin-matching equations in log-fitness space.

    The equations are the stationarity conditions of a convex problem, so
    damped Newton steps converge from the fixed-point iterate; the scaling
    gauge (x*c, y/c) makes the Jacobian singular, which the least-squares
    step absorbs.
    """
    theta = np.log(x)
    phi = np.log(y)
    nr = theta.size

    def state(theta, phi):
        p = expit(theta[:, None] + phi[None, :])
        fr = p @ c_cnt - r_vals
        fc = r_cnt @ p - c_vals
        return p, np.concatenate([fr, fc])

    p, f = state(theta, phi)
    for _ in range(max_iter):
        residual = np.max(np.abs(f))
        if residual < tol:
            break
        w = p * (1.0 - p)
        jac = np.block(
            [
                [np.diag(w @ c_cnt), w * c_cnt[None, :]],
                [(w * r_cnt[:, None]).T, np.diag(r_cnt @ w)],
            ]
        )
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        scale = 1.0
        for _ in range(40):
            p_new, f_new = state(theta + scale * step[:nr], phi + scale * step[nr:])
            if np.max(np.abs(f_new)) < residual:
                theta += scale * step[:nr]
                phi += scale * step[nr:]
                p, f = p_new, f_new
                break
            scale *= 0.5
        else:
            break
    return np.exp(theta), np.exp(phi), float(np.max(np.abs(f)))


def accuracy(est: CellProbMatrix, truth: CellProbMatrix) -> float:
    """Mean absolute difference between two probability matrices."""
    if est.probs.shape != truth.probs.shape:
        raise DimensionMismatchError(
            f"shape mismatch: {est.probs.shape} vs {truth.probs.shape}"
        )
    return float(np.mean(np.abs(est.probs - truth.probs)))
