"""Turning per-edge p-values into backbones under a chosen null model.

A test configuration names the null ensemble, the significance level, the
tail convention, and an optional family-wise correction.  Retention always
tests the upper tail: an edge enters the backbone when the probability of
seeing its weight or more under the null falls below the effective
per-test threshold.  Lower-tail p-values are recorded alongside for
downstream use but never add edges.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import cellprob, kernels
from .bigraph import Backbone, BipartiteGraph, Projection, project
from .errors import TrialBudgetWarning
from .fdsm import fdsm_pvalues, required_trials
from .pmf import Pmf, fcm_pmf, ffm_pmf, frm_pmf

__all__ = [
    "MODELS",
    "CORRECTIONS",
    "SDSM_METHODS",
    "TestConfig",
    "edge_pvalues",
    "backbone_from_pvalues",
    "extract_backbone",
    "fwer",
    "correct",
]

MODELS = ("ffm", "frm", "fcm", "sdsm", "fdsm")
CORRECTIONS = ("none", "bonferroni", "holm", "fdr")
SDSM_METHODS = {
    "rcf": cellprob.rcf,
    "lpm": cellprob.lpm,
    "logit": cellprob.logit,
    "logit_i": lambda g: cellprob.logit(g, interaction=True),
    "bicm": cellprob.bicm,
}


@dataclass(frozen=True)
class TestConfig:
    """Which null model to test against and how to threshold the p-values."""

    model: str
    alpha: float = 0.05
    tails: int = 2
    correction: str = "none"
    sdsm_method: str = "bicm"
    trials: int = 1000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {MODELS}")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie strictly between 0 and 1")
        if self.tails not in (1, 2):
            raise ValueError("tails must be 1 or 2")
        if self.correction not in CORRECTIONS:
            raise ValueError(f"unknown correction {self.correction!r}; choose from {CORRECTIONS}")
        if self.sdsm_method not in SDSM_METHODS:
            raise ValueError(
                f"unknown cell-probability method {self.sdsm_method!r}; "
                f"choose from {tuple(SDSM_METHODS)}"
            )
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    @property
    def alpha_eff(self) -> float:
        """Per-test level before any familywise correction."""
        return self.alpha / 2 if self.tails == 2 else self.alpha

    @property
    def model_tag(self) -> str:
        name = f"sdsm({self.sdsm_method})" if self.model == "sdsm" else self.model
        if self.model == "fdsm":
            name = f"fdsm(trials={self.trials},seed={self.seed})"
        return f"{name};alpha={self.alpha};tails={self.tails};correction={self.correction}"


def _tail_lookups(pmf: Pmf):
    """Inclusive upper/lower tail values indexed by weight."""
    upper = np.cumsum(pmf.probs[::-1])[::-1]
    lower = np.cumsum(pmf.probs)
    return upper, lower


def edge_pvalues(
    g: BipartiteGraph, cfg: TestConfig, projection: Projection | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower tail p-values for every agent pair under cfg's model.

    Returns two symmetric m x m matrices with 1.0 on the diagonal.  For the
    Monte-Carlo model these are empirical trial proportions; for the
    analytic models they are exact tail sums.
    """
    proj = projection if projection is not None else project(g)
    m = g.m
    w = proj.weights
    iu, ju = np.triu_indices(m, k=1)
    w_pairs = w[iu, ju]

    if cfg.model == "fdsm":
        mc = fdsm_pvalues(
            g, cfg.trials, seed=cfg.seed, workers=cfg.workers, projection=proj
        )
        p_upper = mc.p_upper.copy()
        p_lower = mc.p_lower.copy()
        np.fill_diagonal(p_upper, 1.0)
        np.fill_diagonal(p_lower, 1.0)
        return p_upper, p_lower

    if cfg.model == "ffm":
        up, low = _tail_lookups(ffm_pmf(m, g.n, g.fill))
        upper_pairs, lower_pairs = up[w_pairs], low[w_pairs]
    elif cfg.model == "fcm":
        up, low = _tail_lookups(fcm_pmf(m, g.col_sums))
        upper_pairs, lower_pairs = up[w_pairs], low[w_pairs]
    elif cfg.model == "frm":
        upper_pairs = np.empty(iu.size)
        lower_pairs = np.empty(iu.size)
        r = g.row_sums
        a = np.minimum(r[iu], r[ju])
        b = np.maximum(r[iu], r[ju])
        # the tail distribution is symmetric in the two row sums
        for av, bv in {(int(x), int(y)) for x, y in zip(a, b)}:
            mask = (a == av) & (b == bv)
            up, low = _tail_lookups(frm_pmf(g.n, av, bv))
            upper_pairs[mask] = up[w_pairs[mask]]
            lower_pairs[mask] = low[w_pairs[mask]]
    else:  # sdsm
        est = SDSM_METHODS[cfg.sdsm_method](g)
        upper_pairs, lower_pairs = kernels.poibin_tail_pairs(
            est.probs, iu.astype(np.int64), ju.astype(np.int64), w_pairs
        )

    p_upper = np.ones((m, m))
    p_lower = np.ones((m, m))
    p_upper[iu, ju] = p_upper[ju, iu] = upper_pairs
    p_lower[iu, ju] = p_lower[ju, iu] = lower_pairs
    return p_upper, p_lower


def backbone_from_pvalues(
    p_upper: np.ndarray,
    p_lower: np.ndarray,
    weights: np.ndarray,
    cfg: TestConfig,
) -> Backbone:
    """Threshold upper-tail p-values into a backbone.

    Only pairs with non-zero projection weight count as tests for the
    familywise correction; zero-weight pairs keep their recorded p-values
    but can never be retained.
    """
    m = p_upper.shape[0]
    iu, ju = np.triu_indices(m, k=1)
    tested = weights[iu, ju] > 0
    p_tested = p_upper[iu, ju][tested]
    if cfg.correction == "none":
        decisions = p_tested < cfg.alpha_eff
    else:
        decisions = correct(p_tested, cfg.alpha_eff, cfg.correction)
    edges = np.zeros((m, m), dtype=np.uint8)
    keep_i = iu[tested][decisions]
    keep_j = ju[tested][decisions]
    edges[keep_i, keep_j] = 1
    edges[keep_j, keep_i] = 1
    return Backbone(
        edges=edges, pvalues_upper=p_upper, pvalues_lower=p_lower, model_tag=cfg.model_tag
    )


def extract_backbone(g: BipartiteGraph, cfg: TestConfig) -> Backbone:
    """Extract the backbone of g's projection under the configured test."""
    proj = project(g)
    if cfg.model == "fdsm" and cfg.correction != "none":
        _warn_if_trials_insufficient(proj, cfg)
    p_upper, p_lower = edge_pvalues(g, cfg, projection=proj)
    return backbone_from_pvalues(p_upper, p_lower, proj.weights, cfg)


def _warn_if_trials_insufficient(proj: Projection, cfg: TestConfig) -> None:
    iu, ju = np.triu_indices(proj.m, k=1)
    t = int(np.count_nonzero(proj.weights[iu, ju]))
    if t == 0:
        return
    alpha_star = cfg.alpha_eff / t
    needed = required_trials(0.0, alpha_star, 0.05, 0.05)
    if needed > cfg.trials:
        warnings.warn(
            f"correcting {t} Monte-Carlo tests at per-test level {alpha_star:.3g} "
            f"needs at least {needed} trials even for unambiguous edges, but only "
            f"{cfg.trials} are configured; corrected decisions will be unreliable",
            TrialBudgetWarning,
            stacklevel=3,
        )


def fwer(alpha: float, t: int) -> float:
    """Familywise error rate of t independent tests at per-test level alpha."""
    if t < 1:
        raise ValueError("t must be at least 1")
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    return 1.0 - (1.0 - alpha) ** t


def correct(pvalues, alpha: float, method: str) -> np.ndarray:
    """Per-test reject/accept decisions under a familywise correction.

    * ``bonferroni``: reject where p < alpha / t.
    * ``holm``: step-down; walk p-values in ascending order rejecting while
      p_(i) < alpha / (t - i + 1), stop at the first failure.
    * ``fdr``: Benjamini-Hochberg; reject every p-value no larger than the
      largest p_(i) with p_(i) <= i * alpha / t.

    Returns a boolean array aligned with the input order.
    """
    p = np.asarray(pvalues, dtype=np.float64).ravel()
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    t = p.size
    out = np.zeros(t, dtype=bool)
    if t == 0:
        return out
    if method == "bonferroni":
        return p < alpha / t
    order = np.argsort(p, kind="stable")
    sorted_p = p[order]
    if method == "holm":
        thresholds = alpha / (t - np.arange(t))
        failing = np.nonzero(sorted_p >= thresholds)[0]
        n_reject = t if failing.size == 0 else int(failing[0])
        out[order[:n_reject]] = True
        return out
    if method == "fdr":
        thresholds = (np.arange(1, t + 1) * alpha) / t
        passing = np.nonzero(sorted_p <= thresholds)[0]
        if passing.size:
            out[p <= sorted_p[passing[-1]]] = True
        return out
    raise ValueError(f"unknown correction {method!r}; choose from {CORRECTIONS[1:]}")
