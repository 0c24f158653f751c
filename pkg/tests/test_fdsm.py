import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spine.bigraph import BipartiteGraph, project
from spine.errors import UndecidableEdgeError
from spine.fdsm import (
    CurveballSampler,
    curveball_step,
    fdsm_pvalues,
    required_trials,
    sample,
)
from spine.oracle import enumerate_fdsm, exact_edge_pmf
from spine.pmf import upper_tail


class TestCurveballStep:
    def test_identical_rows_unchanged(self):
        g = BipartiteGraph([[1, 1, 0], [1, 1, 0]])
        s = CurveballSampler(g, seed=1)
        for _ in range(50):
            curveball_step(s)
        assert s.state_graph() == g

    def test_disjoint_singletons_split_evenly(self):
        # rows {a} and {b}: a trade leaves {a},{b} or swaps to {b},{a}
        g = BipartiteGraph([[1, 0], [0, 1]])
        outcomes = {True: 0, False: 0}
        for seed in range(2000):
            s = CurveballSampler(g, seed=seed)
            curveball_step(s)
            outcomes[s.state_graph() == g] += 1
        assert outcomes[True] + outcomes[False] == 2000
        assert abs(outcomes[True] - 1000) < 3 * np.sqrt(2000 * 0.25)

    def test_margins_conserved(self):
        rng = np.random.default_rng(3)
        g = BipartiteGraph((rng.random((12, 20)) < 0.3).astype(int))
        s = CurveballSampler(g, seed=4)
        for _ in range(200):
            curveball_step(s)
        out = s.state_graph()
        np.testing.assert_array_equal(out.row_sums, g.row_sums)
        np.testing.assert_array_equal(out.col_sums, g.col_sums)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50)
    def test_degree_preservation_fuzz(self, seed):
        # 50 hypothesis cases x 200 trades each, on top of the dedicated
        # 10^4-step run in the acceptance suite
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 10))
        n = int(rng.integers(1, 12))
        g = BipartiteGraph((rng.random((m, n)) < rng.uniform(0.1, 0.9)).astype(int))
        s = CurveballSampler(g, seed=seed)
        s.advance(200)
        out = s.state_graph()
        np.testing.assert_array_equal(out.row_sums, g.row_sums)
        np.testing.assert_array_equal(out.col_sums, g.col_sums)


class TestSample:
    def test_zero_swaps_returns_observed(self, table1_graph):
        s = CurveballSampler(table1_graph, seed=9, swaps_per_sample=0)
        assert sample(s) == table1_graph

    def test_default_thinning_interval(self, table1_graph):
        s = CurveballSampler(table1_graph, seed=9)
        assert s.swaps_per_sample == 5 * table1_graph.m

    def test_fixed_seed_reproduces_stream(self, table1_graph):
        s1 = CurveballSampler(table1_graph, seed=123)
        s2 = CurveballSampler(table1_graph, seed=123)
        for _ in range(20):
            assert sample(s1) == sample(s2)

    def test_distinct_seeds_differ(self, table1_graph):
        s1 = CurveballSampler(table1_graph, seed=1)
        s2 = CurveballSampler(table1_graph, seed=2)
        streams_equal = all(sample(s1) == sample(s2) for _ in range(20))
        assert not streams_equal


class TestFdsmPvalues:
    def test_single_member_ensemble_gives_pvalue_one(self):
        # margins force every sample to equal the observed graph
        g = BipartiteGraph([[1, 1, 1], [0, 0, 0]])
        mc = fdsm_pvalues(g, trials=50, seed=5)
        assert np.all(mc.p_upper == 1.0)
        assert np.all(mc.p_lower == 1.0)

    def test_converges_to_exact_tail(self, table1_graph):
        enum = enumerate_fdsm([1, 1, 2], [1, 1, 2])
        trials = 4000
        mc = fdsm_pvalues(table1_graph, trials=trials, seed=11)
        w = project(table1_graph).weights
        for i in range(3):
            for j in range(i + 1, 3):
                exact = upper_tail(exact_edge_pmf(enum, i, j), int(w[i, j]))
                se = np.sqrt(exact * (1 - exact) / trials)
                assert abs(mc.p_upper[i, j] - exact) <= max(3 * se, 1e-9)

    def test_tie_counts_overlap(self, table1_graph):
        mc = fdsm_pvalues(table1_graph, trials=100, seed=2)
        assert np.all(mc.ge_counts + mc.le_counts >= mc.trials)
        assert mc.ge_counts.max() <= mc.trials

    def test_deterministic_for_fixed_seed_and_workers(self, table1_graph):
        a = fdsm_pvalues(table1_graph, trials=120, seed=7, workers=2)
        b = fdsm_pvalues(table1_graph, trials=120, seed=7, workers=2)
        np.testing.assert_array_equal(a.ge_counts, b.ge_counts)
        np.testing.assert_array_equal(a.le_counts, b.le_counts)

    def test_rejects_bad_arguments(self, table1_graph):
        with pytest.raises(ValueError):
            fdsm_pvalues(table1_graph, trials=0)
        with pytest.raises(ValueError):
            fdsm_pvalues(table1_graph, trials=10, workers=0)


class TestRequiredTrials:
    def test_best_case_golden_value(self):
        alpha_star = (0.05 / 4950) / 2
        n = required_trials(0.0, alpha_star, 0.05, 0.05)
        assert n == pytest.approx(733_695, rel=1e-3)

    def test_ambiguous_case_golden_value(self):
        alpha_star = (0.05 / 4950) / 2
        n = required_trials(0.75 * alpha_star, alpha_star, 0.05, 0.05)
        assert n == pytest.approx(30_637_088, rel=1e-3)

    def test_wide_gap_needs_few_trials(self):
        # independent direct evaluation of the formula
        from scipy.stats import norm

        z = norm.isf(0.05)
        p, a = 0.5, 0.01
        n_expected = np.ceil(
            ((z * np.sqrt(a * (1 - a)) + z * np.sqrt(p * (1 - p))) / (p - a)) ** 2
        )
        n = required_trials(p, a, 0.05, 0.05)
        assert n == n_expected + np.ceil(1 / abs(p - a))
        assert n <= n_expected + 3

    def test_equal_p_and_threshold_is_undecidable(self):
        with pytest.raises(UndecidableEdgeError):
            required_trials(0.01, 0.01, 0.05, 0.05)

    def test_validates_rates(self):
        with pytest.raises(ValueError):
            required_trials(0.0, 0.0, 0.05, 0.05)
        with pytest.raises(ValueError):
            required_trials(0.0, 0.5, 0.0, 0.05)
