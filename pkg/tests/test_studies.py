import numpy as np
import pytest

from spine.bigraph import Backbone
from spine.studies import (
    StudyConfig,
    modularity,
    run_study,
    run_study2,
    study1_ensembles,
)


def backbone_from_pairs(m, pairs):
    edges = np.zeros((m, m), dtype=np.uint8)
    for i, j in pairs:
        edges[i, j] = edges[j, i] = 1
    pv = np.ones((m, m))
    return Backbone(edges=edges, pvalues_upper=pv, pvalues_lower=pv, model_tag="test")


class TestModularity:
    def test_two_disjoint_cliques(self):
        pairs = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
        b = backbone_from_pairs(6, pairs)
        groups = [0, 0, 0, 1, 1, 1]
        assert modularity(b, groups) == pytest.approx(0.5)

    def test_all_edges_between_groups(self):
        pairs = [(0, 2), (0, 3), (1, 2), (1, 3)]
        b = backbone_from_pairs(4, pairs)
        assert modularity(b, [0, 0, 1, 1]) == pytest.approx(-0.5)

    def test_random_graph_near_zero(self):
        rng = np.random.default_rng(12)
        m = 60
        pairs = [(i, j) for i in range(m) for j in range(i + 1, m) if rng.random() < 0.2]
        b = backbone_from_pairs(m, pairs)
        groups = rng.integers(0, 2, size=m)
        assert abs(modularity(b, groups)) < 0.05

    def test_empty_backbone_is_undefined(self):
        b = backbone_from_pairs(4, [])
        assert np.isnan(modularity(b, [0, 0, 1, 1]))

    def test_label_length_checked(self):
        b = backbone_from_pairs(4, [(0, 1)])
        with pytest.raises(ValueError):
            modularity(b, [0, 1])

    def test_string_labels_accepted(self):
        pairs = [(0, 1), (2, 3)]
        b = backbone_from_pairs(4, pairs)
        assert modularity(b, ["A", "A", "B", "B"]) == pytest.approx(0.5)


class TestStudy1Suite:
    def test_suite_is_deterministic_and_in_range(self):
        suite = study1_ensembles()
        assert suite == study1_ensembles()
        assert len(suite) == 662
        lengths = {len(r) for r, _ in suite} | {len(c) for _, c in suite}
        assert lengths <= {2, 3, 4, 5}

    def test_suite_has_no_transpose_duplicates(self):
        suite = set(study1_ensembles())
        for r, c in suite:
            if (c, r) != (r, c):
                assert (c, r) not in suite

    def test_table1_margins_included(self):
        assert ((2, 1, 1), (2, 1, 1)) in set(study1_ensembles())


class TestRunners:
    def test_study2_deterministic_across_runs_and_workers(self):
        cfg1 = StudyConfig(preset="desk", seed=77, replicates=2, trials=60, workers=1)
        cfg2 = StudyConfig(preset="desk", seed=77, replicates=2, trials=60, workers=2)
        r1 = run_study2(cfg1)
        r2 = run_study2(cfg2)
        assert r1.rows == r2.rows

    def test_study2_rows_carry_condition_tuple(self):
        res = run_study2(StudyConfig(seed=3, replicates=1, trials=40))
        curve = res.table("jaccard_curve")
        assert len(curve) == 291
        assert all({"replicate", "alpha", "metric", "value"} <= set(r) for r in curve)
        assert not res.table("errors")

    def test_unknown_study_id(self):
        with pytest.raises(ValueError):
            run_study(5, StudyConfig())

    def test_write_csvs(self, tmp_path):
        res = run_study2(StudyConfig(seed=3, replicates=1, trials=40))
        written = res.write_csvs(tmp_path)
        names = {p.name for p in written}
        assert "study2_jaccard_curve.csv" in names
        assert "study2_jaccard_curve_mean.csv" in names
        assert "study2_optimum.csv" in names
        assert "study2_manifest.json" in names
        header = (tmp_path / "study2_optimum.csv").read_text().splitlines()[0]
        assert "best_alpha" in header and "best_jaccard" in header

    def test_study2_percentile_band(self):
        res = run_study2(StudyConfig(seed=3, replicates=2, trials=40))
        band = res.table("jaccard_curve_mean")
        assert len(band) == 291
        for row in band:
            assert row["p10"] <= row["mean"] <= row["p90"]


class TestConfigDefaults:
    def test_preset_replicates(self):
        desk = StudyConfig(preset="desk")
        paper = StudyConfig(preset="paper")
        assert desk.n_replicates(2) == 10 and paper.n_replicates(2) == 100
        assert desk.n_replicates(3) == 10 and paper.n_replicates(3) == 100
        assert desk.n_replicates(4) == 3 and paper.n_replicates(4) == 10

    def test_override(self):
        assert StudyConfig(replicates=5).n_replicates(3) == 5

    def test_validation(self):
        with pytest.raises(ValueError):
            StudyConfig(preset="huge")
        with pytest.raises(ValueError):
            StudyConfig(replicates=0)
