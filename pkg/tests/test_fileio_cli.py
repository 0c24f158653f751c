import json

import numpy as np
import pytest
from click.testing import CliRunner

from spine.bigraph import BipartiteGraph
from spine.cli import main
from spine.errors import DuplicateEdgeWarning, ParseError
from spine.fileio import (
    GraphFile,
    read_dense,
    read_edgelist,
    read_graph,
    write_dense,
    write_edgelist,
)


@pytest.fixture
def labeled_graph():
    cells = np.array([[1, 0, 1], [0, 1, 0], [0, 0, 0]], dtype=np.uint8)
    return GraphFile(BipartiteGraph(cells), ["alice", "bob", "carol"], ["x", "y", "z"])


class TestEdgeList:
    def test_round_trip_preserves_ids_and_isolates(self, tmp_path, labeled_graph):
        path = tmp_path / "g.edges"
        write_edgelist(labeled_graph, path)
        back = read_edgelist(path)
        assert back.agent_ids == labeled_graph.agent_ids
        assert back.artifact_ids == labeled_graph.artifact_ids
        assert back.graph == labeled_graph.graph

    def test_first_appearance_order_without_sidecar(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("s2,t9\ns1,t9\ns2,t1\n")
        gf = read_edgelist(path)
        assert gf.agent_ids == ["s2", "s1"]
        assert gf.artifact_ids == ["t9", "t1"]
        assert gf.graph.cells.tolist() == [[1, 1], [1, 0]]

    def test_header_recognized(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("agent_id,artifact_id\na,b\n")
        gf = read_edgelist(path)
        assert gf.agent_ids == ["a"] and gf.artifact_ids == ["b"]

    def test_duplicates_collapse_with_warning(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("a,t\na,t\nb,t\n")
        with pytest.warns(DuplicateEdgeWarning):
            gf = read_edgelist(path)
        assert gf.graph.fill == 2

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("a,t\nbroken-line\n")
        with pytest.raises(ParseError) as err:
            read_edgelist(path)
        assert err.value.line == 2


class TestDense:
    def test_round_trip(self, tmp_path, labeled_graph):
        path = tmp_path / "g.csv"
        write_dense(labeled_graph, path)
        back = read_dense(path)
        assert back.agent_ids == labeled_graph.agent_ids
        assert back.artifact_ids == labeled_graph.artifact_ids
        assert back.graph == labeled_graph.graph

    def test_rejects_non_binary_cell(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text(",x,y\na,1,2\n")
        with pytest.raises(ParseError) as err:
            read_dense(path)
        assert err.value.line == 2

    def test_rejects_ragged_rows(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text(",x,y\na,1\n")
        with pytest.raises(ParseError):
            read_dense(path)

    def test_format_detection(self, tmp_path, labeled_graph):
        dense = tmp_path / "g.csv"
        write_dense(labeled_graph, dense)
        assert read_graph(dense).graph == labeled_graph.graph
        edges = tmp_path / "g.edges"
        write_edgelist(labeled_graph, edges)
        assert read_graph(edges).graph == labeled_graph.graph


class TestCliBackbone:
    def setup_method(self):
        self.runner = CliRunner()

    def write_table1(self, tmp_path):
        path = tmp_path / "t1.edges"
        path.write_text("agent_id,artifact_id\nr1,c1\nr2,c3\nr3,c2\nr3,c3\n")
        return path

    def test_frm_matches_library(self, tmp_path, table1_graph):
        from spine.extract import TestConfig, extract_backbone

        path = self.write_table1(tmp_path)
        out = tmp_path / "bb"
        result = self.runner.invoke(
            main, ["backbone", str(path), "--model", "frm", "--alpha", "0.05", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        expected = extract_backbone(table1_graph, TestConfig(model="frm", alpha=0.05))
        lines = (tmp_path / "bb.pvalues.csv").read_text().splitlines()[1:]
        assert len(lines) == 3
        for line in lines:
            a, b, w, pu, pl, kept = line.split(",")
            i, j = int(a[1:]) - 1, int(b[1:]) - 1
            assert float(pu) == pytest.approx(expected.pvalues_upper[i, j], rel=1e-9)
            assert int(kept) == expected.edges[i, j]

    def test_fdsm_deterministic_bytes(self, tmp_path):
        path = self.write_table1(tmp_path)
        outputs = []
        for tag in ("one", "two"):
            out = tmp_path / tag
            result = self.runner.invoke(
                main,
                ["backbone", str(path), "--model", "fdsm", "--trials", "200",
                 "--seed", "7", "-o", str(out)],
            )
            assert result.exit_code == 0, result.output
            outputs.append((tmp_path / f"{tag}.pvalues.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_recommended_sdsm_configuration(self, tmp_path):
        path = self.write_table1(tmp_path)
        result = self.runner.invoke(
            main,
            ["backbone", str(path), "--model", "sdsm", "--sdsm-method", "bicm",
             "--alpha", "0.13", "-o", str(tmp_path / "s")],
        )
        assert result.exit_code == 0, result.output
        assert "sdsm(bicm)" in result.output

    def test_parse_error_exit_2(self, tmp_path):
        bad = tmp_path / "bad.edges"
        bad.write_text("a,t\nnot-a-pair\n")
        result = self.runner.invoke(
            main, ["backbone", str(bad), "--model", "ffm", "-o", str(tmp_path / "x")]
        )
        assert result.exit_code == 2
        assert "2" in result.output  # names the offending line

    def test_model_failure_exit_3(self, tmp_path):
        # logistic estimator needs a non-constant response; a full matrix breaks it
        full = tmp_path / "full.edges"
        full.write_text("a,x\na,y\nb,x\nb,y\n")
        result = self.runner.invoke(
            main,
            ["backbone", str(full), "--model", "sdsm", "--sdsm-method", "logit",
             "-o", str(tmp_path / "x")],
        )
        assert result.exit_code == 3


class TestCliSynth:
    def setup_method(self):
        self.runner = CliRunner()

    def test_manifest_density(self, tmp_path):
        out = tmp_path / "g.edges"
        result = self.runner.invoke(
            main,
            ["synth", "--agents", "30", "--artifacts", "40", "--density", "0.2",
             "--agent-shape", "constant", "--artifact-shape", "constant",
             "--seed", "3", "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        manifest = json.loads((tmp_path / "g.edges.manifest.json").read_text())
        assert abs(manifest["realized_density"] - 0.2) <= 0.02

    def test_planted_w_manifest(self, tmp_path):
        out = tmp_path / "g.edges"
        result = self.runner.invoke(
            main,
            ["synth", "--agents", "100", "--artifacts", "200", "--density", "0.1",
             "--agent-shape", "right", "--artifact-shape", "right",
             "--planted-w", "0.8", "--seed", "3", "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        manifest = json.loads((tmp_path / "g.edges.manifest.json").read_text())
        assert manifest["realized_w"] == pytest.approx(0.8, abs=0.01)

    def test_deterministic_bytes(self, tmp_path):
        args = ["synth", "--agents", "20", "--artifacts", "20", "--density", "0.3",
                "--seed", "11"]
        blobs = []
        for tag in ("a", "b"):
            out = tmp_path / f"{tag}.edges"
            result = self.runner.invoke(main, args + ["-o", str(out)])
            assert result.exit_code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]

    def test_generation_failure_exit_4(self, tmp_path):
        result = self.runner.invoke(
            main,
            ["synth", "--agents", "3", "--artifacts", "3", "--density", "0.001",
             "-o", str(tmp_path / "g.edges")],
        )
        assert result.exit_code == 4


class TestCliStudy:
    def setup_method(self):
        self.runner = CliRunner()

    def test_study_two_writes_tables(self, tmp_path):
        result = self.runner.invoke(
            main,
            ["study", "--id", "2", "--preset", "desk", "--replicates", "1",
             "--trials", "40", "--seed", "5", "--threads", "1",
             "-o", str(tmp_path / "out")],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "out" / "study2_jaccard_curve.csv").exists()
        assert (tmp_path / "out" / "study2_manifest.json").exists()

    def test_unknown_id_exit_2(self, tmp_path):
        result = self.runner.invoke(main, ["study", "--id", "9", "-o", str(tmp_path)])
        assert result.exit_code == 2

    def test_env_threads_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPINE_THREADS", "1")
        result = self.runner.invoke(
            main,
            ["study", "--id", "2", "--replicates", "1", "--trials", "30",
             "--seed", "5", "-o", str(tmp_path / "out")],
        )
        assert result.exit_code == 0, result.output
