"""Reading and writing bipartite graphs as edge lists or dense 0/1 CSVs.

Two interchange formats:

* edge list: one ``agent_id,artifact_id`` pair per line (optional
  ``agent_id,artifact_id`` header); ids are arbitrary strings mapped to
  dense indices in first-appearance order.  A JSON sidecar
  (``<file>.ids.json``) records the full id lists so isolated nodes and
  id order survive a round trip.
* dense matrix: CSV of 0/1 cells, first row artifact ids, first column
  agent ids.

Format is auto-detected from the extension (``.csv`` means dense) unless
overridden.
"""

from __future__ import annotations

import csv
import json
import warnings
from pathlib import Path

import numpy as np

from .bigraph import BipartiteGraph
from .errors import DuplicateEdgeWarning, ParseError

__all__ = [
    "GraphFile",
    "read_graph",
    "write_graph",
    "read_edgelist",
    "write_edgelist",
    "read_dense",
    "write_dense",
    "detect_format",
]

_EDGELIST_HEADERS = {("agent_id", "artifact_id"), ("agent", "artifact")}


class GraphFile:
    """A graph together with its agent/artifact id labels."""

    def __init__(self, graph: BipartiteGraph, agent_ids: list[str], artifact_ids: list[str]):
        if len(agent_ids) != graph.m or len(artifact_ids) != graph.n:
            raise ValueError("id lists must match the graph dimensions")
        self.graph = graph
        self.agent_ids = list(agent_ids)
        self.artifact_ids = list(artifact_ids)

    @classmethod
    def unlabeled(cls, graph: BipartiteGraph) -> "GraphFile":
        agents = [f"a{i}" for i in range(graph.m)]
        artifacts = [f"t{k}" for k in range(graph.n)]
        return cls(graph, agents, artifacts)


def detect_format(path, override: str | None = None) -> str:
    """'dense' for .csv files, 'edgelist' otherwise, unless overridden."""
    if override and override != "auto":
        if override not in ("edgelist", "dense"):
            raise ValueError(f"unknown format {override!r}; use 'edgelist' or 'dense'")
        return override
    return "dense" if Path(path).suffix.lower() == ".csv" else "edgelist"


def read_graph(path, fmt: str = "auto") -> GraphFile:
    fmt = detect_format(path, fmt)
    return read_dense(path) if fmt == "dense" else read_edgelist(path)


def write_graph(gf: GraphFile, path, fmt: str = "auto") -> None:
    fmt = detect_format(path, fmt)
    if fmt == "dense":
        write_dense(gf, path)
    else:
        write_edgelist(gf, path)


def _sidecar_path(path) -> Path:
    return Path(str(path) + ".ids.json")


def read_edgelist(path) -> GraphFile:
    """Parse an agent,artifact pair-per-line file.

    Duplicate pairs collapse to a single filled cell with a warning.  When
    the sidecar file is present it fixes the id order and restores
    zero-degree nodes; otherwise ids appear in first-appearance order.
    """
    path = Path(path)
    pairs: list[tuple[str, str]] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise ParseError(
                    f"{path}:{lineno}: expected 'agent_id,artifact_id', got {row!r}",
                    line=lineno,
                )
            a, t = row[0].strip(), row[1].strip()
            if lineno == 1 and (a.lower(), t.lower()) in _EDGELIST_HEADERS:
                continue
            if not a or not t:
                raise ParseError(f"{path}:{lineno}: empty id", line=lineno)
            pairs.append((a, t))

    sidecar = _sidecar_path(path)
    if sidecar.exists():
        with open(sidecar) as fh:
            ids = json.load(fh)
        agent_ids = [str(x) for x in ids["agents"]]
        artifact_ids = [str(x) for x in ids["artifacts"]]
    else:
        agent_ids = list(dict.fromkeys(a for a, _ in pairs))
        artifact_ids = list(dict.fromkeys(t for _, t in pairs))
    a_index = {a: i for i, a in enumerate(agent_ids)}
    t_index = {t: k for k, t in enumerate(artifact_ids)}
    cells = np.zeros((max(len(agent_ids), 1), max(len(artifact_ids), 1)), dtype=np.uint8)
    duplicates = 0
    for a, t in pairs:
        try:
            i, k = a_index[a], t_index[t]
        except KeyError as exc:
            raise ParseError(f"{path}: id {exc} not present in sidecar {sidecar}") from None
        if cells[i, k]:
            duplicates += 1
        cells[i, k] = 1
    if duplicates:
        warnings.warn(
            f"{path}: {duplicates} duplicate pair(s) collapsed to single cells",
            DuplicateEdgeWarning,
            stacklevel=2,
        )
    if not agent_ids or not artifact_ids:
        raise ParseError(f"{path}: no edges and no sidecar; graph shape unknown")
    return GraphFile(BipartiteGraph(cells), agent_ids, artifact_ids)


def write_edgelist(gf: GraphFile, path) -> None:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["agent_id", "artifact_id"])
        rows, cols = np.nonzero(gf.graph.cells)
        for i, k in zip(rows, cols):
            writer.writerow([gf.agent_ids[i], gf.artifact_ids[k]])
    with open(_sidecar_path(path), "w") as fh:
        json.dump({"agents": gf.agent_ids, "artifacts": gf.artifact_ids}, fh, indent=0)
        fh.write("\n")


def read_dense(path) -> GraphFile:
    """Parse a dense 0/1 CSV with artifact ids in the header row."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file", line=1) from None
        artifact_ids = [h.strip() for h in header[1:]]
        if not artifact_ids:
            raise ParseError(f"{path}:1: header must name at least one artifact", line=1)
        agent_ids: list[str] = []
        data: list[list[int]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(artifact_ids) + 1:
                raise ParseError(
                    f"{path}:{lineno}: expected {len(artifact_ids) + 1} columns, got {len(row)}",
                    line=lineno,
                )
            agent_ids.append(row[0].strip())
            values = []
            for col, cell in enumerate(row[1:], start=2):
                cell = cell.strip()
                if cell not in ("0", "1"):
                    raise ParseError(
                        f"{path}:{lineno}: cell in column {col} must be 0 or 1, got {cell!r}",
                        line=lineno,
                    )
                values.append(int(cell))
            data.append(values)
    if not data:
        raise ParseError(f"{path}: no agent rows", line=2)
    return GraphFile(BipartiteGraph(np.array(data, dtype=np.uint8)), agent_ids, artifact_ids)


def write_dense(gf: GraphFile, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([""] + gf.artifact_ids)
        for i, agent in enumerate(gf.agent_ids):
            writer.writerow([agent] + gf.graph.cells[i].tolist())
