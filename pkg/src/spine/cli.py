"""Command-line interface: backbone extraction, synthetic data, study sweeps.

Exit codes: 0 success, 2 input parse/usage error, 3 model failure,
4 generation failure.  All commands take ``--seed`` and are fully
deterministic given it; ``--threads`` (or the SPINE_THREADS environment
variable) caps parallel workers without changing any result.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, kernels
from .bigraph import density, project
from .errors import ParseError, SpineError
from .extract import CORRECTIONS, MODELS, SDSM_METHODS, TestConfig, extract_backbone
from .fileio import GraphFile, read_graph, write_edgelist
from .studies import StudyConfig, run_study
from .synth import PlantedPartition, generate, plant_blocks, within_fraction

EXIT_PARSE = 2
EXIT_MODEL = 3
EXIT_GENERATE = 4


def _threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("SPINE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise click.UsageError(f"SPINE_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


@click.group()
@click.version_option(__version__)
def main():
    """Statistical backbones of bipartite projections."""


@main.command()
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", type=click.Choice(MODELS), required=True, help="Null ensemble to test against.")
@click.option("--alpha", type=float, default=0.05, show_default=True, help="Significance level.")
@click.option("--tails", type=click.Choice(["1", "2"]), default="2", show_default=True)
@click.option("--correction", type=click.Choice(CORRECTIONS), default="none", show_default=True)
@click.option(
    "--sdsm-method",
    type=click.Choice(sorted(SDSM_METHODS)),
    default="bicm",
    show_default=True,
    help="Cell-probability estimator for the sdsm model.",
)
@click.option("--trials", type=int, default=1000, show_default=True, help="Monte-Carlo trials for the fdsm model.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=None, help="Worker cap (default: all cores, or SPINE_THREADS).")
@click.option("--format", "fmt", type=click.Choice(["auto", "edgelist", "dense"]), default="auto", show_default=True)
@click.option("--output", "-o", required=True, type=click.Path(), help="Output prefix.")
def backbone(input_path, model, alpha, tails, correction, sdsm_method, trials, seed, threads, fmt, output):
    """Extract a backbone from INPUT_PATH and write it next to its p-values.

    Writes <output>.edges (retained edges as an edge list) and
    <output>.pvalues.csv (per-pair weights and both tail p-values).
    """
    try:
        gf = read_graph(input_path, fmt)
    except ParseError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    try:
        cfg = TestConfig(
            model=model,
            alpha=alpha,
            tails=int(tails),
            correction=correction,
            sdsm_method=sdsm_method,
            trials=trials,
            seed=seed,
            workers=_threads(threads),
        )
        bb = extract_backbone(gf.graph, cfg)
    except (SpineError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_MODEL)

    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_backbone_edges(bb, gf, Path(f"{out}.edges"))
    _write_pvalues(bb, gf, Path(f"{out}.pvalues.csv"))

    m = bb.m
    possible = m * (m - 1) / 2
    proj = project(gf.graph)
    iu, ju = np.triu_indices(m, k=1)
    t = int(np.count_nonzero(proj.weights[iu, ju]))
    alpha_eff = cfg.alpha_eff
    if correction == "bonferroni" and t > 0:
        alpha_eff = alpha_eff / t
    star = f"{alpha_eff:.6g}" if correction in ("none", "bonferroni") else f"adaptive ({correction})"
    click.echo(f"model:            {bb.model_tag}")
    click.echo(f"agents:           {m}")
    click.echo(f"tested pairs:     {t}")
    click.echo(f"retained edges:   {bb.edge_count}")
    click.echo(f"backbone density: {bb.edge_count / possible:.6g}")
    click.echo(f"effective alpha*: {star}")


def _write_backbone_edges(bb, gf, path: Path) -> None:
    with open(path, "w") as fh:
        fh.write("agent_i,agent_j\n")
        for i, j in bb.edge_pairs():
            fh.write(f"{gf.agent_ids[i]},{gf.agent_ids[j]}\n")


def _write_pvalues(bb, gf, path: Path) -> None:
    proj = project(gf.graph)
    iu, ju = np.triu_indices(bb.m, k=1)
    with open(path, "w") as fh:
        fh.write("agent_i,agent_j,weight,p_upper,p_lower,retained\n")
        for i, j in zip(iu, ju):
            fh.write(
                f"{gf.agent_ids[i]},{gf.agent_ids[j]},{proj.weights[i, j]},"
                f"{bb.pvalues_upper[i, j]:.10g},{bb.pvalues_lower[i, j]:.10g},"
                f"{int(bb.edges[i, j])}\n"
            )


@main.command()
@click.option("--agents", type=int, required=True)
@click.option("--artifacts", type=int, required=True)
@click.option("--density", "target_density", type=float, required=True)
@click.option("--agent-shape", default="uniform", show_default=True)
@click.option("--artifact-shape", default="uniform", show_default=True)
@click.option("--planted-w", type=float, default=None, help="Plant two-group structure with this within-group edge fraction.")
@click.option("--random-groups", is_flag=True, help="Assign planted groups by coin flips instead of balanced halves.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", required=True, type=click.Path())
def synth(agents, artifacts, target_density, agent_shape, artifact_shape, planted_w, random_groups, seed, output):
    """Generate a synthetic bipartite graph and write it as an edge list.

    A manifest JSON sidecar records the realized density, the realized
    within-group fraction when structure was planted, and the seed.
    """
    try:
        g = generate(agents, artifacts, target_density, agent_shape, artifact_shape, seed=seed)
        manifest = {
            "agents": agents,
            "artifacts": artifacts,
            "target_density": target_density,
            "agent_shape": agent_shape,
            "artifact_shape": artifact_shape,
            "seed": seed,
            "realized_density": density(g),
        }
        if planted_w is not None:
            if random_groups:
                part = PlantedPartition.random(agents, artifacts, planted_w, seed=seed)
            else:
                part = PlantedPartition.balanced(agents, artifacts, planted_w)
            g = plant_blocks(g, part, seed=seed)
            manifest["target_w"] = planted_w
            manifest["realized_w"] = within_fraction(g, part)
            manifest["agent_groups"] = part.agent_groups.tolist()
            manifest["artifact_groups"] = part.artifact_groups.tolist()
    except (SpineError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_GENERATE)
    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_edgelist(GraphFile.unlabeled(g), out)
    with open(f"{out}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    click.echo(f"wrote {out} (density {manifest['realized_density']:.6g})")


@main.command()
@click.option("--id", "study_id", type=click.Choice(["1", "2", "3", "4"]), required=True)
@click.option("--preset", type=click.Choice(["paper", "desk"]), default="desk", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--replicates", type=int, default=None, help="Override the preset's replicate count.")
@click.option("--trials", type=int, default=1000, show_default=True, help="Monte-Carlo depth for fdsm backbones.")
@click.option("--threads", type=int, default=None)
@click.option("--output-dir", "-o", required=True, type=click.Path(file_okay=False))
def study(study_id, preset, seed, replicates, trials, threads, output_dir):
    """Run one of the four comparative studies and write its CSV tables."""
    cfg = StudyConfig(
        preset=preset,
        seed=seed,
        replicates=replicates,
        trials=trials,
        workers=_threads(threads),
    )
    result = run_study(int(study_id), cfg)
    errors = result.table("errors")
    written = result.write_csvs(output_dir)
    for path in written:
        click.echo(f"wrote {path}")
    if errors:
        click.echo(f"{len(errors)} condition(s) failed; see the errors table", err=True)
        if len(errors) == len(result.rows):
            sys.exit(EXIT_MODEL)
    click.echo(f"kernel backend: {kernels.backend()}")


if __name__ == "__main__":
    main()
