"""Statistical backbones of bipartite projections under null-model ensembles.

Extracts the significant co-occurrence edges between agents that share
artifacts, judged against five null models: fixed fill, fixed row sums,
fixed column sums, stochastic (soft) degree sequences, and exact degree
sequences via Monte-Carlo resampling.
"""

from .bigraph import Backbone, BipartiteGraph, Projection, density, jaccard, project
from .cellprob import CellProbMatrix, accuracy, bicm, logit, lpm, rcf
from .extract import (
    TestConfig,
    backbone_from_pvalues,
    correct,
    edge_pvalues,
    extract_backbone,
    fwer,
)
from .fdsm import (
    CurveballSampler,
    McPvalues,
    curveball_step,
    fdsm_pvalues,
    required_trials,
    sample,
)
from .oracle import EnsembleEnumeration, enumerate_fdsm, exact_edge_pmf
from .pmf import (
    Pmf,
    fcm_pmf,
    ffm_pmf,
    frm_pmf,
    lower_tail,
    poisson_binomial,
    sdsm_pmf,
    upper_tail,
)
from .studies import (
    StudyConfig,
    StudyResult,
    modularity,
    run_study,
    run_study1,
    run_study2,
    run_study3,
    run_study4,
)
from .synth import DegreeShape, PlantedPartition, generate, plant_blocks, within_fraction

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core types and operations
    "BipartiteGraph",
    "Projection",
    "Backbone",
    "project",
    "density",
    "jaccard",
    # edge-weight null distributions
    "Pmf",
    "ffm_pmf",
    "frm_pmf",
    "poisson_binomial",
    "fcm_pmf",
    "sdsm_pmf",
    "upper_tail",
    "lower_tail",
    # cell-probability estimators
    "CellProbMatrix",
    "rcf",
    "lpm",
    "logit",
    "bicm",
    "accuracy",
    # exact enumeration
    "EnsembleEnumeration",
    "enumerate_fdsm",
    "exact_edge_pmf",
    # Monte-Carlo machinery
    "CurveballSampler",
    "McPvalues",
    "curveball_step",
    "sample",
    "fdsm_pvalues",
    "required_trials",
    # backbone extraction
    "TestConfig",
    "extract_backbone",
    "edge_pvalues",
    "backbone_from_pvalues",
    "fwer",
    "correct",
    # synthetic data
    "DegreeShape",
    "PlantedPartition",
    "generate",
    "plant_blocks",
    "within_fraction",
    # studies
    "StudyConfig",
    "StudyResult",
    "modularity",
    "run_study",
    "run_study1",
    "run_study2",
    "run_study3",
    "run_study4",
]
