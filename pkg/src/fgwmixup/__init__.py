"""Fused Gromov-Wasserstein graph mixup and augmentation toolkit."""

from .augment import (
    AugmentConfig,
    FGWMixupAugmenter,
    SoftLabeledGraph,
    augment_dataset,
    choose_size,
    discretize_adjacency,
    mix_labels,
    sample_lambda,
)
from .barycenter import (
    MixupProblem,
    MixupResult,
    solve_mixup,
    update_features,
    update_structure,
)
from .bench import InfeasibilityReport, TimingReport, run_infeasibility, run_timing
from .data import Dataset, load_tudataset, save_dataset
from .graphs import (
    Graph,
    build_graph,
    degree_feature_augmentation,
    degree_measure,
    feature_distance_matrix,
    remove_isolated_nodes,
    uniform_measure,
)
from .solver import (
    Coupling,
    FgwConfig,
    SolveTrace,
    fgw_gradient,
    fgw_objective,
    fgw_value,
    gw_distance,
    project_to_polytope,
    solve_fgw_relaxed,
    solve_fgw_strict,
    wasserstein_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "Coupling",
    "Dataset",
    "FGWMixupAugmenter",
    "FgwConfig",
    "Graph",
    "InfeasibilityReport",
    "MixupProblem",
    "MixupResult",
    "SoftLabeledGraph",
    "SolveTrace",
    "TimingReport",
    "augment_dataset",
    "build_graph",
    "choose_size",
    "degree_feature_augmentation",
    "degree_measure",
    "discretize_adjacency",
    "feature_distance_matrix",
    "fgw_gradient",
    "fgw_objective",
    "fgw_value",
    "gw_distance",
    "load_tudataset",
    "mix_labels",
    "project_to_polytope",
    "remove_isolated_nodes",
    "run_infeasibility",
    "run_timing",
    "sample_lambda",
    "save_dataset",
    "solve_fgw_relaxed",
    "solve_fgw_strict",
    "solve_mixup",
    "uniform_measure",
    "update_features",
    "update_structure",
    "wasserstein_distance",
]
