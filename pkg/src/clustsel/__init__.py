"""Clustering-based subset selection for multiobjective point sets."""

from .bench import BenchConfig, ResultRow, emit_results_csv, emit_scatter_plot, rank_table, read_results_csv, run_experiment
from .clustering import (
    KMeansResult,
    LinkageKind,
    MedoidResult,
    hierarchical,
    kmeans,
    kmeanspp_init,
    kmedoids,
    linkage_merges,
    merge_distance,
)
from .core import RngStream, make_rng, nondominated_filter, nondominated_mask, read_points_csv, write_points_csv
from .estimators import (
    GreedyIGDSelector,
    HierarchicalSelector,
    KMeansPlusPlusSelector,
    KMedoidsSelector,
    KneeKMedoidsSelector,
    SubsetSelector,
)
from .fronts import FrontSpec, candidate_sets, knee_parameters, sample_front
from .metrics import clustering_objective, euclidean, igd, igd_contribution, igd_plus_similarity, nearest_assignment
from .selection import (
    AlgoKind,
    greedy_igd_inclusion,
    greedy_igd_removal,
    knee_kmedoids,
    lazy_greedy_igd_inclusion,
    representative_strategy1,
    representative_strategy2,
    select,
    subset_from_clusters,
)
from .stats import wilcoxon_rank_sum

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
