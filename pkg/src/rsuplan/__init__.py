"""Top‑level package for *rsuplan*.

Mines vehicle trajectories for mobility patterns, turns them into road-side
unit placements (pattern covers, budgeted ranking, utility-weighted covers)
and replays trajectories against a placement to measure coverage.
"""

from importlib import metadata as _metadata
from logging import getLogger

from .coverage import (
    Hypergraph,
    PlacementPlan,
    Transversal,
    build_hypergraph,
    load_plan,
    minimal_transversals,
    select_cover,
    spacov,
    spacov_plus,
)
from .errors import RsuPlanError
from .evaluator import (
    CoverageReport,
    RoadMap,
    SimConfig,
    compare,
    load_map,
    shortest_path_matrix,
    simulate,
    sweep,
)
from .hespic import (
    DistanceMatrix,
    ScoreWeights,
    crossing_probability,
    greedy_longest_path,
    hbcc,
    hespic_top_k,
    junction_weights,
    load_distance_matrix,
    log_crossing_probability,
    rank_junctions,
    sort_by_probability,
    sort_by_weight,
    weight_digest,
)
from .mining import (
    MinSup,
    Pattern,
    PatternKind,
    PatternSet,
    amp,
    maximal_frequent,
    mine_frequent,
    mine_patterns,
    mine_rare,
    minimal_rare,
    prune_amp,
)
from .mip import (
    benefit,
    density,
    mip_placement,
    mipa,
    ratio,
    sequence_utility,
    trajectory_utilities,
)
from .strategies import StrategySpec, build_plan
from .trajectory_db import (
    SequentialDatabase,
    SupportValue,
    Trajectory,
    is_ordered_subsequence,
    load_trajectories,
    support,
)

__all__ = [
    "CoverageReport",
    "DistanceMatrix",
    "Hypergraph",
    "MinSup",
    "Pattern",
    "PatternKind",
    "PatternSet",
    "PlacementPlan",
    "RoadMap",
    "RsuPlanError",
    "ScoreWeights",
    "SequentialDatabase",
    "SimConfig",
    "StrategySpec",
    "SupportValue",
    "Trajectory",
    "Transversal",
    "amp",
    "benefit",
    "build_hypergraph",
    "build_plan",
    "compare",
    "crossing_probability",
    "density",
    "greedy_longest_path",
    "hbcc",
    "hespic_top_k",
    "is_ordered_subsequence",
    "junction_weights",
    "load_distance_matrix",
    "load_map",
    "load_plan",
    "load_trajectories",
    "log_crossing_probability",
    "maximal_frequent",
    "mine_frequent",
    "mine_patterns",
    "mine_rare",
    "minimal_rare",
    "minimal_transversals",
    "mip_placement",
    "mipa",
    "prune_amp",
    "rank_junctions",
    "ratio",
    "select_cover",
    "sequence_utility",
    "shortest_path_matrix",
    "simulate",
    "sort_by_probability",
    "sort_by_weight",
    "spacov",
    "spacov_plus",
    "support",
    "sweep",
    "trajectory_utilities",
    "weight_digest",
]

try:
    __version__ = _metadata.version(__name__)
except _metadata.PackageNotFoundError:  # local, editable install
    __version__ = "0.1.0"

logger = getLogger(__name__)
