"""Roll-call voting similarity networks and community dynamics."""

from .dataset import (
    IngestError,
    VoteDataset,
    VoteOption,
    VoteRecord,
    adapt_camara,
    adapt_propublica,
    filter_low_attendance,
    parse_canonical,
)
from .discipline import (
    DisciplineReport,
    UndefinedDisciplineError,
    group_discipline,
    majority_option,
    partisan_discipline,
)
from .netbuild import (
    GraphStats,
    SimilarityGraph,
    build_graph,
    graph_stats,
    percentile_filter,
    weight_distribution,
)
from .community import Partition, best_partition, community_assignment, louvain, modularity_score
from .tiestrength import (
    SweepCurve,
    TieClassification,
    classify_ties,
    neighborhood_overlap,
    select_threshold,
    strong_tie_subgraph,
    threshold_sweep,
)
from .temporal import FlowTable, WindowPair, WindowPartition, flow_table, nmi, persistence

__version__ = "0.1.0"

__all__ = [
    "IngestError", "VoteDataset", "VoteOption", "VoteRecord",
    "adapt_camara", "adapt_propublica", "filter_low_attendance", "parse_canonical",
    "DisciplineReport", "UndefinedDisciplineError",
    "group_discipline", "majority_option", "partisan_discipline",
    "GraphStats", "SimilarityGraph", "build_graph", "graph_stats",
    "percentile_filter", "weight_distribution",
    "Partition", "best_partition", "community_assignment", "louvain", "modularity_score",
    "SweepCurve", "TieClassification", "classify_ties", "neighborhood_overlap",
    "select_threshold", "strong_tie_subgraph", "threshold_sweep",
    "FlowTable", "WindowPair", "WindowPartition", "flow_table", "nmi", "persistence",
]
