"""Order-aware frequency-based co-clustering of semantic trajectories."""

from ._core import (
    CoCluster,
    Dataset,
    InputError,
    MineResult,
    MinerConfig,
    Relevance,
    ResultReport,
    StatMetric,
    alluvial_csv,
    coclusters_document,
    cost,
    generate_corpus,
    intern_corpus,
    load_corpus,
    max_overlap,
    mine,
    prune,
    report,
    support,
)

__all__ = [
    "CoCluster",
    "Dataset",
    "InputError",
    "MineResult",
    "MinerConfig",
    "Relevance",
    "ResultReport",
    "StatMetric",
    "alluvial_csv",
    "coclusters_document",
    "cost",
    "generate_corpus",
    "intern_corpus",
    "load_corpus",
    "max_overlap",
    "mine",
    "prune",
    "report",
    "support",
]
__version__ = "0.1.0"
