"""Statistics estimation, sampling, and caching."""

from .collect import StatsCache, StatsConfig, collect_stats
from .estimator import (
    EQUALITY_SELECTIVITY,
    RANGE_SELECTIVITY,
    column_provenance,
    estimate_cardinality,
    predicate_selectivity,
)
from .sampling import feature_args_of, matrix_stats, sample_ml_stats
from .vector import ALL_STAT_NAMES, ML_STAT_NAMES, NODE_STAT_NAMES, StatEntry, StatsVector

__all__ = [
    "ALL_STAT_NAMES",
    "EQUALITY_SELECTIVITY",
    "ML_STAT_NAMES",
    "NODE_STAT_NAMES",
    "RANGE_SELECTIVITY",
    "StatEntry",
    "StatsCache",
    "StatsConfig",
    "StatsVector",
    "collect_stats",
    "column_provenance",
    "estimate_cardinality",
    "feature_args_of",
    "matrix_stats",
    "predicate_selectivity",
    "sample_ml_stats",
]
