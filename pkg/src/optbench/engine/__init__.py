"""In-memory columnar execution engine."""

from .compare import EquivalenceReport, compare_results
from .executor import DEFAULT_BATCH_SIZE, ExecStats, Executor, ResultSet, execute, reservoir_indices
from .table import Catalog, Table

__all__ = [
    "Catalog",
    "DEFAULT_BATCH_SIZE",
    "EquivalenceReport",
    "ExecStats",
    "Executor",
    "ResultSet",
    "Table",
    "compare_results",
    "execute",
    "reservoir_indices",
]
