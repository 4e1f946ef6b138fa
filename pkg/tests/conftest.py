import numpy as np
import pytest

from optbench.actions.registry import ActionRegistry
from optbench.engine.table import Catalog, Table
from optbench.ir.schema import FLOAT64, INT64, Schema, vector
from optbench.suite.gen import generate_catalog
from optbench.suite.queries import build_query

TEST_SCALE = 0.25  # desk-scale catalogs for per-action equivalence tests


@pytest.fixture(scope="session")
def actions():
    return ActionRegistry()


@pytest.fixture(scope="session")
def small_catalogs():
    """Scaled-down per-query catalogs shared across the session."""
    cache = {}

    def get(qid: str, scale: float = TEST_SCALE) -> Catalog:
        key = (qid, scale)
        if key not in cache:
            cache[key] = generate_catalog(qid, scale=scale)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def suite_plans():
    return {qid: build_query(qid) for qid in (
        "Q_Expedia", "Q_Flights", "Q_Credit", "Q_UC01", "Q_UC03",
        "Q_UC04", "Q_UC08", "Q_UC10", "Q_IDNet1", "Q_IDNet2",
    )}


@pytest.fixture()
def tiny_catalog():
    """Three-table catalog for focused operator tests."""
    rng = np.random.default_rng(42)
    cat = Catalog()
    base = Schema((("tid", INT64), ("grp", INT64), ("amount", FLOAT64), ("xv", vector(6))))
    xs = rng.random((200, 6)) * (rng.random((200, 6)) < 0.15)
    cat.add_table(Table("base", base, {
        "tid": np.arange(200, dtype=np.int64),
        "grp": rng.integers(0, 10, 200),
        "amount": np.round(rng.uniform(0, 100, 200), 3),
        "xv": xs,
    }))
    dim = Schema((("did", INT64), ("grp2", INT64), ("weight", FLOAT64)))
    cat.add_table(Table("dim", dim, {
        "did": np.arange(30, dtype=np.int64),
        "grp2": rng.integers(0, 10, 30),
        "weight": np.round(rng.uniform(1, 2, 30), 3),
    }))
    return cat
