"""Seeded synthetic data and model generators for the query suite.

Catalogs are fully determined by (query, seed, scale): tables, model
payloads, and the weight literals embedded in plan documents all derive
from one PCG64 stream per query. Model parameters are random at scale
1/sqrt(fan-in); predictions are deterministic, not accurate.
"""

from __future__ import annotations

import numpy as np

from ..engine.table import Catalog, Table
from ..errors import InvalidSpec
from ..ir.exprs import ForestSpec, TreeNode, TreeSpec
from ..ir.schema import FLOAT64, INT64, STRING, Schema, matrix, vector
from ..kernels.models import ModelStore

DEFAULT_SEED = 7
DEFAULT_SCALE = 1.0


def rng_for(query_id: str, seed: int, stream: str = "data") -> np.random.Generator:
    material = f"{query_id}/{stream}/{seed}".encode()
    return np.random.Generator(np.random.PCG64(list(material)))


def scaled(count: int, scale: float, minimum: int = 8) -> int:
    return max(minimum, int(count * scale))


# --- decision tree / forest construction ---

def random_tree(
    rng: np.random.Generator,
    feature_ranges: list[tuple[float, float]],
    depth: int,
    leaf_values=None,
) -> TreeSpec:
    """Random binary tree splitting on features within their value ranges."""
    nodes: list[TreeNode] = []

    def build(d: int) -> int:
        idx = len(nodes)
        if d == 0 or rng.random() < 0.15:
            value = float(rng.choice(leaf_values)) if leaf_values is not None else float(
                np.round(rng.normal(), 4))
            nodes.append(TreeNode(-1, 0.0, 0, 0, value))
            return idx
        feat = int(rng.integers(0, len(feature_ranges)))
        lo, hi = feature_ranges[feat]
        thr = float(np.round(rng.uniform(lo, hi), 4))
        nodes.append(TreeNode(feat, thr, 0, 0, 0.0))
        left = build(d - 1)
        right = build(d - 1)
        nodes[idx] = TreeNode(feat, thr, left, right, 0.0)
        return idx

    build(depth)
    return TreeSpec(tuple(nodes))


def with_prunable_root(tree: TreeSpec, feature: int, threshold: float) -> TreeSpec:
    """Prepend a split that a known filter bound makes one-sided.

    The new root sends the never-taken side to a sentinel leaf; on rows
    satisfying the bound, predictions match the original tree exactly.
    """
    shifted = [TreeNode(n.feature, n.threshold,
                        n.left + 2 if not n.is_leaf else 0,
                        n.right + 2 if not n.is_leaf else 0,
                        n.value) for n in tree.nodes]
    root = TreeNode(feature, threshold, 1, 2, 0.0)
    sentinel = TreeNode(-1, 0.0, 0, 0, -999.0)
    return TreeSpec((root, sentinel) + tuple(shifted))


def random_forest(
    rng: np.random.Generator,
    feature_ranges,
    n_trees: int,
    depth: int,
    aggregation: str,
    leaf_values=None,
) -> ForestSpec:
    trees = tuple(random_tree(rng, feature_ranges, depth, leaf_values) for _ in range(n_trees))
    return ForestSpec(trees, aggregation)


def tree_spec_to_payload(spec) -> dict:
    if isinstance(spec, TreeSpec):
        return {"kind": "tree", "nodes": [[n.feature, n.threshold, n.left, n.right, n.value] for n in spec.nodes]}
    return {
        "kind": "forest",
        "aggregation": spec.aggregation,
        "trees": [[[n.feature, n.threshold, n.left, n.right, n.value] for n in t.nodes] for t in spec.trees],
    }


def glorot(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) / np.sqrt(rows)


def weight_literal(w: np.ndarray):
    from ..ir.exprs import Literal

    return Literal(tuple(tuple(float(x) for x in row) for row in w), matrix(*w.shape))


def sparse_vectors(rng: np.random.Generator, n: int, dim: int, nnz_target: float) -> np.ndarray:
    """Feature matrix with an expected nonzero fraction of `nnz_target`."""
    values = rng.uniform(0.1, 1.0, size=(n, dim))
    mask = rng.random((n, dim)) < nnz_target
    return values * mask


# --- per-query catalogs ---

def _table(cat: Catalog, name: str, cols: list[tuple[str, object]], arrays: dict) -> None:
    schema = Schema(tuple(cols))
    cat.add_table(Table(name, schema, arrays))


EXPEDIA_FEATURES = [
    "prop_location_score1", "prop_location_score2", "prop_log_historical_price",
    "price_usd", "orig_destination_distance", "prop_review_score",
    "avg_bookings_usd", "stdev_bookings_usd", "position", "prop_country_id",
    "prop_starrating", "prop_brand_bool", "count_clicks", "count_bookings",
    "year", "month", "weekofyear", "time_of_day", "site_id",
    "visitor_location_country_id", "srch_destination_id", "srch_length_of_stay",
    "srch_booking_window", "srch_adults_count", "srch_children_count",
    "srch_room_count", "srch_saturday_night_bool", "random_bool",
]

EXPEDIA_RANGES = {
    "prop_location_score1": (0.0, 5.0),
    "prop_location_score2": (0.0, 1.0),
    "prop_log_historical_price": (3.0, 6.0),
    "price_usd": (20.0, 500.0),
    "orig_destination_distance": (0.0, 2000.0),
    "prop_review_score": (0.0, 5.0),
    "avg_bookings_usd": (0.0, 300.0),
    "stdev_bookings_usd": (0.0, 80.0),
    "position": (1.0, 40.0),
    "prop_country_id": (0.0, 40.0),
    "prop_starrating": (0.0, 5.0),
    "prop_brand_bool": (0.0, 1.0),
    "count_clicks": (0.0, 50.0),
    "count_bookings": (0.0, 20.0),
    "year": (2012.0, 2014.0),
    "month": (1.0, 12.0),
    "weekofyear": (1.0, 52.0),
    "time_of_day": (0.0, 24.0),
    "site_id": (0.0, 30.0),
    "visitor_location_country_id": (0.0, 40.0),
    "srch_destination_id": (0.0, 100.0),
    "srch_length_of_stay": (1.0, 8.0),
    "srch_booking_window": (0.0, 30.0),
    "srch_adults_count": (1.0, 4.0),
    "srch_children_count": (0.0, 3.0),
    "srch_room_count": (1.0, 3.0),
    "srch_saturday_night_bool": (0.0, 1.0),
    "random_bool": (0.0, 1.0),
}


def _expedia_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_Expedia", seed)
    n = scaled(8000, scale)
    n_hotels = scaled(800, scale, 16)
    n_searches = scaled(1000, scale, 16)
    cat = Catalog(models=_expedia_models(seed))
    cols = [("srch_id", INT64), ("prop_id", INT64)] + [(f, FLOAT64) for f in EXPEDIA_FEATURES]
    arrays = {
        "srch_id": rng.integers(0, n_searches, n),
        "prop_id": rng.integers(0, n_hotels, n),
    }
    for f in EXPEDIA_FEATURES:
        lo, hi = EXPEDIA_RANGES[f]
        arrays[f] = np.round(rng.uniform(lo, hi, n), 4)
    _table(cat, "expedia_listings", cols, arrays)
    _table(
        cat, "expedia_hotels",
        [("h_prop_id", INT64), ("h_country", INT64), ("h_cluster", INT64)],
        {
            "h_prop_id": np.arange(n_hotels, dtype=np.int64),
            "h_country": rng.integers(0, 40, n_hotels),
            "h_cluster": rng.integers(0, 8, n_hotels),
        },
    )
    _table(
        cat, "expedia_searches",
        [("s_srch_id", INT64), ("s_site", INT64)],
        {
            "s_srch_id": np.arange(n_searches, dtype=np.int64),
            "s_site": rng.integers(0, 30, n_searches),
        },
    )
    return cat


def expedia_tree(seed: int) -> TreeSpec:
    rng = rng_for("Q_Expedia", seed, "model")
    ranges = [EXPEDIA_RANGES[f] for f in EXPEDIA_FEATURES]
    tree = random_tree(rng, ranges, depth=6)
    # filter floor on prop_location_score1 (> 1) makes a 0.8 split one-sided
    return with_prunable_root(tree, EXPEDIA_FEATURES.index("prop_location_score1"), 0.8)


def _expedia_models(seed: int) -> ModelStore:
    store = ModelStore()
    store.add("expedia_tree", tree_spec_to_payload(expedia_tree(seed)))
    return store.freeze()


FLIGHTS_FEATURES = [
    "slatitude", "slongitude", "dlatitude", "dlongitude", "name1",
    "acountry_enc", "active_enc", "stimezone", "sdst_enc", "scountry_enc",
    "dtimezone", "ddst_enc", "dcountry_enc",
]

FLIGHTS_RANGES = {
    "slatitude": (-60.0, 70.0),
    "slongitude": (-180.0, 180.0),
    "dlatitude": (-60.0, 70.0),
    "dlongitude": (-180.0, 180.0),
    "name1": (0.0, 5.0),
    "acountry_enc": (0.0, 50.0),
    "active_enc": (0.0, 1.0),
    "stimezone": (-12.0, 12.0),
    "sdst_enc": (0.0, 3.0),
    "scountry_enc": (0.0, 50.0),
    "dtimezone": (-12.0, 12.0),
    "ddst_enc": (0.0, 3.0),
    "dcountry_enc": (0.0, 50.0),
}


def _flights_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_Flights", seed)
    n_routes = scaled(10000, scale)
    n_airlines = scaled(200, scale, 8)
    n_airports = scaled(400, scale, 8)
    cat = Catalog(models=_flights_models(seed))
    _table(
        cat, "flights_routes",
        [("route_id", INT64), ("airlineid", INT64), ("sairportid", INT64), ("dairportid", INT64)],
        {
            "route_id": np.arange(n_routes, dtype=np.int64),
            "airlineid": rng.integers(0, n_airlines, n_routes),
            "sairportid": rng.integers(0, n_airports, n_routes),
            "dairportid": rng.integers(0, n_airports, n_routes),
        },
    )
    tf = np.array(["t", "f"], dtype=object)
    _table(
        cat, "flights_airlines",
        [("f_airlineid", INT64), ("name1", FLOAT64), ("name2", STRING), ("name4", STRING),
         ("acountry_enc", FLOAT64), ("active_enc", FLOAT64)],
        {
            "f_airlineid": np.arange(n_airlines, dtype=np.int64),
            "name1": np.round(rng.uniform(0, 5, n_airlines), 3),
            "name2": tf[rng.integers(0, 2, n_airlines)],
            "name4": tf[rng.integers(0, 2, n_airlines)],
            "acountry_enc": np.round(rng.uniform(0, 50, n_airlines), 3),
            "active_enc": rng.integers(0, 2, n_airlines).astype(np.float64),
        },
    )
    for prefix, tname in (("s", "flights_sairports"), ("d", "flights_dairports")):
        _table(
            cat, tname,
            [(f"{prefix}_airportid", INT64), (f"{prefix}latitude", FLOAT64),
             (f"{prefix}longitude", FLOAT64), (f"{prefix}timezone", FLOAT64),
             (f"{prefix}dst_enc", FLOAT64), (f"{prefix}country_enc", FLOAT64)],
            {
                f"{prefix}_airportid": np.arange(n_airports, dtype=np.int64),
                f"{prefix}latitude": np.round(rng.uniform(-60, 70, n_airports), 3),
                f"{prefix}longitude": np.round(rng.uniform(-180, 180, n_airports), 3),
                f"{prefix}timezone": rng.integers(-12, 13, n_airports).astype(np.float64),
                f"{prefix}dst_enc": rng.integers(0, 4, n_airports).astype(np.float64),
                f"{prefix}country_enc": np.round(rng.uniform(0, 50, n_airports), 3),
            },
        )
    return cat


def flights_forest(seed: int) -> ForestSpec:
    rng = rng_for("Q_Flights", seed, "model")
    ranges = [FLIGHTS_RANGES[f] for f in FLIGHTS_FEATURES]
    forest = random_forest(rng, ranges, n_trees=8, depth=4, aggregation="majority",
                           leaf_values=[0.0, 1.0])
    # name1 filter (> 2.8) makes a 2.0 split one-sided in the first tree
    name1 = FLIGHTS_FEATURES.index("name1")
    trees = (with_prunable_root(forest.trees[0], name1, 2.0),) + forest.trees[1:]
    return ForestSpec(trees, forest.aggregation)


def _flights_models(seed: int) -> ModelStore:
    store = ModelStore()
    store.add("flights_forest", tree_spec_to_payload(flights_forest(seed)))
    return store.freeze()


CREDIT_FEATURES = [f"V{i}" for i in range(1, 29)] + ["Amount"]


def _credit_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_Credit", seed)
    n = scaled(10000, scale)
    cat = Catalog(models=_credit_models(seed))
    cols = [("Time", INT64)] + [(f, FLOAT64) for f in CREDIT_FEATURES]
    arrays = {"Time": np.cumsum(rng.integers(1, 5, n)).astype(np.int64)}
    for f in CREDIT_FEATURES[:-1]:
        arrays[f] = np.round(rng.normal(0, 1.5, n), 4)
    arrays["Amount"] = np.round(rng.uniform(1, 500, n), 2)
    _table(cat, "credit_card", cols, arrays)
    return cat


def credit_forest(seed: int) -> ForestSpec:
    rng = rng_for("Q_Credit", seed, "model")
    ranges = [(-4.0, 4.0)] * 28 + [(1.0, 500.0)]
    forest = random_forest(rng, ranges, n_trees=10, depth=4, aggregation="sum")
    # V1 filter (> 1) makes a 0.5 split one-sided in the first tree
    trees = (with_prunable_root(forest.trees[0], 0, 0.5),) + forest.trees[1:]
    return ForestSpec(trees, forest.aggregation)


def _credit_models(seed: int) -> ModelStore:
    store = ModelStore()
    store.add("credit_forest", tree_spec_to_payload(credit_forest(seed)))
    return store.freeze()


def _uc01_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_UC01", seed)
    n = scaled(30000, scale)
    n_customers = scaled(300, scale, 16)
    n_orders = scaled(3000, scale, 32)
    cat = Catalog(models=_uc01_models(seed))
    order_customer = rng.integers(0, n_customers, n_orders)
    order_year = rng.integers(2020, 2024, n_orders)
    order_of_row = rng.integers(0, n_orders, n)
    _table(
        cat, "uc01_lineitem",
        [("li_order_id", INT64), ("customer_sk", INT64), ("invoice_year", INT64),
         ("quantity", INT64), ("price", FLOAT64), ("return_quantity", INT64)],
        {
            "li_order_id": order_of_row,
            "customer_sk": order_customer[order_of_row],
            "invoice_year": order_year[order_of_row],
            "quantity": rng.integers(1, 10, n),
            "price": np.round(rng.uniform(1, 100, n), 2),
            "return_quantity": np.where(rng.random(n) < 0.15, rng.integers(1, 4, n), 0).astype(np.int64),
        },
    )
    return cat


def _uc01_models(seed: int) -> ModelStore:
    rng = rng_for("Q_UC01", seed, "model")
    store = ModelStore()
    store.add("uc01_scaler", {"kind": "scaler", "mins": [1.0, 0.0], "maxs": [20.0, 1.0]})
    store.add("uc01_kmeans", {"kind": "kmeans", "centroids": np.round(rng.random((4, 2)), 4).tolist()})
    return store.freeze()


UC03_DEPARTMENTS = [f"dept_{i:02d}" for i in range(40)]


def _uc03_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_UC03", seed)
    n_stores = 20
    n_grid = scaled(3000, scale, 64)
    cat = Catalog(models=_uc03_models(seed))
    _table(
        cat, "uc03_stores",
        [("store", INT64), ("store_size", FLOAT64)],
        {
            "store": np.arange(n_stores, dtype=np.int64),
            "store_size": np.round(rng.uniform(100, 1000, n_stores), 1),
        },
    )
    depts = np.array(UC03_DEPARTMENTS, dtype=object)
    _table(
        cat, "uc03_dept_weeks",
        [("grid_id", INT64), ("department", STRING), ("num_of_week", INT64)],
        {
            "grid_id": np.arange(n_grid, dtype=np.int64),
            "department": depts[rng.integers(0, len(UC03_DEPARTMENTS), n_grid)],
            "num_of_week": rng.integers(0, 156, n_grid),
        },
    )
    return cat


def uc03_weights(seed: int):
    rng = rng_for("Q_UC03", seed, "model")
    in_dim = 20 + len(UC03_DEPARTMENTS) + 1
    w1 = glorot(rng, in_dim, 16)
    b1 = rng.standard_normal(16) * 0.1
    w2 = glorot(rng, 16, 1)
    b2 = float(rng.standard_normal() * 0.1)
    return w1, b1, w2, b2


def _uc03_models(seed: int) -> ModelStore:
    store = ModelStore()
    store.add("uc03_store_encoder", {"kind": "encoder", "vocabulary": list(range(20))})
    store.add("uc03_department_encoder", {"kind": "encoder", "vocabulary": UC03_DEPARTMENTS})
    return store.freeze()


UC04_SPAM_TOKENS = [f"spam{i}" for i in range(25)]
UC04_HAM_TOKENS = [f"ham{i}" for i in range(25)]


def _uc04_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_UC04", seed)
    n = scaled(4000, scale)
    cat = Catalog(models=_uc04_models(seed))
    docs = np.empty(n, dtype=object)
    spam_arr = np.array(UC04_SPAM_TOKENS, dtype=object)
    ham_arr = np.array(UC04_HAM_TOKENS, dtype=object)
    is_spam = rng.random(n) < 0.4
    for i in range(n):
        length = int(rng.integers(6, 20))
        mix = 0.75 if is_spam[i] else 0.25
        pick_spam = rng.random(length) < mix
        toks = np.where(
            pick_spam,
            spam_arr[rng.integers(0, len(spam_arr), length)],
            ham_arr[rng.integers(0, len(ham_arr), length)],
        )
        docs[i] = " ".join(toks.tolist())
    _table(
        cat, "uc04_reviews",
        [("review_id", INT64), ("text", STRING)],
        {"review_id": np.arange(n, dtype=np.int64), "text": docs},
    )
    return cat


def _uc04_models(seed: int) -> ModelStore:
    rng = rng_for("Q_UC04", seed, "model")
    token_log_probs = {}
    for t in UC04_SPAM_TOKENS:
        p_spam = rng.uniform(0.02, 0.08)
        token_log_probs[t] = [float(np.log(p_spam / 4)), float(np.log(p_spam))]
    for t in UC04_HAM_TOKENS:
        p_ham = rng.uniform(0.02, 0.08)
        token_log_probs[t] = [float(np.log(p_ham)), float(np.log(p_ham / 4))]
    store = ModelStore()
    store.add(
        "uc04_nb",
        {
            "kind": "naive_bayes",
            "log_priors": [float(np.log(0.6)), float(np.log(0.4))],
            "token_log_probs": token_log_probs,
            "default_log_prob": [-10.0, -10.0],
        },
    )
    return store.freeze()


UC08_DEPARTMENTS = [f"division_{i:02d}" for i in range(12)]


def _uc08_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_UC08", seed)
    n_orders = scaled(4000, scale, 32)
    n_items = scaled(20000, scale)
    n_products = scaled(200, scale, 12)
    cat = Catalog(models=ModelStore({
        "uc08_department_encoder": {"kind": "encoder", "vocabulary": UC08_DEPARTMENTS},
    }).freeze())
    _table(
        cat, "uc08_orders",
        [("o_order_id", INT64), ("weekday", INT64)],
        {
            "o_order_id": np.arange(n_orders, dtype=np.int64),
            "weekday": rng.integers(0, 7, n_orders),
        },
    )
    depts = np.array(UC08_DEPARTMENTS, dtype=object)
    _table(
        cat, "uc08_products",
        [("p_product_id", INT64), ("department", STRING)],
        {
            "p_product_id": np.arange(n_products, dtype=np.int64),
            "department": depts[rng.integers(0, len(UC08_DEPARTMENTS), n_products)],
        },
    )
    _table(
        cat, "uc08_lineitem",
        [("li8_order_id", INT64), ("li8_product_id", INT64), ("quantity", INT64)],
        {
            "li8_order_id": rng.integers(0, n_orders, n_items),
            "li8_product_id": rng.integers(0, n_products, n_items),
            "quantity": rng.integers(1, 12, n_items),
        },
    )
    return cat


def uc08_weights(seed: int):
    rng = rng_for("Q_UC08", seed, "model")
    in_dim = 3 + len(UC08_DEPARTMENTS)
    w1 = glorot(rng, in_dim, 16)
    b1 = rng.standard_normal(16) * 0.1
    w2 = glorot(rng, 16, 8)
    b2 = rng.standard_normal(8) * 0.1
    w3 = glorot(rng, 8, 4)
    b3 = rng.standard_normal(4) * 0.1
    return w1, b1, w2, b2, w3, b3


UC10_FEATURE_DIM = 512


def _uc10_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_UC10", seed)
    n_tx = scaled(20000, scale)
    n_customers = scaled(4000, scale, 64)
    history_per_customer = 5
    cat = Catalog(models=ModelStore().freeze())
    features = sparse_vectors(rng, n_tx, UC10_FEATURE_DIM, nnz_target=0.1)
    # first two components carry the normalized amount and business hour
    features[:, 0] = np.round(rng.uniform(0, 1, n_tx), 4)
    features[:, 1] = rng.integers(0, 24, n_tx) / 24.0
    _table(
        cat, "uc10_transactions",
        [("transaction_id", INT64), ("sender_id", INT64), ("tx_features", vector(UC10_FEATURE_DIM))],
        {
            "transaction_id": np.arange(n_tx, dtype=np.int64),
            "sender_id": rng.integers(0, n_customers, n_tx),
            "tx_features": np.round(features, 4),
        },
    )
    n_hist = n_customers * history_per_customer
    _table(
        cat, "uc10_account_history",
        [("fa_id", INT64), ("fa_customer_sk", INT64), ("transaction_limit", FLOAT64)],
        {
            "fa_id": np.arange(n_hist, dtype=np.int64),
            "fa_customer_sk": np.repeat(np.arange(n_customers, dtype=np.int64), history_per_customer),
            "transaction_limit": np.round(rng.uniform(100, 10000, n_hist), 2),
        },
    )
    return cat


def uc10_weights(seed: int):
    rng = rng_for("Q_UC10", seed, "model")
    w1 = glorot(rng, UC10_FEATURE_DIM, 64)
    b1 = rng.standard_normal(64) * 0.1
    w2 = glorot(rng, 64, 1)
    b2 = float(rng.standard_normal() * 0.1)
    return w1, b1, w2, b2


IDNET_IMAGE_SIZE = 16


def _idnet_images(rng: np.random.Generator, n: int) -> np.ndarray:
    """Mostly-zero grayscale squares with a bright structured patch."""
    imgs = np.zeros((n, IDNET_IMAGE_SIZE, IDNET_IMAGE_SIZE))
    for i in range(n):
        h, w = int(rng.integers(4, 9)), int(rng.integers(4, 9))
        y, x = int(rng.integers(0, IDNET_IMAGE_SIZE - h)), int(rng.integers(0, IDNET_IMAGE_SIZE - w))
        imgs[i, y:y + h, x:x + w] = np.round(rng.uniform(0.2, 1.0, (h, w)), 4)
    return imgs


def _idnet1_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_IDNet1", seed)
    n_imgs = scaled(1500, scale, 32)
    n_audits = scaled(3000, scale, 32)
    cat = Catalog(models=_idnet_models(seed))
    _table(
        cat, "idnet",
        [("license_number", INT64), ("image_data", matrix(IDNET_IMAGE_SIZE, IDNET_IMAGE_SIZE))],
        {
            "license_number": np.arange(n_imgs, dtype=np.int64),
            "image_data": _idnet_images(rng, n_imgs),
        },
    )
    _table(
        cat, "toll_audit",
        [("audit_id", INT64), ("t_license_number", INT64), ("toll_amount", FLOAT64)],
        {
            "audit_id": np.arange(n_audits, dtype=np.int64),
            "t_license_number": rng.integers(0, n_imgs, n_audits),
            "toll_amount": np.round(rng.uniform(1, 80, n_audits), 2),
        },
    )
    return cat


def idnet_head_weights(seed: int):
    rng = rng_for("Q_IDNet", seed, "head")
    windows = (IDNET_IMAGE_SIZE - 3 + 1) ** 2
    w1 = glorot(rng, 4 * windows, 16)
    b1 = rng.standard_normal(16) * 0.1
    w2 = glorot(rng, 16, 2)
    b2 = rng.standard_normal(2) * 0.1
    return w1, b1, w2, b2


def _idnet_models(seed: int) -> ModelStore:
    rng = rng_for("Q_IDNet", seed, "model")
    store = ModelStore()
    store.add("idnet_cnn_filters", {"kind": "conv_filters",
                                    "filters": np.round(rng.standard_normal((4, 3, 3)), 4).tolist()})
    store.add("idnet_llm", {"kind": "llm", "seed": seed})
    return store.freeze()


def _idnet2_catalog(seed: int, scale: float) -> Catalog:
    rng = rng_for("Q_IDNet2", seed)
    n_imgs = scaled(2000, scale, 64)
    cat = Catalog(models=_idnet_models(seed))
    _table(
        cat, "idnet10k",
        [("license_number", INT64), ("image_data", matrix(IDNET_IMAGE_SIZE, IDNET_IMAGE_SIZE))],
        {
            "license_number": np.arange(n_imgs, dtype=np.int64),
            "image_data": _idnet_images(rng, n_imgs),
        },
    )
    return cat


_CATALOG_BUILDERS = {
    "Q_Expedia": _expedia_catalog,
    "Q_Flights": _flights_catalog,
    "Q_Credit": _credit_catalog,
    "Q_UC01": _uc01_catalog,
    "Q_UC03": _uc03_catalog,
    "Q_UC04": _uc04_catalog,
    "Q_UC08": _uc08_catalog,
    "Q_UC10": _uc10_catalog,
    "Q_IDNet1": _idnet1_catalog,
    "Q_IDNet2": _idnet2_catalog,
}


def generate_catalog(query_id: str, seed: int = DEFAULT_SEED, scale: float = DEFAULT_SCALE) -> Catalog:
    """Seeded catalog (tables + models) for one suite query."""
    if query_id not in _CATALOG_BUILDERS:
        raise InvalidSpec(f"unknown query {query_id!r}")
    if scale <= 0:
        raise InvalidSpec("scale must be positive")
    return _CATALOG_BUILDERS[query_id](seed, scale)

