"""Plan builders for the ten suite queries.

Plans mirror the source workloads' joins, filters, and inference calls over
the synthetic catalogs from `gen`. Weight literals and tree specs embedded
in the plans derive from the same per-query seed as the data.
"""

from __future__ import annotations

from functools import lru_cache

from ..errors import UnknownQuery
from ..ir.exprs import Arith, Compare, LayerSpec, MLAttrs, MLCall, and_, col, lit
from ..ir.nodes import Aggregate, Filter, Join, PlanNode, Project, Sample, Scan
from ..ir.schema import Schema
from .gen import (
    CREDIT_FEATURES,
    DEFAULT_SEED,
    EXPEDIA_FEATURES,
    FLIGHTS_FEATURES,
    UC03_DEPARTMENTS,
    UC08_DEPARTMENTS,
    credit_forest,
    expedia_tree,
    flights_forest,
    generate_catalog,
    idnet_head_weights,
    uc03_weights,
    uc08_weights,
    uc10_weights,
    weight_literal,
)

QUERY_IDS = (
    "Q_Expedia",
    "Q_Flights",
    "Q_Credit",
    "Q_UC01",
    "Q_UC03",
    "Q_UC04",
    "Q_UC08",
    "Q_UC10",
    "Q_IDNet1",
    "Q_IDNet2",
)


@lru_cache(maxsize=1)
def table_schemas() -> dict[str, Schema]:
    """Static schemas of every generated table (scale- and seed-independent)."""
    out: dict[str, Schema] = {}
    for qid in QUERY_IDS:
        cat = generate_catalog(qid, seed=0, scale=0.01)
        for name, table in cat.tables.items():
            out[name] = table.schema
    return out


def _scan(table: str) -> Scan:
    return Scan(table, table_schemas()[table])


def _mul(a, b) -> Arith:
    return Arith("mul", a, b)


def _div(a, b) -> Arith:
    return Arith("div", a, b)


def _matmul(args, w, kernel_mode="dense") -> MLCall:
    return MLCall(
        "matrix_multiply",
        tuple(args) + (w,),
        MLAttrs(kernel_mode=kernel_mode, weight_shape=w.dtype.dims),
    )


def _affine(args, w, b) -> MLCall:
    bias = lit(tuple(float(x) for x in b)) if hasattr(b, "__len__") else lit(float(b))
    call = MLCall("matrix_addition", (_matmul(args, w), bias))
    return call


def _activation(name: str, e) -> MLCall:
    return MLCall(name, (e,))


def build_q_expedia(seed: int = DEFAULT_SEED) -> PlanNode:
    listings, hotels, searches = _scan("expedia_listings"), _scan("expedia_hotels"), _scan("expedia_searches")
    j1 = Join(listings, hotels, "inner", Compare("eq", col("prop_id"), col("h_prop_id")))
    j2 = Join(j1, searches, "inner", Compare("eq", col("srch_id"), col("s_srch_id")))
    predicate = and_(
        Compare("gt", col("prop_location_score1"), lit(1.0)),
        Compare("gt", col("prop_location_score2"), lit(0.1)),
        Compare("gt", col("prop_log_historical_price"), lit(4.0)),
        Compare("gt", col("count_bookings"), lit(5.0)),
        Compare("gt", col("srch_booking_window"), lit(10.0)),
        Compare("gt", col("srch_length_of_stay"), lit(1.0)),
    )
    filtered = Filter(j2, predicate)
    score = MLCall(
        "decision_tree",
        tuple(col(f) for f in EXPEDIA_FEATURES),
        MLAttrs(model_id="expedia_tree", tree_spec=expedia_tree(seed)),
    )
    return Project(filtered, ((col("prop_id"), "prop_id"), (col("srch_id"), "srch_id"), (score, "score")))


def build_q_flights(seed: int = DEFAULT_SEED) -> PlanNode:
    routes = _scan("flights_routes")
    j1 = Join(routes, _scan("flights_airlines"), "inner",
              Compare("eq", col("airlineid"), col("f_airlineid")))
    j2 = Join(j1, _scan("flights_sairports"), "inner",
              Compare("eq", col("sairportid"), col("s_airportid")))
    j3 = Join(j2, _scan("flights_dairports"), "inner",
              Compare("eq", col("dairportid"), col("d_airportid")))
    predicate = and_(
        Compare("eq", col("name2"), lit("t")),
        Compare("eq", col("name4"), lit("t")),
        Compare("gt", col("name1"), lit(2.8)),
    )
    filtered = Filter(j3, predicate)
    codeshare = MLCall(
        "decision_forest",
        tuple(col(f) for f in FLIGHTS_FEATURES),
        MLAttrs(model_id="flights_forest", tree_spec=flights_forest(seed)),
    )
    return Project(
        filtered,
        (
            (col("route_id"), "route_id"),
            (col("airlineid"), "airlineid"),
            (col("sairportid"), "sairportid"),
            (col("dairportid"), "dairportid"),
            (codeshare, "codeshare"),
        ),
    )


def build_q_credit(seed: int = DEFAULT_SEED) -> PlanNode:
    scan = _scan("credit_card")
    predicate = and_(
        Compare("gt", col("V1"), lit(1.0)),
        Compare("lt", col("V2"), lit(0.27)),
        Compare("gt", col("V3"), lit(0.3)),
    )
    cls = MLCall(
        "decision_forest",
        tuple(col(f) for f in CREDIT_FEATURES),
        MLAttrs(model_id="credit_forest", tree_spec=credit_forest(seed)),
    )
    return Project(
        Filter(scan, predicate),
        ((col("Time"), "Time"), (col("Amount"), "Amount"), (cls, "Class")),
    )


def build_q_uc01(seed: int = DEFAULT_SEED) -> PlanNode:
    li = _scan("uc01_lineitem")
    per_order = Aggregate(
        li,
        (col("customer_sk"), col("li_order_id"), col("invoice_year")),
        (
            ("sum", _mul(col("quantity"), col("price")), "row_price"),
            ("sum", _mul(col("return_quantity"), col("price")), "return_row_price"),
        ),
    )
    ratios = Aggregate(
        per_order,
        (col("customer_sk"),),
        (("avg", _div(col("return_row_price"), col("row_price")), "return_ratio"),),
    )
    per_year = Aggregate(
        per_order,
        (col("customer_sk"), col("invoice_year")),
        (("count", lit(1), "orders_per_year"),),
    )
    frequency = Aggregate(
        per_year,
        (col("customer_sk"),),
        (("avg", col("orders_per_year"), "frequency"),),
    )
    freq_renamed = Project(
        frequency, ((col("customer_sk"), "customer_sk_f"), (col("frequency"), "frequency"))
    )
    joined = Join(ratios, freq_renamed, "inner",
                  Compare("eq", col("customer_sk"), col("customer_sk_f")))
    scaled = MLCall(
        "min_max_scaler", (col("frequency"), col("return_ratio")), MLAttrs(model_id="uc01_scaler")
    )
    cluster = MLCall("kmeans", (scaled,), MLAttrs(model_id="uc01_kmeans"))
    return Project(joined, ((col("customer_sk"), "customer_id"), (cluster, "cluster_id")))


def build_q_uc03(seed: int = DEFAULT_SEED) -> PlanNode:
    grid = Join(_scan("uc03_stores"), _scan("uc03_dept_weeks"), "cross")
    w1, b1, w2, b2 = uc03_weights(seed)
    store_enc = MLCall("one_hot_encoder", (col("store"),),
                       MLAttrs(model_id="uc03_store_encoder", out_dim=20))
    dept_enc = MLCall("one_hot_encoder", (col("department"),),
                      MLAttrs(model_id="uc03_department_encoder", out_dim=len(UC03_DEPARTMENTS)))
    week_norm = _div(col("num_of_week"), lit(156.0))
    hidden = _activation("relu", _affine((store_enc, dept_enc, week_norm), weight_literal(w1), b1))
    prediction = _affine((hidden,), weight_literal(w2), b2)
    return Project(
        grid,
        (
            (col("store"), "store"),
            (col("department"), "department"),
            (col("num_of_week"), "num_of_week"),
            (prediction, "prediction"),
        ),
    )


def build_q_uc04(seed: int = DEFAULT_SEED) -> PlanNode:
    reviews = _scan("uc04_reviews")
    spam = MLCall("naive_bayes", (col("text"),), MLAttrs(model_id="uc04_nb"))
    return Project(reviews, ((col("review_id"), "review_id"), (spam, "predicted_spam")))


def build_q_uc08(seed: int = DEFAULT_SEED) -> PlanNode:
    j1 = Join(_scan("uc08_orders"), _scan("uc08_lineitem"), "inner",
              Compare("eq", col("o_order_id"), col("li8_order_id")))
    j2 = Join(j1, _scan("uc08_products"), "inner",
              Compare("eq", col("li8_product_id"), col("p_product_id")))
    agg = Aggregate(
        j2,
        (col("o_order_id"), col("weekday"), col("department")),
        (("sum", col("quantity"), "scan_count"), ("count", lit(1), "item_rows")),
    )
    w1, b1, w2, b2, w3, b3 = uc08_weights(seed)
    dept_enc = MLCall("one_hot_encoder", (col("department"),),
                      MLAttrs(model_id="uc08_department_encoder", out_dim=len(UC08_DEPARTMENTS)))
    feats = (col("scan_count"), col("item_rows"), col("weekday"), dept_enc)
    h1 = _activation("relu", _affine(feats, weight_literal(w1), b1))
    h2 = _activation("relu", _affine((h1,), weight_literal(w2), b2))
    prediction = _activation("softmax", _affine((h2,), weight_literal(w3), b3))
    return Project(
        agg,
        (
            (col("o_order_id"), "o_order_id"),
            (col("department"), "department"),
            (prediction, "prediction"),
        ),
    )


def build_q_uc10(seed: int = DEFAULT_SEED) -> PlanNode:
    joined = Join(
        _scan("uc10_transactions"),
        _scan("uc10_account_history"),
        "inner",
        Compare("eq", col("sender_id"), col("fa_customer_sk")),
    )
    w1, b1, w2, b2 = uc10_weights(seed)
    hidden = _activation("relu", _affine((col("tx_features"),), weight_literal(w1), b1))
    prediction = _activation("sigmoid", _affine((hidden,), weight_literal(w2), b2))
    return Project(
        joined,
        (
            (col("transaction_id"), "transaction_id"),
            (col("fa_id"), "fa_id"),
            (prediction, "prediction"),
        ),
    )


def build_q_idnet1(seed: int = DEFAULT_SEED) -> PlanNode:
    joined = Join(
        _scan("idnet"),
        _scan("toll_audit"),
        "inner",
        Compare("eq", col("license_number"), col("t_license_number")),
    )
    conv = MLCall("conv2d", (col("image_data"),),
                  MLAttrs(model_id="idnet_cnn_filters", filter_spec=(4, 3, 3)))
    w1, b1, w2, b2 = idnet_head_weights(seed)
    head = MLAttrs(layer_spec=(
        LayerSpec(tuple(map(tuple, w1)), tuple(b1), "relu"),
        LayerSpec(tuple(map(tuple, w2)), tuple(b2), "identity"),
    ))
    logits = MLCall("fused_dnn", (conv,), head)
    verdict = MLCall("argmax", (MLCall("softmax", (logits,)),))
    keep_real = Filter(joined, Compare("eq", verdict, lit(0)))
    passthrough = tuple(
        (col(n), n)
        for n in ("license_number", "image_data", "audit_id", "t_license_number", "toll_amount")
    )
    return Project(keep_real, passthrough)


REF_PROMPT = "Is this image fraudulent? Reply 1 for fraud, 0 otherwise."
VOTE_PROMPT = (
    "Tell me whether the INPUT image is fraudulent or not using the reference "
    "image(s) and the LLM responses."
)


def idnet2_plan(seed: int, n_inputs: int, n_refs: int) -> PlanNode:
    base = _scan("idnet10k")
    inputs = Sample(base, n_inputs, seed=seed * 3 + 1)
    ref1 = Project(Sample(base, n_refs, seed=seed * 3 + 2), ((col("image_data"), "ref_image1"),))
    ref2 = Project(Sample(base, n_refs, seed=seed * 3 + 3), ((col("image_data"), "ref_image2"),))
    paired = Join(Join(inputs, ref1, "cross"), ref2, "cross")
    llm_attrs = MLAttrs(model_id="idnet_llm")
    verdict1 = MLCall("llm", (lit(REF_PROMPT), col("ref_image1")), llm_attrs)
    verdict2 = MLCall("llm", (lit(REF_PROMPT), col("ref_image2")), llm_attrs)
    vote = MLCall(
        "llm",
        (lit(VOTE_PROMPT), col("image_data"), col("ref_image1"), verdict1, col("ref_image2"), verdict2),
        llm_attrs,
    )
    votes = Project(paired, ((col("license_number"), "license_number"), (vote, "vote")))
    return Aggregate(
        votes,
        (col("license_number"),),
        (("majority_vote", col("vote"), "is_fraud"), ("count", lit(1), "num_votes")),
    )


def build_q_idnet2(seed: int = DEFAULT_SEED) -> PlanNode:
    return idnet2_plan(seed, n_inputs=10, n_refs=20)


_BUILDERS = {
    "Q_Expedia": build_q_expedia,
    "Q_Flights": build_q_flights,
    "Q_Credit": build_q_credit,
    "Q_UC01": build_q_uc01,
    "Q_UC03": build_q_uc03,
    "Q_UC04": build_q_uc04,
    "Q_UC08": build_q_uc08,
    "Q_UC10": build_q_uc10,
    "Q_IDNet1": build_q_idnet1,
    "Q_IDNet2": build_q_idnet2,
}


def build_query(query_id: str, seed: int = DEFAULT_SEED) -> PlanNode:
    if query_id not in _BUILDERS:
        raise UnknownQuery(query_id)
    return _BUILDERS[query_id](seed)


