"""Columnar plan execution.

Bottom-up evaluation over numpy column blocks. Filter and Project stream
their input in `batch_size` chunks; joins, aggregates, and sampling
materialize. Inner joins are hash joins on equality conditions; cross joins
are nested loops. Execution is deterministic for a fixed (plan, catalog,
seed), including the per-operator row counters and the per-(row, MLCall)
invocation counter used by pushdown assertions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataTypeError, DivergentSchema, ValidationError
from ..ir.derive import derive_schema, normalized_equality_pairs
from ..ir.exprs import Arith, ColumnRef, Compare, Expr, Literal, Logical, MLCall
from ..ir.nodes import Aggregate, Filter, Join, Limit, PlanNode, Project, Sample, Scan
from ..ir.schema import Schema
from ..kernels.evaluate import Const, as_batch, batch_eval_ml
from ..kernels.models import ModelStore
from .table import Catalog, empty_column

DEFAULT_BATCH_SIZE = 1024


@dataclass
class ExecStats:
    node_rows: dict[tuple, dict] = field(default_factory=dict)
    ml_call_invocations: int = 0
    wall_time_ms: float = 0.0

    def record(self, path: tuple, rows_in: int, rows_out: int) -> None:
        self.node_rows[path] = {"rows_in": rows_in, "rows_out": rows_out}


@dataclass
class ResultSet:
    schema: Schema
    columns: dict[str, np.ndarray]
    n_rows: int
    stats: ExecStats

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def rows(self):
        for i in range(self.n_rows):
            yield tuple(self.columns[n][i] for n in self.schema.names)


class _Block:
    """Materialized intermediate relation."""

    __slots__ = ("schema", "columns", "n")

    def __init__(self, schema: Schema, columns: dict[str, np.ndarray], n: int):
        self.schema = schema
        self.columns = columns
        self.n = n

    def take(self, idx: np.ndarray) -> "_Block":
        return _Block(self.schema, {k: v[idx] for k, v in self.columns.items()}, len(idx))

    def slice(self, lo: int, hi: int) -> "_Block":
        return _Block(self.schema, {k: v[lo:hi] for k, v in self.columns.items()}, min(hi, self.n) - lo)


def _concat_blocks(schema: Schema, blocks: list[_Block]) -> _Block:
    if not blocks:
        return _Block(schema, {n: empty_column(dt, 0) for n, dt in schema.columns}, 0)
    if len(blocks) == 1:
        return blocks[0]
    cols = {n: np.concatenate([b.columns[n] for b in blocks]) for n in schema.names}
    return _Block(schema, cols, sum(b.n for b in blocks))


class Executor:
    def __init__(self, catalog: Catalog, models: ModelStore | None = None, seed: int = 0,
                 batch_size: int = DEFAULT_BATCH_SIZE):
        self.catalog = catalog
        self.models = models if models is not None else catalog.models
        self.seed = seed
        self.batch_size = max(1, batch_size)
        self.stats = ExecStats()

    # --- expressions ---

    def eval_expr(self, expr: Expr, block: _Block):
        """Evaluate one expression over a block; constants stay unbatched."""
        if isinstance(expr, ColumnRef):
            return block.columns[expr.name]
        if isinstance(expr, Literal):
            v = expr.value
            if expr.dtype.base in ("vector", "matrix"):
                return Const(np.asarray(v, dtype=np.float64))
            return Const(v)
        if isinstance(expr, Arith):
            lhs = self.eval_expr(expr.lhs, block)
            rhs = self.eval_expr(expr.rhs, block)
            if expr.op == "get":
                vecs = as_batch(lhs, block.n)
                idx = as_batch(rhs, block.n).astype(np.int64, copy=False)
                return vecs[np.arange(block.n), idx]
            a = lhs.value if isinstance(lhs, Const) else lhs
            b = rhs.value if isinstance(rhs, Const) else rhs
            if expr.op == "add":
                out = np.add(a, b)
            elif expr.op == "sub":
                out = np.subtract(a, b)
            elif expr.op == "mul":
                out = np.multiply(a, b)
            else:
                out = np.true_divide(a, b)
            if isinstance(lhs, Const) and isinstance(rhs, Const):
                return Const(out if np.ndim(out) else out.item() if isinstance(out, np.generic) else out)
            return out
        if isinstance(expr, Compare):
            lhs = self.eval_expr(expr.lhs, block)
            rhs = self.eval_expr(expr.rhs, block)
            a = as_batch(lhs, block.n)
            b = as_batch(rhs, block.n)
            op = expr.op
            if a.dtype == object or b.dtype == object:
                a_l, b_l = list(a), list(b)
                if op == "eq":
                    return np.array([x == y for x, y in zip(a_l, b_l)], dtype=bool)
                if op == "ne":
                    return np.array([x != y for x, y in zip(a_l, b_l)], dtype=bool)
                raise DataTypeError(0, "?", f"ordering compare on strings")
            fn = {"eq": np.equal, "ne": np.not_equal, "lt": np.less,
                  "le": np.less_equal, "gt": np.greater, "ge": np.greater_equal}[op]
            return fn(a, b)
        if isinstance(expr, Logical):
            parts = [as_batch(self.eval_expr(o, block), block.n) for o in expr.operands]
            if expr.op == "not":
                return np.logical_not(parts[0])
            if expr.op == "and":
                return np.logical_and.reduce(parts)
            return np.logical_or.reduce(parts)
        if isinstance(expr, MLCall):
            args = [self.eval_expr(a, block) for a in expr.args]
            self.stats.ml_call_invocations += block.n
            return batch_eval_ml(expr.fn, args, expr.attrs, self.models, block.n)
        raise ValidationError(f"unknown expression {type(expr).__name__}")

    def _materialize_expr(self, expr: Expr, block: _Block) -> np.ndarray:
        return as_batch(self.eval_expr(expr, block), block.n)

    # --- operators ---

    def run(self, plan: PlanNode) -> ResultSet:
        derive_schema(plan)
        t0 = time.perf_counter()
        block = self._execute(plan, ())
        elapsed = (time.perf_counter() - t0) * 1000.0
        self.stats.wall_time_ms = elapsed
        return ResultSet(block.schema, block.columns, block.n, self.stats)

    def _execute(self, node: PlanNode, path: tuple) -> _Block:
        if isinstance(node, Scan):
            out = self._scan(node)
            self.stats.record(path, 0, out.n)
            return out

        if isinstance(node, Filter):
            child = self._execute(node.child, path + (0,))
            parts = []
            for lo in range(0, child.n, self.batch_size):
                chunk = child.slice(lo, min(lo + self.batch_size, child.n))
                mask = as_batch(self.eval_expr(node.predicate, chunk), chunk.n).astype(bool, copy=False)
                parts.append(chunk.take(np.nonzero(mask)[0]))
            out = _concat_blocks(child.schema, parts)
            self.stats.record(path, child.n, out.n)
            return out

        if isinstance(node, Project):
            child = self._execute(node.child, path + (0,))
            schema = derive_schema(node)
            parts = []
            for lo in range(0, max(child.n, 1), self.batch_size):
                if lo >= child.n and child.n > 0:
                    break
                chunk = child.slice(lo, min(lo + self.batch_size, child.n))
                cols = {name: self._materialize_expr(e, chunk) for e, name in node.exprs}
                parts.append(_Block(schema, cols, chunk.n))
                if child.n == 0:
                    break
            out = _concat_blocks(schema, parts)
            self.stats.record(path, child.n, out.n)
            return out

        if isinstance(node, Join):
            left = self._execute(node.left, path + (0,))
            right = self._execute(node.right, path + (1,))
            if node.join_type == "cross":
                li = np.repeat(np.arange(left.n), right.n)
                ri = np.tile(np.arange(right.n), left.n)
            else:
                li, ri = self._hash_join_indices(node, left, right)
            schema = derive_schema(node)
            cols = {}
            for n_ in left.schema.names:
                cols[n_] = left.columns[n_][li]
            for n_ in right.schema.names:
                cols[n_] = right.columns[n_][ri]
            out = _Block(schema, cols, len(li))
            self.stats.record(path, left.n + right.n, out.n)
            return out

        if isinstance(node, Aggregate):
            child = self._execute(node.child, path + (0,))
            out = self._aggregate(node, child)
            self.stats.record(path, child.n, out.n)
            return out

        if isinstance(node, Limit):
            child = self._execute(node.child, path + (0,))
            out = child.slice(0, min(node.n, child.n))
            self.stats.record(path, child.n, out.n)
            return out

        if isinstance(node, Sample):
            child = self._execute(node.child, path + (0,))
            idx = reservoir_indices(child.n, node.n, node.seed)
            out = child.take(idx)
            self.stats.record(path, child.n, out.n)
            return out

        raise ValidationError(f"unknown plan node {type(node).__name__}")

    def _scan(self, node: Scan) -> _Block:
        if node.inline_rows is not None:
            cols = {cn: empty_column(dt, len(node.inline_rows)) for cn, dt in node.schema.columns}
            for i, row in enumerate(node.inline_rows):
                for (cn, _), v in zip(node.schema.columns, row):
                    cols[cn][i] = v
            return _Block(node.schema, cols, len(node.inline_rows))
        table = self.catalog.get(node.table)
        if tuple(table.schema.columns) != tuple(node.schema.columns):
            raise DivergentSchema(
                f"scan of {node.table!r} declares a schema that differs from the catalog"
            )
        return _Block(table.schema, dict(table.columns), table.n_rows)

    def _hash_join_indices(self, node: Join, left: _Block, right: _Block):
        pairs = normalized_equality_pairs(node.condition, left.schema, right.schema)
        lcols = [left.columns[a] for a, _ in pairs]
        rcols = [right.columns[b] for _, b in pairs]
        if len(pairs) == 1 and lcols[0].dtype != object:
            lkeys, rkeys = lcols[0], rcols[0]
            order = np.argsort(rkeys, kind="stable")
            sorted_r = rkeys[order]
            starts = np.searchsorted(sorted_r, lkeys, side="left")
            ends = np.searchsorted(sorted_r, lkeys, side="right")
            counts = ends - starts
            li = np.repeat(np.arange(left.n), counts)
            if li.size == 0:
                return li, li.copy()
            offsets = np.concatenate([np.arange(s, e) for s, e, c in zip(starts, ends, counts) if c > 0])
            ri = order[offsets]
            return li, ri
        buckets: dict[tuple, list[int]] = {}
        for j in range(right.n):
            buckets.setdefault(tuple(c[j] for c in rcols), []).append(j)
        li_list, ri_list = [], []
        for i in range(left.n):
            for j in buckets.get(tuple(c[i] for c in lcols), ()):
                li_list.append(i)
                ri_list.append(j)
        return np.asarray(li_list, dtype=np.int64), np.asarray(ri_list, dtype=np.int64)

    def _aggregate(self, node: Aggregate, child: _Block) -> _Block:
        schema = derive_schema(node)
        key_arrays = [self._materialize_expr(k, child) for k in node.group_keys]
        if child.n == 0:
            return _Block(schema, {n: empty_column(dt, 0) for n, dt in schema.columns}, 0)

        if key_arrays:
            group_of: dict[tuple, int] = {}
            gid = np.empty(child.n, dtype=np.int64)
            key_rows = list(zip(*[list(a) for a in key_arrays]))
            for i, kr in enumerate(key_rows):
                g = group_of.setdefault(kr, len(group_of))
                gid[i] = g
            n_groups = len(group_of)
            rep_rows = np.full(n_groups, -1, dtype=np.int64)
            for i in range(child.n - 1, -1, -1):
                rep_rows[gid[i]] = i
        else:
            gid = np.zeros(child.n, dtype=np.int64)
            n_groups = 1
            rep_rows = np.zeros(1, dtype=np.int64)

        order = np.argsort(gid, kind="stable")
        sorted_gid = gid[order]
        boundaries = np.nonzero(np.diff(sorted_gid))[0] + 1
        starts = np.concatenate([[0], boundaries])
        counts = np.diff(np.concatenate([starts, [child.n]]))

        cols: dict[str, np.ndarray] = {}
        for arr, (name, _) in zip(key_arrays, schema.columns):
            cols[name] = arr[rep_rows]

        for fn, e, name in node.aggregates:
            dt = schema.dtype_of(name)
            if fn == "count":
                cols[name] = counts.astype(np.int64)
                continue
            vals = self._materialize_expr(e, child)[order]
            if fn in ("sum", "avg"):
                sums = np.add.reduceat(vals.astype(np.float64, copy=False), starts)
                if fn == "avg":
                    cols[name] = sums / counts
                else:
                    cols[name] = sums.astype(np.int64) if dt.base == "int64" else sums
            elif fn == "min":
                cols[name] = np.minimum.reduceat(vals, starts)
            elif fn == "max":
                cols[name] = np.maximum.reduceat(vals, starts)
            else:  # majority_vote: most frequent value, ties to the smallest
                out = empty_column(dt, n_groups)
                for g in range(n_groups):
                    seg = vals[starts[g]:starts[g] + counts[g]]
                    values, freq = {}, {}
                    for v in seg.tolist():
                        freq[v] = freq.get(v, 0) + 1
                    best = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
                    out[g] = best
                cols[name] = out
        return _Block(schema, cols, n_groups)


def reservoir_indices(n_input: int, k: int, seed: int) -> np.ndarray:
    """Algorithm-R reservoir over the input row stream; output keeps row order."""
    k = min(k, n_input)
    reservoir = list(range(k))
    if n_input > k:
        rng = np.random.Generator(np.random.PCG64(seed))
        draws = rng.integers(0, np.arange(k, n_input) + 1)
        for offset, j in enumerate(draws):
            if j < k:
                reservoir[j] = k + offset
    return np.array(sorted(reservoir), dtype=np.int64)


def execute(plan: PlanNode, catalog: Catalog, models: ModelStore | None = None,
            seed: int = 0, batch_size: int = DEFAULT_BATCH_SIZE) -> ResultSet:
    """Run a plan against loaded tables; see `Executor` for semantics."""
    return Executor(catalog, models, seed, batch_size).run(plan)
