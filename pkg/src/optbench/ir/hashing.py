"""Canonical structural plan hashing.

The hash is a 64-bit digest of the canonical JSON serialization with sorted
keys, so it is stable across processes, insensitive to node identity and
copying, and sensitive to kind, attrs, literals, child order, and kernel
mode. Used to memoize optimizer search states and the stats cache.
"""

from __future__ import annotations

import hashlib
import json

from .exprs import Expr
from .nodes import PlanNode
from .serde import expr_to_doc, node_to_doc

PlanHash = int


def _digest(doc) -> int:
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def canonical_hash(plan: PlanNode) -> PlanHash:
    cached = plan.__dict__.get("_canonical_hash")
    if cached is not None:
        return cached
    h = _digest(node_to_doc(plan))
    object.__setattr__(plan, "_canonical_hash", h)
    return h


def expr_hash(expr: Expr) -> PlanHash:
    return _digest(expr_to_doc(expr))
