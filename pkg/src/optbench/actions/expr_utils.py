"""Shared expression-transform helpers for actions."""

from __future__ import annotations

from typing import Callable, Optional

from ..ir.exprs import Expr, MLCall, children_of, replace_child


def transform_calls(
    expr: Expr, visit: Callable[[MLCall, tuple], Optional[Expr]], path: tuple = ()
) -> tuple[bool, Expr]:
    """Rewrite ML calls in an expression tree, outermost-first.

    `visit` returns a replacement expression or None to leave the call
    unchanged; children of the (possibly replaced) node are then visited.
    Paths are child-index tuples usable for stats lookups against the
    original tree.
    """
    changed = False
    if isinstance(expr, MLCall):
        replacement = visit(expr, path)
        if replacement is not None:
            expr = replacement
            changed = True
    out = expr
    for i, child in enumerate(children_of(expr)):
        c_changed, c2 = transform_calls(child, visit, path + (i,))
        if c_changed:
            out = replace_child(out, i, c2)
            changed = True
    return changed, out


def find_calls(expr: Expr, predicate=None) -> list[tuple[tuple, MLCall]]:
    """All (path, MLCall) sites in preorder, optionally filtered."""
    out = []

    def rec(e, path):
        if isinstance(e, MLCall) and (predicate is None or predicate(e)):
            out.append((path, e))
        for i, c in enumerate(children_of(e)):
            rec(c, path + (i,))

    rec(expr, ())
    return out
