"""Deterministic tree serialization.

Two formats:

* sexpr: one line, ``(Kind attr=value ... (Child ...) ...)``. Attribute
  pairs come before children. A value renders bare when it is a number,
  boolean, or none repr, or an identifier-shaped string; anything else is a
  JSON string literal. Spans are not included, so structurally equal trees
  dump byte-identically.
* json: ``{"schema": "abcd-tree/1", "root": {...}}`` where each node is
  ``{"kind", "span", "attrs", "children"}``; spans serialize as four-element
  arrays. Round-trips through the report module's deserializer.
"""

from __future__ import annotations

import json
import re
from typing import List, Union

from .tree import AstNode, SyntaxTree

TREE_SCHEMA = "abcd-tree/1"

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _render_value(value: object) -> str:
    if value is None or isinstance(value, (bool, int, float)):
        return repr(value)
    if isinstance(value, str) and _IDENT_RE.match(value):
        return value
    return json.dumps(value, ensure_ascii=False)


def _sexpr(root: AstNode) -> str:
    out: List[str] = []
    # Explicit stack; frames are either nodes to open or the closing paren.
    stack: List[object] = [root]
    while stack:
        item = stack.pop()
        if item is None:
            out.append(")")
            continue
        parts = [item.kind]
        for name, value in item.attrs:
            parts.append(f"{name}={_render_value(value)}")
        if out and out[-1] != "(":
            out.append(" ")
        out.append("(")
        out.append(" ".join(parts))
        stack.append(None)
        children = item.children
        for i in range(len(children) - 1, -1, -1):
            stack.append(children[i][1])
    return "".join(out)


def _node_obj(root: AstNode) -> dict:
    obj: dict = {
        "kind": root.kind,
        "span": list(root.span) if root.span is not None else None,
        "attrs": [[name, value] for name, value in root.attrs],
        "children": [[field, _node_obj(child)] for field, child in root.children],
    }
    return obj


def dump_tree(tree: Union[SyntaxTree, AstNode], format: str = "sexpr") -> str:
    """Serialize a tree. ``format`` is "sexpr" or "json"."""
    root = tree.root if isinstance(tree, SyntaxTree) else tree
    if format == "sexpr":
        return _sexpr(root)
    if format == "json":
        payload = {"schema": TREE_SCHEMA, "root": _node_obj(root)}
        return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
    raise ValueError(f"unknown dump format: {format!r}")
