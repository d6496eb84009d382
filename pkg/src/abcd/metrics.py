"""Structural metrics over syntax trees: node and edge counts.

Edge counting has two modes. Tree mode counts parent-to-child node links
only, so it always equals node count minus one. Field mode adds one edge per
(node, primitive attribute) pair: identifier text, constant values, and
operator symbols each contribute an edge. Field mode is the default; both
are always available.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Union

from .tree import AstNode, SyntaxTree, iter_nodes


class EdgeMode(enum.Enum):
    TREE = "tree"
    FIELD = "field"


DEFAULT_EDGE_MODE = EdgeMode.FIELD


@dataclass(frozen=True)
class StructuralProfile:
    """Per-tree structural breakdown behind the two headline numbers."""

    nodes_total: int
    edges_tree: int
    edges_field: int
    per_kind: Dict[str, int]
    max_depth: int


def _root(tree: Union[SyntaxTree, AstNode]) -> AstNode:
    return tree.root if isinstance(tree, SyntaxTree) else tree


def count_nodes(tree: Union[SyntaxTree, AstNode]) -> int:
    if isinstance(tree, SyntaxTree):
        return tree.node_count
    total = 0
    for _ in iter_nodes(tree):
        total += 1
    return total


def count_edges(tree: Union[SyntaxTree, AstNode], mode: EdgeMode = DEFAULT_EDGE_MODE) -> int:
    root = _root(tree)
    nodes = 0
    attr_pairs = 0
    for node in iter_nodes(root):
        nodes += 1
        attr_pairs += len(node.attrs)
    if mode is EdgeMode.TREE:
        return nodes - 1
    return nodes - 1 + attr_pairs


def structural_profile(tree: Union[SyntaxTree, AstNode]) -> StructuralProfile:
    root = _root(tree)
    per_kind: Dict[str, int] = {}
    nodes = 0
    attr_pairs = 0
    max_depth = 0
    stack = [(root, 1)]
    while stack:
        node, depth = stack.pop()
        nodes += 1
        attr_pairs += len(node.attrs)
        if depth > max_depth:
            max_depth = depth
        per_kind[node.kind] = per_kind.get(node.kind, 0) + 1
        for _, child in node.children:
            stack.append((child, depth + 1))
    return StructuralProfile(
        nodes_total=nodes,
        edges_tree=nodes - 1,
        edges_field=nodes - 1 + attr_pairs,
        per_kind=per_kind,
        max_depth=max_depth,
    )
