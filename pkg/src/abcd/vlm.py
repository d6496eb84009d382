"""VLM call-site extraction, query recovery, and token counting.

A call site is any static Call whose callee is an attribute access whose
final name is in the registry (receiver-agnostic tail match; bare-name calls
never match). Query text is the first positional argument: a string or
formatted-string literal resolves directly; a plain name resolves through
one round of intra-function constant propagation: the name must have
exactly one definition in the enclosing scope, that definition must be an
assignment of a string or formatted-string literal, and it must lexically
precede the call. Anything else is unresolved, which is a value here, not an
error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .tree import AstNode, Span, SyntaxTree
from .treebank import HOLE_TOKEN, tokenize_text
from .errors import ConfigError

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

DIRECT = "direct-literal"
PROPAGATED = "propagated"
UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class CalleeRegistry:
    """Ordered set of method names treated as VLM interfaces."""

    names: Tuple[str, ...] = ("simple_query", "llm_query")

    def __post_init__(self):
        if not self.names:
            raise ConfigError("callee registry must not be empty")
        seen = set()
        for name in self.names:
            if not _IDENT_RE.match(name):
                raise ConfigError(f"registry name is not an identifier: {name!r}")
            if name in seen:
                raise ConfigError(f"duplicate registry name: {name!r}")
            seen.add(name)

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def __iter__(self):
        return iter(self.names)

    @classmethod
    def default(cls) -> "CalleeRegistry":
        return cls()


@dataclass(frozen=True)
class QueryText:
    """Recovered query: literal text runs and interpolation holes.

    ``segments`` items are ("text", str) or ("hole",). ``variable`` names
    the propagated-through local when origin is propagated.
    """

    segments: Tuple[tuple, ...]
    origin: str  # DIRECT | PROPAGATED | UNRESOLVED
    variable: Optional[str] = None

    @property
    def resolved(self) -> bool:
        return self.origin != UNRESOLVED


_UNRESOLVED_QUERY = QueryText((), UNRESOLVED)


@dataclass
class VlmCallSite:
    callee: str
    receiver: str
    span: Span
    node: AstNode
    to_yesno: bool
    query: Optional[QueryText] = None


@dataclass(frozen=True)
class VlmMetrics:
    call_count: int
    token_counts: Tuple[int, ...]
    token_mean: float
    unresolved_sites: int
    flagged: bool  # True when token_mean is a placeholder (no resolved sites)


def _slice_source(source: Optional[str], span: Optional[Span]) -> str:
    if source is None or span is None:
        return ""
    if source.isascii():
        return source[span.offset : span.offset + span.length]
    blob = source.encode("utf-8")
    return blob[span.offset : span.offset + span.length].decode("utf-8")


def extract_call_sites(tree: SyntaxTree, registry: CalleeRegistry) -> List[VlmCallSite]:
    """All registry call sites in source order. Purely static: dead
    branches count, runtime behavior never considered."""
    source = tree.source.source if tree.source is not None else None
    sites: List[VlmCallSite] = []
    # Explicit pre-order walk; children pushed in reverse keeps source order.
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if node.kind == "Call":
            func = node.field("func")
            if func is not None and func.kind == "Attribute":
                method = func.attr("attr")
                if method in registry:
                    to_yesno = any(
                        kw.attr("name") == "to_yesno" for kw in node.fields("keyword")
                    )
                    receiver = _slice_source(source, func.field("value").span)
                    sites.append(
                        VlmCallSite(
                            callee=method,
                            receiver=receiver,
                            span=node.span,
                            node=node,
                            to_yesno=to_yesno,
                        )
                    )
        children = node.children
        for i in range(len(children) - 1, -1, -1):
            stack.append(children[i][1])
    return sites


def _literal_segments(node: AstNode) -> Optional[Tuple[tuple, ...]]:
    if node.kind == "StringLiteral":
        return (("text", node.attr("value")),)
    if node.kind == "FormattedString":
        segments: List[tuple] = []
        for child in node.child_nodes():
            if child.kind == "StringLiteral":
                segments.append(("text", child.attr("value")))
            else:
                segments.append(("hole",))
        if not segments:
            segments.append(("text", ""))
        return tuple(segments)
    return None


def _enclosing_scope(tree: SyntaxTree, target: AstNode) -> AstNode:
    parents = {}
    stack = [tree.root]
    while stack:
        node = stack.pop()
        for _, child in node.children:
            parents[id(child)] = node
            stack.append(child)
    cur = target
    while id(cur) in parents:
        cur = parents[id(cur)]
        if cur.kind == "FunctionDef":
            return cur
    return tree.root


def _target_binds(target: AstNode, name: str) -> bool:
    if target.kind == "Name":
        return target.attr("id") == name
    if target.kind == "Tuple":
        return any(
            elt.kind == "Name" and elt.attr("id") == name for elt in target.child_nodes()
        )
    return False


def _collect_definitions(scope: AstNode, name: str) -> List[Tuple[str, AstNode]]:
    """Bindings of ``name`` in ``scope``, nested function bodies excluded."""
    defs: List[Tuple[str, AstNode]] = []
    if scope.kind == "FunctionDef":
        for param in scope.fields("param"):
            if param.attr("name") == name:
                defs.append(("param", param))
    stack = [child for fieldname, child in scope.children if fieldname != "param"]
    while stack:
        node = stack.pop()
        if node.kind == "FunctionDef" and node is not scope:
            if node.attr("name") == name:
                defs.append(("funcdef", node))
            continue
        kind = node.kind
        if kind == "Assign":
            target = node.field("target")
            if target.kind == "Name" and target.attr("id") == name:
                defs.append(("assign", node))
            elif _target_binds(target, name) and target.kind == "Tuple":
                defs.append(("tuple-assign", node))
        elif kind == "AugAssign":
            if _target_binds(node.field("target"), name):
                defs.append(("augassign", node))
        elif kind == "For":
            if _target_binds(node.field("target"), name):
                defs.append(("for", node))
        stack.extend(node.child_nodes())
    return defs


def resolve_query_text(site: VlmCallSite, tree: SyntaxTree) -> QueryText:
    """Recover the query passed at ``site``; see module docstring for the
    propagation rule."""
    arg = site.node.field("arg")
    if arg is None:
        return _UNRESOLVED_QUERY
    direct = _literal_segments(arg)
    if direct is not None:
        return QueryText(direct, DIRECT)
    if arg.kind != "Name":
        return _UNRESOLVED_QUERY
    name = arg.attr("id")
    scope = _enclosing_scope(tree, site.node)
    defs = _collect_definitions(scope, name)
    if len(defs) != 1 or defs[0][0] != "assign":
        return _UNRESOLVED_QUERY
    assign = defs[0][1]
    if assign.span is None or site.node.span is None or assign.span.offset >= site.node.span.offset:
        return _UNRESOLVED_QUERY
    segments = _literal_segments(assign.field("value"))
    if segments is None:
        return _UNRESOLVED_QUERY
    return QueryText(segments, PROPAGATED, variable=name)


def tokenize_query(query: QueryText) -> List[str]:
    """Treebank-style tokens over the query's literal segments; each hole
    contributes exactly one placeholder token."""
    if not query.resolved:
        raise ValueError("cannot tokenize an unresolved query")
    tokens: List[str] = []
    for segment in query.segments:
        if segment[0] == "text":
            tokens.extend(tokenize_text(segment[1]))
        else:
            tokens.append(HOLE_TOKEN)
    return tokens


def vlm_metrics(tree: SyntaxTree, registry: CalleeRegistry) -> VlmMetrics:
    sites = extract_call_sites(tree, registry)
    token_counts: List[int] = []
    unresolved = 0
    for site in sites:
        query = resolve_query_text(site, tree)
        site.query = query
        if query.resolved:
            token_counts.append(len(tokenize_query(query)))
        else:
            unresolved += 1
    if token_counts:
        mean = sum(token_counts) / len(token_counts)
        flagged = False
    else:
        mean = 0.0
        flagged = True
    return VlmMetrics(
        call_count=len(sites),
        token_counts=tuple(token_counts),
        token_mean=mean,
        unresolved_sites=unresolved,
        flagged=flagged,
    )
