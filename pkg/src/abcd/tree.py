"""Core syntax-tree data model.

The tree is deliberately small: a closed set of node kinds, ordered child
edges labelled with field names, and primitive attributes. Everything the
metrics layer consumes is derived from this structure alone.
"""

from __future__ import annotations

from typing import Iterator, NamedTuple, Optional, Union

KIND_ENUM_VERSION = 1

# Closed set of node kinds. Adding a kind is a schema change and must bump
# KIND_ENUM_VERSION.
NODE_KINDS = frozenset(
    {
        "Module",
        "FunctionDef",
        "Parameter",
        "For",
        "If",
        "While",
        "Assign",
        "AugAssign",
        "Return",
        "Continue",
        "Break",
        "Pass",
        "ExprStmt",
        "Call",
        "Attribute",
        "Subscript",
        "Name",
        "Constant",
        "StringLiteral",
        "FormattedString",
        "FormatHole",
        "Dict",
        "List",
        "Tuple",
        "BinOp",
        "BoolOp",
        "UnaryOp",
        "Compare",
        "Keyword",
        "Slice",
    }
)

AttrValue = Union[str, int, float, bool, None]


class Span(NamedTuple):
    """Source extent of a node or token.

    line/col are 1-based and measured in characters; offset/length are
    measured in bytes of the UTF-8 source.
    """

    line: int
    col: int
    offset: int
    length: int


class AstNode:
    """One tree node: a kind, named attributes, and labelled children.

    ``attrs`` and ``children`` are tuples of pairs so the node is cheap and
    the ordering is part of the value. Attribute pairs come before child
    pairs in every serialized form.
    """

    __slots__ = ("kind", "attrs", "children", "span")

    def __init__(
        self,
        kind: str,
        attrs: tuple = (),
        children: tuple = (),
        span: Optional[Span] = None,
    ):
        self.kind = kind
        self.attrs = attrs  # tuple[(name, AttrValue), ...]
        self.children = children  # tuple[(field, AstNode), ...]
        self.span = span

    def attr(self, name: str, default: AttrValue = None) -> AttrValue:
        for key, value in self.attrs:
            if key == name:
                return value
        return default

    def child_nodes(self) -> Iterator["AstNode"]:
        for _, node in self.children:
            yield node

    def fields(self, field: str) -> Iterator["AstNode"]:
        """Children reached through edges labelled ``field``, in order."""
        for name, node in self.children:
            if name == field:
                yield node

    def field(self, field: str) -> Optional["AstNode"]:
        """The unique child labelled ``field``, or None."""
        for name, node in self.children:
            if name == field:
                return node
        return None

    def __repr__(self) -> str:
        return f"AstNode({self.kind!r}, attrs={self.attrs!r}, children={len(self.children)})"


def iter_nodes(root: AstNode) -> Iterator[AstNode]:
    """Pre-order traversal, children visited in field order.

    Iterative: generated programs can nest deeply enough to make recursion a
    liability.
    """
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        # Push in reverse so the leftmost child is visited first.
        children = node.children
        for i in range(len(children) - 1, -1, -1):
            stack.append(children[i][1])


def nodes_equal(a: AstNode, b: AstNode) -> bool:
    """Structural equality: kinds, attrs, field labels. Spans are ignored."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x.kind != y.kind or x.attrs != y.attrs:
            return False
        if len(x.children) != len(y.children):
            return False
        for (fx, cx), (fy, cy) in zip(x.children, y.children):
            if fx != fy:
                return False
            stack.append((cx, cy))
    return True


class SyntaxTree:
    """A parsed program: the root Module node plus cached totals."""

    __slots__ = ("root", "source", "_node_count")

    def __init__(self, root: AstNode, source: Optional["SourceProgram"] = None):
        self.root = root
        self.source = source
        self._node_count: Optional[int] = None

    @property
    def node_count(self) -> int:
        if self._node_count is None:
            count = 0
            for _ in iter_nodes(self.root):
                count += 1
            self._node_count = count
        return self._node_count

    def __iter__(self) -> Iterator[AstNode]:
        return iter_nodes(self.root)


class SourceProgram:
    """Source text paired with identity, for corpus bookkeeping."""

    __slots__ = ("source", "path", "program_id")

    def __init__(self, source: str, path: str = "<string>", program_id: Optional[str] = None):
        self.source = source
        self.path = path
        self.program_id = program_id if program_id is not None else path
