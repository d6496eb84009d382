#!/usr/bin/env python3
"""Reference-AST oracle.

Builds the expected tree shape for a source file using only the standard
library's ast module, then renders the same one-line sexpr format the
toolkit documents and reports a node count. Used by tests as the second,
independent route to the same numbers; it must never import the abcd
package.

Normalization applied to the stdlib tree (mirrors the documented model):

* context markers (Load/Store/Del) and location fields are dropped;
* the arguments container is dissolved: each positional arg becomes a
  Parameter child; decorators, defaults, varargs and annotations on
  parameters are rejected;
* plain `import` statements are dropped wherever they appear in a body;
* string constants become StringLiteral, JoinedStr becomes FormattedString,
  FormattedValue becomes FormatHole (conversion/format-spec must be absent);
* operator objects become their surface symbols, stored as attributes;
* anything outside the supported construct set raises OracleUnsupported.
"""

from __future__ import annotations

import argparse
import ast
import json
import re
import sys
from typing import List, Tuple

Node = Tuple[str, tuple, tuple]  # (kind, attrs, children)


class OracleUnsupported(Exception):
    """Construct outside the modeled grammar subset."""


_BINOPS = {
    ast.Add: "+",
    ast.Sub: "-",
    ast.Mult: "*",
    ast.Div: "/",
    ast.FloorDiv: "//",
    ast.Mod: "%",
    ast.Pow: "**",
}

_UNARYOPS = {ast.Not: "not", ast.USub: "-", ast.UAdd: "+"}

_BOOLOPS = {ast.And: "and", ast.Or: "or"}

_CMPOPS = {
    ast.Eq: "==",
    ast.NotEq: "!=",
    ast.Lt: "<",
    ast.LtE: "<=",
    ast.Gt: ">",
    ast.GtE: ">=",
    ast.In: "in",
    ast.NotIn: "not in",
    ast.Is: "is",
    ast.IsNot: "is not",
}


def _body(stmts) -> tuple:
    out = []
    for stmt in stmts:
        if isinstance(stmt, ast.Import):
            continue
        out.append(_map(stmt))
    return tuple(out)


def _map(node) -> Node:
    if isinstance(node, ast.Module):
        return ("Module", (), _body(node.body))

    if isinstance(node, ast.FunctionDef):
        if node.decorator_list:
            raise OracleUnsupported("decorators")
        a = node.args
        if a.posonlyargs or a.kwonlyargs or a.vararg or a.kwarg or a.defaults or a.kw_defaults:
            raise OracleUnsupported("non-positional parameters or defaults")
        children: List[Node] = []
        for arg in a.args:
            if arg.annotation is not None:
                raise OracleUnsupported("parameter annotations")
            children.append(("Parameter", (("name", arg.arg),), ()))
        if node.returns is not None:
            children.append(_map(node.returns))
        children.extend(_body(node.body))
        return ("FunctionDef", (("name", node.name),), tuple(children))

    if isinstance(node, ast.For):
        if node.orelse:
            raise OracleUnsupported("for-else")
        children = [_map(node.target), _map(node.iter)]
        children.extend(_body(node.body))
        return ("For", (), tuple(children))

    if isinstance(node, ast.If):
        children = [_map(node.test)]
        children.extend(_body(node.body))
        children.extend(_body(node.orelse))
        return ("If", (), tuple(children))

    if isinstance(node, ast.While):
        if node.orelse:
            raise OracleUnsupported("while-else")
        children = [_map(node.test)]
        children.extend(_body(node.body))
        return ("While", (), tuple(children))

    if isinstance(node, ast.Assign):
        if len(node.targets) != 1:
            raise OracleUnsupported("chained assignment")
        return ("Assign", (), (_map(node.targets[0]), _map(node.value)))

    if isinstance(node, ast.AugAssign):
        sym = _BINOPS.get(type(node.op))
        if sym not in ("+", "-", "*", "/"):
            raise OracleUnsupported(f"augmented op {type(node.op).__name__}")
        return ("AugAssign", (("op", sym),), (_map(node.target), _map(node.value)))

    if isinstance(node, ast.Return):
        if node.value is None:
            return ("Return", (), ())
        return ("Return", (), (_map(node.value),))

    if isinstance(node, ast.Expr):
        return ("ExprStmt", (), (_map(node.value),))

    if isinstance(node, ast.Pass):
        return ("Pass", (), ())
    if isinstance(node, ast.Break):
        return ("Break", (), ())
    if isinstance(node, ast.Continue):
        return ("Continue", (), ())

    if isinstance(node, ast.Call):
        children = [_map(node.func)]
        for arg in node.args:
            if isinstance(arg, ast.Starred):
                raise OracleUnsupported("starred argument")
            children.append(_map(arg))
        kw_children = []
        for kw in node.keywords:
            if kw.arg is None:
                raise OracleUnsupported("** argument")
            kw_children.append(("Keyword", (("name", kw.arg),), (_map(kw.value),)))
        children.extend(kw_children)
        return ("Call", (), tuple(children))

    if isinstance(node, ast.Attribute):
        return ("Attribute", (("attr", node.attr),), (_map(node.value),))

    if isinstance(node, ast.Subscript):
        return ("Subscript", (), (_map(node.value), _map(node.slice)))

    if isinstance(node, ast.Slice):
        children = []
        for part in (node.lower, node.upper, node.step):
            if part is not None:
                children.append(_map(part))
        return ("Slice", (), tuple(children))

    if isinstance(node, ast.Name):
        return ("Name", (("id", node.id),), ())

    if isinstance(node, ast.Constant):
        value = node.value
        if isinstance(value, str):
            return ("StringLiteral", (("value", value),), ())
        if value is None or isinstance(value, (bool, int, float)):
            return ("Constant", (("value", value),), ())
        raise OracleUnsupported(f"constant of type {type(value).__name__}")

    if isinstance(node, ast.JoinedStr):
        children = []
        for part in node.values:
            if isinstance(part, ast.Constant):
                if not isinstance(part.value, str):
                    raise OracleUnsupported("non-string text in formatted string")
                children.append(("StringLiteral", (("value", part.value),), ()))
            elif isinstance(part, ast.FormattedValue):
                if part.conversion != -1 or part.format_spec is not None:
                    raise OracleUnsupported("conversion or format spec in formatted string")
                children.append(("FormatHole", (), (_map(part.value),)))
            else:
                raise OracleUnsupported(type(part).__name__)
        return ("FormattedString", (), tuple(children))

    if isinstance(node, ast.Dict):
        children = []
        for key, value in zip(node.keys, node.values):
            if key is None:
                raise OracleUnsupported("** in dict literal")
            children.append(_map(key))
            children.append(_map(value))
        return ("Dict", (), tuple(children))

    if isinstance(node, ast.List):
        return ("List", (), tuple(_map(e) for e in node.elts))

    if isinstance(node, ast.Tuple):
        return ("Tuple", (), tuple(_map(e) for e in node.elts))

    if isinstance(node, ast.BinOp):
        sym = _BINOPS.get(type(node.op))
        if sym is None:
            raise OracleUnsupported(f"operator {type(node.op).__name__}")
        return ("BinOp", (("op", sym),), (_map(node.left), _map(node.right)))

    if isinstance(node, ast.BoolOp):
        sym = _BOOLOPS[type(node.op)]
        return ("BoolOp", (("op", sym),), tuple(_map(v) for v in node.values))

    if isinstance(node, ast.UnaryOp):
        sym = _UNARYOPS.get(type(node.op))
        if sym is None:
            raise OracleUnsupported(f"operator {type(node.op).__name__}")
        return ("UnaryOp", (("op", sym),), (_map(node.operand),))

    if isinstance(node, ast.Compare):
        attrs = []
        for op in node.ops:
            sym = _CMPOPS.get(type(op))
            if sym is None:
                raise OracleUnsupported(f"comparison {type(op).__name__}")
            attrs.append(("op", sym))
        children = [_map(node.left)] + [_map(c) for c in node.comparators]
        return ("Compare", tuple(attrs), tuple(children))

    raise OracleUnsupported(type(node).__name__)


def expected_tree(source: str) -> Node:
    """Parse with the stdlib and normalize. Raises SyntaxError or
    OracleUnsupported."""
    return _map(ast.parse(source))


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _render_value(value) -> str:
    if value is None or isinstance(value, (bool, int, float)):
        return repr(value)
    if isinstance(value, str) and _IDENT_RE.match(value):
        return value
    return json.dumps(value, ensure_ascii=False)


def render_sexpr(node: Node) -> str:
    kind, attrs, children = node
    parts = [kind]
    parts.extend(f"{name}={_render_value(value)}" for name, value in attrs)
    head = " ".join(parts)
    if not children:
        return f"({head})"
    rendered = " ".join(render_sexpr(c) for c in children)
    return f"({head} {rendered})"


def count_nodes(node: Node) -> int:
    total = 1
    for child in node[2]:
        total += count_nodes(child)
    return total


def main() -> int:
    parser = argparse.ArgumentParser(description="Independent AST oracle for fixture comparison.")
    parser.add_argument("files", nargs="+", help="source files to analyze")
    parser.add_argument("--sexpr", action="store_true", help="print the sexpr dump per file")
    args = parser.parse_args()
    status = 0
    for path in args.files:
        try:
            with open(path, encoding="utf-8") as handle:
                tree = expected_tree(handle.read())
        except (SyntaxError, OracleUnsupported) as exc:
            print(f"{path}: REJECTED ({exc})", file=sys.stderr)
            status = 1
            continue
        if args.sexpr:
            print(f"{path}\t{count_nodes(tree)}\t{render_sexpr(tree)}")
        else:
            print(f"{path}\t{count_nodes(tree)}")
    return status


if __name__ == "__main__":
    raise SystemExit(main())
