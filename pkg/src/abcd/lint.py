"""Lint checks for the documented VP API surface.

The linter knows three receiver roles and how programs acquire them:

* ``segment``: result of calling the segment constructor (``VideoSegment``).
* ``frame``: loop target when iterating ``segment.frame_iterator()``,
  with an optional ``enumerate(...)`` wrapper unwrapped.
* ``patch``: loop target when iterating ``frame.find(...)``.

Method calls on a tracked name are checked against the role's method set.
Everything else (subscripted receivers, untracked locals, chained calls)
is deliberately ignored: the linter flags definite misuse, not unknowns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from abcd.tree import AstNode, Span, SyntaxTree, iter_nodes

SEVERITY_WARN = "warn"
SEVERITY_ERROR = "error"

RULE_ENTRY_POINT = "entry-point"
RULE_UNKNOWN_METHOD = "unknown-method"
RULE_UNRETURNED_ANSWER = "unreturned-answer"


@dataclass(frozen=True)
class ApiSpec:
    """The callable surface of the VP runtime, as the linter understands it.

    Defaults transcribe the documented API. Each field is overridable so a
    different runtime (or a stricter subset) can be linted from config.
    """

    constructor: str = "VideoSegment"
    segment_methods: FrozenSet[str] = frozenset(
        {"frame_iterator", "face_identify", "select_answer"}
    )
    frame_methods: FrozenSet[str] = frozenset({"find", "simple_query", "llm_query"})
    patch_methods: FrozenSet[str] = frozenset({"simple_query", "llm_query"})
    frame_source: str = "frame_iterator"
    patch_source: str = "find"
    entry_name: str = "execute_command"
    entry_arity: int = 4
    answer_method: str = "select_answer"

    @classmethod
    def default(cls) -> "ApiSpec":
        return cls()

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, object]) -> "ApiSpec":
        """Build a spec from a parsed config mapping.

        Set-valued fields accept any iterable of strings; unknown keys are
        rejected so config typos surface immediately.
        """
        kwargs: Dict[str, object] = {}
        set_fields = {"segment_methods", "frame_methods", "patch_methods"}
        valid = {f for f in cls.__dataclass_fields__}
        for key, value in mapping.items():
            if key not in valid:
                raise ValueError(f"unknown api_spec field: {key!r}")
            if key in set_fields:
                value = frozenset(str(v) for v in value)  # type: ignore[union-attr]
            kwargs[key] = value
        return cls(**kwargs)  # type: ignore[arg-type]

    def methods_for(self, role: str) -> FrozenSet[str]:
        if role == "segment":
            return self.segment_methods
        if role == "frame":
            return self.frame_methods
        if role == "patch":
            return self.patch_methods
        raise ValueError(f"unknown receiver role: {role!r}")


@dataclass(frozen=True)
class LintFinding:
    rule: str
    severity: str
    message: str
    span: Optional[Span]

    def __str__(self) -> str:
        where = ""
        if self.span is not None:
            where = f"line {self.span.line}, col {self.span.col}: "
        return f"{self.severity}[{self.rule}] {where}{self.message}"


@dataclass
class _Walker:
    """Single lexical-order pass that tracks receiver roles."""

    spec: ApiSpec
    findings: List[LintFinding] = field(default_factory=list)
    env: Dict[str, str] = field(default_factory=dict)

    def walk(self, node: AstNode) -> None:
        kind = node.kind
        if kind == "Assign":
            target, value = node.child_nodes()
            self.walk(value)
            self._bind_assign(target, value)
            return
        if kind == "AugAssign":
            target, value = node.child_nodes()
            self.walk(value)
            self._drop(target)
            return
        if kind == "For":
            children = node.children
            target = children[0][1]
            iterable = children[1][1]
            self.walk(iterable)
            self._bind_loop(target, iterable)
            for label, child in children[2:]:
                self.walk(child)
            return
        if kind == "Call":
            self._check_call(node)
        for child in node.child_nodes():
            self.walk(child)

    # -- binding ------------------------------------------------------

    def _bind_assign(self, target: AstNode, value: AstNode) -> None:
        if target.kind == "Name" and self._is_constructor_call(value):
            self.env[target.attr("id")] = "segment"
            return
        self._drop(target)

    def _bind_loop(self, target: AstNode, iterable: AstNode) -> None:
        role = self._iterated_role(iterable)
        bound = target
        if role is not None and target.kind == "Tuple":
            # enumerate-style unpacking binds the element last
            elts = tuple(target.child_nodes())
            bound = elts[-1] if elts else target
        if role is not None and bound.kind == "Name":
            self._drop(target)
            self.env[bound.attr("id")] = role
            return
        self._drop(target)

    def _drop(self, target: AstNode) -> None:
        """Rebinding a tracked name to anything unrecognized ends tracking."""
        if target.kind == "Name":
            self.env.pop(target.attr("id"), None)
        elif target.kind == "Tuple":
            for elt in target.child_nodes():
                self._drop(elt)

    def _is_constructor_call(self, node: AstNode) -> bool:
        if node.kind != "Call":
            return False
        func = node.field("func")
        return func is not None and func.kind == "Name" and func.attr("id") == self.spec.constructor

    def _iterated_role(self, iterable: AstNode) -> Optional[str]:
        node = iterable
        if (
            node.kind == "Call"
            and (func := node.field("func")) is not None
            and func.kind == "Name"
            and func.attr("id") == "enumerate"
        ):
            args = [child for label, child in node.children if label == "arg"]
            if len(args) != 1:
                return None
            node = args[0]
        if node.kind != "Call":
            return None
        func = node.field("func")
        if func is None or func.kind != "Attribute":
            return None
        receiver = func.field("value")
        if receiver is None or receiver.kind != "Name":
            return None
        role = self.env.get(receiver.attr("id"))
        method = func.attr("attr")
        if role == "segment" and method == self.spec.frame_source:
            return "frame"
        if role == "frame" and method == self.spec.patch_source:
            return "patch"
        return None

    # -- checking -----------------------------------------------------

    def _check_call(self, call: AstNode) -> None:
        func = call.field("func")
        if func is None or func.kind != "Attribute":
            return
        receiver = func.field("value")
        if receiver is None or receiver.kind != "Name":
            return
        role = self.env.get(receiver.attr("id"))
        if role is None:
            return
        method = func.attr("attr")
        if method not in self.spec.methods_for(role):
            self.findings.append(
                LintFinding(
                    rule=RULE_UNKNOWN_METHOD,
                    severity=SEVERITY_ERROR,
                    message=(
                        f"'{method}' is not a documented {role} method"
                        f" (receiver '{receiver.attr('id')}')"
                    ),
                    span=func.span,
                )
            )


def _check_entry_point(tree: SyntaxTree, spec: ApiSpec, findings: List[LintFinding]) -> None:
    candidates = [
        node
        for node in tree.root.child_nodes()
        if node.kind == "FunctionDef" and node.attr("name") == spec.entry_name
    ]
    if not candidates:
        findings.append(
            LintFinding(
                rule=RULE_ENTRY_POINT,
                severity=SEVERITY_ERROR,
                message=f"no top-level function named '{spec.entry_name}'",
                span=tree.root.span,
            )
        )
        return
    for node in candidates:
        arity = sum(1 for label, child in node.children if label == "param")
        if arity != spec.entry_arity:
            findings.append(
                LintFinding(
                    rule=RULE_ENTRY_POINT,
                    severity=SEVERITY_ERROR,
                    message=(
                        f"'{spec.entry_name}' takes {arity} parameters,"
                        f" expected {spec.entry_arity}"
                    ),
                    span=node.span,
                )
            )


def _returned_names(tree: SyntaxTree) -> FrozenSet[str]:
    names = set()
    for node in iter_nodes(tree.root):
        if node.kind != "Return":
            continue
        for child in node.child_nodes():
            for sub in iter_nodes(child):
                if sub.kind == "Name":
                    names.add(sub.attr("id"))
    return frozenset(names)


def _is_answer_call(node: AstNode, spec: ApiSpec) -> bool:
    if node.kind != "Call":
        return False
    func = node.field("func")
    return func is not None and func.kind == "Attribute" and func.attr("attr") == spec.answer_method


def _check_unreturned_answer(
    tree: SyntaxTree, spec: ApiSpec, findings: List[LintFinding]
) -> None:
    returned = _returned_names(tree)
    for node in iter_nodes(tree.root):
        if node.kind == "Assign":
            target, value = node.child_nodes()
            if not _is_answer_call(value, spec):
                continue
            targets: Tuple[AstNode, ...]
            targets = tuple(target.child_nodes()) if target.kind == "Tuple" else (target,)
            names = [t.attr("id") for t in targets if t.kind == "Name"]
            if names and not any(name in returned for name in names):
                findings.append(
                    LintFinding(
                        rule=RULE_UNRETURNED_ANSWER,
                        severity=SEVERITY_WARN,
                        message=(
                            f"result of '{spec.answer_method}' is bound to"
                            f" {', '.join(repr(n) for n in names)} but never returned"
                        ),
                        span=node.span,
                    )
                )
        elif node.kind == "ExprStmt":
            value = next(iter(node.child_nodes()))
            if _is_answer_call(value, spec):
                findings.append(
                    LintFinding(
                        rule=RULE_UNRETURNED_ANSWER,
                        severity=SEVERITY_WARN,
                        message=f"result of '{spec.answer_method}' is discarded",
                        span=node.span,
                    )
                )


def lint_api_usage(tree: SyntaxTree, api_spec: Optional[ApiSpec] = None) -> List[LintFinding]:
    """Check a parsed program against the documented VP API surface.

    Returns findings in source order per rule family: entry-point problems
    first, then unknown-method findings in lexical order, then
    unreturned-answer warnings. An empty list means the program is clean.
    """
    spec = api_spec if api_spec is not None else ApiSpec.default()
    findings: List[LintFinding] = []
    _check_entry_point(tree, spec, findings)
    walker = _Walker(spec)
    walker.walk(tree.root)
    findings.extend(walker.findings)
    _check_unreturned_answer(tree, spec, findings)
    return findings
