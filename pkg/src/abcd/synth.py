"""Seeded generator of in-grammar programs.

Used by the property and performance tests: every generated program is
guaranteed to be inside the grammar (it exercises functions, loops,
conditionals, f-strings, dict/list literals, slices, and the VP call
surface), and generation is a pure function of the seed, so corpora
built from seeds are reproducible anywhere.

The output is also syntactically valid in the host language, which lets
tests cross-check generated programs against the reference-AST oracle,
not just hand-written fixtures.
"""

from __future__ import annotations

import re
from typing import List, Optional

from abcd.rng import SplitMix64

# operand shapes that never need parentheses: names, numbers, plain strings
_SAFE_OPERAND = re.compile(r'(?:[A-Za-z_][A-Za-z0-9_]*|[0-9]+(?:\.[0-9]+)?|"[^"]*")\Z')


def _wrap(text: str) -> str:
    """Parenthesize composite operands so precedence can never bite."""
    return text if _SAFE_OPERAND.match(text) else f"({text})"

QUERY_POOL = (
    "What is this person doing?",
    "Is there any negative event happening in the scene?",
    "What's happening in the scene",
    "Please describe his/her action in the scene",
    "What is it doing?",
    "Is the person visible in the frame?",
    "How many people appear here?",
    "Does the scene look dangerous?",
)

_LABELS = ("events", "actions", "people", "notes", "scores")
_ATTRS = ("size", "score", "label", "start", "stop")


class _Gen:
    def __init__(self, seed: int, target_lines: int):
        self.rng = SplitMix64(seed)
        self.out: List[str] = []
        self.target = target_lines
        self.counter = 0

    # -- randomness helpers --------------------------------------------

    def chance(self, percent: int) -> bool:
        return self.rng.below(100) < percent

    def pick(self, items):
        return items[self.rng.below(len(items))]

    def fresh(self, prefix: str = "v") -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def emit(self, indent: int, text: str) -> None:
        self.out.append("    " * indent + text)

    @property
    def full(self) -> bool:
        return len(self.out) >= self.target

    # -- expressions ----------------------------------------------------

    def atom(self, names: List[str]) -> str:
        roll = self.rng.below(10)
        if roll < 4 and names:
            return self.pick(names)
        if roll < 6:
            return str(self.rng.below(20))
        if roll < 7:
            return f"{self.rng.below(9)}.{self.rng.below(10)}"
        if roll < 9:
            return '"' + self.pick(_LABELS) + '"'
        return self.pick(("True", "False", "None"))

    def fstring(self, names: List[str]) -> str:
        hole = self.pick(names) if names else str(self.rng.below(10))
        if names and self.chance(30):
            hole = f"len({self.pick(names)})"
        label = self.pick(_LABELS)
        if self.chance(25):
            return f'f"{label} {{{hole}}} of {{{hole}}}"'
        return f'f"{label} {{{hole}}}"'

    def call(self, names: List[str], depth: int) -> str:
        roll = self.rng.below(10)
        if roll < 3:
            return f"len({self.atom(names)})"
        if roll < 5:
            return f"range({self.rng.below(9) + 1})"
        if roll < 7 and names:
            obj = self.pick(names)
            return f"{obj}.{self.pick(_ATTRS)}({self.expr(names, depth - 1)})"
        if roll < 9 and names:
            key = '"' + self.pick(_LABELS) + '"'
            return f"{self.pick(names)}.get({key}, None)"
        return f"max({self.expr(names, depth - 1)}, {self.rng.below(10)})"

    def expr(self, names: List[str], depth: int = 2) -> str:
        if depth <= 0 or self.chance(30):
            return self.atom(names)
        roll = self.rng.below(100)
        a = _wrap(self.expr(names, depth - 1))
        b = _wrap(self.expr(names, depth - 1))
        if roll < 22:
            return f"{a} {self.pick(('+', '-', '*'))} {b}"
        if roll < 34:
            return f"{a} {self.pick(('<', '<=', '==', '!=', '>'))} {b}"
        if roll < 44:
            return f"{a} {self.pick(('and', 'or'))} {b}"
        if roll < 50:
            return f"not {a}"
        if roll < 62:
            return self.call(names, depth)
        if roll < 70:
            return self.fstring(names)
        if roll < 78 and names:
            container = self.pick(names)
            if self.chance(40):
                lo, hi = self.rng.below(3), self.rng.below(5) + 3
                return f"{container}[{lo}:{hi}]"
            return f'{container}["{self.pick(_LABELS)}"]'
        if roll < 86:
            return f"[{a}, {b}]"
        if roll < 93:
            return f'{{"{self.pick(_LABELS)}": {a}}}'
        return f"({a}, {b})"

    # -- statements -----------------------------------------------------

    def suite(self, indent: int, names: List[str], loop_depth: int, budget: int) -> None:
        count = max(1, min(budget, 1 + self.rng.below(4)))
        emitted = 0
        for _ in range(count):
            if emitted and self.full:
                break
            self.stmt(indent, names, loop_depth, budget)
            emitted += 1

    def stmt(self, indent: int, names: List[str], loop_depth: int, budget: int) -> None:
        nested_ok = indent < 5 and budget > 3 and not self.full
        roll = self.rng.below(100)
        if roll < 30:
            name = self.fresh()
            self.emit(indent, f"{name} = {self.expr(names)}")
            names.append(name)
        elif roll < 40 and names:
            self.emit(
                indent,
                f"{self.pick(names)} {self.pick(('+=', '-=', '*='))} {self.expr(names, 1)}",
            )
        elif roll < 48 and names:
            key = self.fstring(names) if self.chance(35) else '"' + self.pick(_LABELS) + '"'
            self.emit(indent, f"{self.pick(names)}[{key}] = {self.expr(names, 1)}")
        elif roll < 56:
            self.emit(indent, f"{self.expr(names, 1)}")
        elif roll < 72 and nested_ok:
            self.emit(indent, f"if {self.expr(names)}:")
            inner = list(names)
            self.suite(indent + 1, inner, loop_depth, budget // 2)
            if self.chance(30):
                self.emit(indent, f"elif {self.expr(names, 1)}:")
                self.suite(indent + 1, list(names), loop_depth, budget // 3)
            if self.chance(45):
                self.emit(indent, "else:")
                self.suite(indent + 1, list(names), loop_depth, budget // 3)
        elif roll < 86 and nested_ok:
            var = self.fresh("i")
            if self.chance(30):
                second = self.fresh("x")
                source = self.pick(names) if names and self.chance(50) else f"range({self.rng.below(6) + 2})"
                self.emit(indent, f"for {var}, {second} in enumerate({source}):")
                inner = list(names) + [var, second]
            else:
                self.emit(indent, f"for {var} in range({self.rng.below(6) + 2}):")
                inner = list(names) + [var]
            self.suite(indent + 1, inner, loop_depth + 1, budget // 2)
        elif roll < 92 and nested_ok:
            guard = self.fresh("n")
            self.emit(indent, f"{guard} = {self.rng.below(5) + 1}")
            self.emit(indent, f"while {guard} > 0:")
            inner = list(names) + [guard]
            self.suite(indent + 1, inner, loop_depth + 1, budget // 2)
            self.emit(indent + 1, f"{guard} -= 1")
        elif roll < 96 and loop_depth > 0:
            self.emit(indent, f"if {self.expr(names, 1)}:")
            self.emit(indent + 1, self.pick(("continue", "break")))
        else:
            self.emit(indent, "pass")

    # -- program shape ----------------------------------------------------

    def comment(self, indent: int, text: str) -> None:
        self.emit(indent, f"# {text}")

    def entry_function(self) -> None:
        self.comment(0, "Inspect the segment frame by frame and collect evidence.")
        self.emit(0, "def execute_command(video, annotation, possible_answers, query):")
        self.emit(1, "segment = VideoSegment(video, annotation)")
        self.emit(1, 'info = {"events": {}, "actions": []}')
        names = ["segment", "info", "video", "annotation", "possible_answers", "query"]
        self.emit(1, "for i, frame in enumerate(segment.frame_iterator()):")
        loop_names = names + ["i", "frame"]
        query_var = self.fresh("q")
        mode = self.rng.below(3)
        if mode == 0:
            self.emit(2, f'{query_var} = "{self.pick(QUERY_POOL)}"')
            self.emit(2, f"seen = frame.simple_query({query_var})")
        elif mode == 1:
            self.emit(2, f'{query_var} = f"{self.pick(_LABELS)} {{i}} in view"')
            self.emit(2, f"seen = frame.llm_query({query_var}, to_yesno=True)")
        else:
            self.emit(2, f'seen = frame.simple_query("{self.pick(QUERY_POOL)}")')
        loop_names.append("seen")
        self.emit(2, 'if "yes" in seen:')
        self.emit(3, f'info["events"][f"{{i}} frame"] = seen')
        body_budget = max(4, (self.target - len(self.out) - 6) // 2)
        self.suite(2, loop_names, 1, body_budget)
        if self.chance(50):
            self.comment(1, "fold the per-frame evidence into one answer")
        self.emit(1, "answer, reason = segment.select_answer(info, query, possible_answers)")
        self.emit(1, "return answer, reason, info")

    def helper_function(self) -> None:
        name = self.fresh("helper")
        params = ["data"]
        if self.chance(50):
            params.append("limit")
        self.emit(0, f"def {name}({', '.join(params)}):")
        names = list(params)
        self.suite(1, names, 0, max(3, (self.target - len(self.out)) // 2))
        self.emit(1, f"return {self.expr(names, 1)}")

    def run(self) -> str:
        self.entry_function()
        while not self.full:
            self.emit(0, "")
            if self.chance(40):
                self.helper_function()
            else:
                names: List[str] = ["info"]
                self.emit(0, f"info = {self.expr([], 1)}")
                self.suite(0, names, 0, max(2, (self.target - len(self.out))))
        return "\n".join(self.out) + "\n"


def generate_program(seed: int, target_lines: int = 40) -> str:
    """Deterministic in-grammar program of roughly ``target_lines`` lines."""
    if target_lines < 1:
        raise ValueError("target_lines must be positive")
    return _Gen(seed, target_lines).run()
