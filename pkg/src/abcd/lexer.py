"""Tokenizer for VPLang source.

Indentation-sensitive, line-oriented lexing in the usual style: leading
whitespace is converted to balanced indent/dedent tokens, newlines inside
brackets are suppressed, and blank or comment-only lines produce no newline
token. Bracket balance itself is NOT checked here; an unclosed bracket at
end of file still lexes (a synthesized newline plus dedents are emitted) and
the parser reports the error.

Lex errors are limited to: inconsistent indentation, tabs in leading
whitespace, unterminated strings, and illegal characters (including the
characters rejected inside formatted-string holes).
"""

from __future__ import annotations

import re
from typing import List, NamedTuple, Optional

from .errors import ParseError
from .tree import Span

KEYWORDS = frozenset(
    {
        "def", "for", "in", "if", "elif", "else", "while", "return",
        "continue", "break", "pass", "and", "or", "not", "is",
        "True", "False", "None", "import",
    }
)

# Kinds, for reference: keyword identifier number string fstring-segment
# operator delimiter indent dedent newline comment.


class Token(NamedTuple):
    kind: str
    lexeme: str
    line: int
    col: int
    offset: int
    length: int
    value: object = None

    @property
    def span(self) -> Span:
        return Span(self.line, self.col, self.offset, self.length)


_TOKEN_RE = re.compile(
    r"""
    (?P<space>[\ \t]+)
  | (?P<comment>\#[^\n]*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)(?:[eE][+-]?[0-9]+)?)
  | (?P<op>\*\*|//|->|==|!=|<=|>=|\+=|-=|\*=|/=|[+\-*/%<>=])
  | (?P<delim>[()\[\]{},:.])
  | (?P<nl>\r\n|\n)
    """,
    re.VERBOSE,
)

_WS_RE = re.compile(r"[ \t]*")

_ESCAPES = {
    "\\": "\\",
    "'": "'",
    '"': '"',
    "n": "\n",
    "t": "\t",
    "r": "\r",
    "a": "\a",
    "b": "\b",
    "f": "\f",
    "v": "\v",
    "0": "\0",
}

_HEX = "0123456789abcdefABCDEF"

_OPENERS = "([{"
_CLOSERS = ")]}"


class Lexer:
    """Single-use tokenizer over one source string.

    ``fragment`` mode lexes an expression snippet (a formatted-string hole)
    with spans anchored at an absolute position; indentation and newline
    machinery are disabled there.
    """

    def __init__(
        self,
        text: str,
        *,
        line_base: int = 1,
        col_base: int = 0,
        offset_base: int = 0,
        fragment: bool = False,
    ):
        self.text = text
        self.n = len(text)
        self.pos = 0
        self.line = line_base
        self.line_start = 0
        self.col_base = col_base
        self.offset_base = offset_base
        self.fragment = fragment
        self.tokens: List[Token] = []
        self.indents = [0]
        self.depth = 0
        self.pending_newline = False
        if text.isascii():
            self._byte_of: Optional[List[int]] = None
        else:
            arr = [0] * (self.n + 1)
            total = 0
            for i, ch in enumerate(text):
                arr[i] = total
                total += 1 if ch < "\x80" else len(ch.encode("utf-8"))
            arr[self.n] = total
            self._byte_of = arr

    def run(self) -> List[Token]:
        if self.fragment:
            self._lex_logical_line()
            return self.tokens
        while self.pos < self.n:
            if self._begin_line():
                self._lex_logical_line()
        if self.pending_newline:
            self._synth("newline")
        while len(self.indents) > 1:
            self.indents.pop()
            self._synth("dedent")
        return self.tokens

    # -- position helpers ------------------------------------------------

    def _boff(self, i: int) -> int:
        if self._byte_of is None:
            return self.offset_base + i
        return self.offset_base + self._byte_of[i]

    def _col(self, i: int) -> int:
        return i - self.line_start + 1 + self.col_base

    def _fail(self, message: str, i: int, lexeme: str = "") -> None:
        raise ParseError(message, self.line, self._col(i), lexeme, phase="lex")

    def _tok(self, kind: str, s: int, e: int, value: object = None) -> None:
        # hot path: inline _boff/_col
        byte_of = self._byte_of
        if byte_of is None:
            off = self.offset_base + s
            length = e - s
        else:
            off = self.offset_base + byte_of[s]
            length = self.offset_base + byte_of[e] - off
        self.tokens.append(
            Token(
                kind,
                self.text[s:e],
                self.line,
                s - self.line_start + 1 + self.col_base,
                off,
                length,
                value,
            )
        )

    def _synth(self, kind: str) -> None:
        off = self._boff(self.n)
        self.tokens.append(Token(kind, "", self.line, self._col(self.n), off, 0))

    # -- line structure ---------------------------------------------------

    def _begin_line(self) -> bool:
        """Handle indentation at the start of a physical line.

        Returns False when the line holds no code (blank or comment-only)
        and has been consumed entirely.
        """
        text = self.text
        ws_end = _WS_RE.match(text, self.pos).end()
        lead = text[self.pos : ws_end]
        if "\t" in lead:
            self._fail("tabs in indentation", self.pos + lead.index("\t"), "\t")
        if ws_end >= self.n:
            self.pos = ws_end
            return False
        ch = text[ws_end]
        if ch == "\n" or ch == "\r":
            self._consume_newline(ws_end, emit=False)
            return False
        if ch == "#":
            nl = text.find("\n", ws_end)
            end = self.n if nl == -1 else nl
            self._tok("comment", ws_end, end)
            if nl == -1:
                self.pos = self.n
            else:
                self._consume_newline(end, emit=False)
            return False
        width = ws_end - self.pos
        top = self.indents[-1]
        if width > top:
            self.indents.append(width)
            self._tok("indent", self.pos, ws_end)
        elif width < top:
            off = self._boff(self.pos + width)
            while self.indents[-1] > width:
                self.indents.pop()
                self.tokens.append(
                    Token("dedent", "", self.line, width + 1, off, 0)
                )
            if self.indents[-1] != width:
                self._fail("inconsistent indentation", self.pos, lead)
        self.pos = ws_end
        return True

    def _consume_newline(self, i: int, emit: bool) -> None:
        end = i + 2 if self.text.startswith("\r\n", i) else i + 1
        if emit:
            self._tok("newline", i, end)
        self.pos = end
        self.line += 1
        self.line_start = end

    def _lex_logical_line(self) -> None:
        """Lex tokens through the terminating depth-0 newline (or EOF)."""
        text = self.text
        while self.pos < self.n:
            m = _TOKEN_RE.match(text, self.pos)
            if m is None:
                ch = text[self.pos]
                if ch == "'" or ch == '"':
                    self._lex_string(self.pos)
                    continue
                self._fail("illegal character", self.pos, ch)
            group = m.lastgroup
            s, e = m.start(), m.end()
            if group == "space":
                self.pos = e
            elif group == "name":
                lexeme = m.group()
                if (lexeme == "f" or lexeme == "F") and e < self.n and text[e] in "'\"":
                    self._lex_fstring(s)
                    continue
                kind = "keyword" if lexeme in KEYWORDS else "identifier"
                self._tok(kind, s, e)
                self.pos = e
                self.pending_newline = True
            elif group == "number":
                lexeme = m.group()
                if "." in lexeme or "e" in lexeme or "E" in lexeme:
                    value: object = float(lexeme)
                else:
                    value = int(lexeme)
                self._tok("number", s, e, value)
                self.pos = e
                self.pending_newline = True
            elif group == "op":
                lexeme = m.group()
                kind = "delimiter" if lexeme == "->" else "operator"
                self._tok(kind, s, e)
                self.pos = e
                self.pending_newline = True
            elif group == "delim":
                ch = m.group()
                if ch in _OPENERS:
                    self.depth += 1
                elif ch in _CLOSERS and self.depth > 0:
                    self.depth -= 1
                self._tok("delimiter", s, e)
                self.pos = e
                self.pending_newline = True
            elif group == "comment":
                self._tok("comment", s, e)
                self.pos = e
            else:  # nl
                if self.fragment:
                    self._fail("illegal character", s, "\n")
                if self.depth > 0:
                    self.pos = e
                    self.line += 1
                    self.line_start = e
                else:
                    self._consume_newline(s, emit=True)
                    self.pending_newline = False
                    return

    # -- strings -----------------------------------------------------------

    def _escape(self, i: int, line: Optional[int] = None, line_start: Optional[int] = None):
        """Decode the escape sequence starting at the backslash at ``i``."""
        text = self.text
        if line is None:
            line, line_start = self.line, self.line_start
        if i + 1 >= self.n or text[i + 1] in "\r\n":
            raise ParseError(
                "unterminated string", line, i - line_start + 1 + self.col_base, "\\", phase="lex"
            )
        c = text[i + 1]
        if c == "x":
            h = text[i + 2 : i + 4]
            if len(h) == 2 and h[0] in _HEX and h[1] in _HEX:
                return chr(int(h, 16)), i + 4
            raise ParseError(
                "malformed \\x escape", line, i - line_start + 1 + self.col_base, "\\x", phase="lex"
            )
        rep = _ESCAPES.get(c)
        if rep is not None:
            return rep, i + 2
        return "\\" + c, i + 2

    def _lex_string(self, start: int) -> None:
        text = self.text
        q = text[start]
        if text.startswith(q * 3, start):
            self._lex_triple(start, q)
            return
        i = start + 1
        buf: List[str] = []
        while True:
            if i >= self.n or text[i] in "\r\n":
                self._fail("unterminated string", start, q)
            ch = text[i]
            if ch == q:
                i += 1
                break
            if ch == "\\":
                decoded, i = self._escape(i)
                buf.append(decoded)
                continue
            buf.append(ch)
            i += 1
        self._tok("string", start, i, "".join(buf))
        self.pos = i
        self.pending_newline = True

    def _lex_triple(self, start: int, q: str) -> None:
        text = self.text
        close = q * 3
        start_line, start_col = self.line, self._col(start)
        cur_line, cur_line_start = self.line, self.line_start
        i = start + 3
        buf: List[str] = []
        while True:
            if i >= self.n:
                raise ParseError("unterminated string", start_line, start_col, close, phase="lex")
            if text.startswith(close, i):
                i += 3
                break
            ch = text[i]
            if ch == "\\":
                decoded, i = self._escape(i, cur_line, cur_line_start)
                buf.append(decoded)
                continue
            if ch == "\n":
                cur_line += 1
                cur_line_start = i + 1
            buf.append(ch)
            i += 1
        off = self._boff(start)
        self.tokens.append(
            Token("string", text[start:i], start_line, start_col, off, self._boff(i) - off, "".join(buf))
        )
        self.line, self.line_start = cur_line, cur_line_start
        self.pos = i
        self.pending_newline = True

    # -- formatted strings ---------------------------------------------------

    def _lex_fstring(self, start: int) -> None:
        """Lex ``f"..."`` into a run of fstring-segment tokens.

        Segment token values are tagged tuples sharing a group id (the byte
        offset of the ``f`` prefix) so the parser can reassemble them:
        ("text", decoded, gid), ("hole", source, line, col, offset, gid), or
        ("empty", gid) for a hole-free empty literal. Formatted strings are
        single-line; format specs, conversions, backslashes and '#' inside
        holes are rejected.
        """
        text = self.text
        q = text[start + 1]
        if text.startswith(q * 3, start + 1):
            self._fail("triple-quoted formatted strings are not supported", start, text[start : start + 4])
        gid = self._boff(start)
        segs: List[Token] = []
        buf: List[str] = []
        seg_start = start
        i = start + 2
        while True:
            if i >= self.n or text[i] in "\r\n":
                self._fail("unterminated string", start, "f" + q)
            ch = text[i]
            if ch == q:
                i += 1
                break
            if ch == "\\":
                decoded, i = self._escape(i)
                buf.append(decoded)
                continue
            if ch == "{":
                if text.startswith("{{", i):
                    buf.append("{")
                    i += 2
                    continue
                if buf:
                    self._fseg(segs, seg_start, i, ("text", "".join(buf), gid))
                    buf = []
                inner_start = i + 1
                j = self._scan_hole(inner_start, q)
                value = (
                    "hole",
                    text[inner_start:j],
                    self.line,
                    self._col(inner_start),
                    self._boff(inner_start),
                    gid,
                )
                self._fseg(segs, i, j + 1, value)
                i = j + 1
                seg_start = i
                continue
            if ch == "}":
                if text.startswith("}}", i):
                    buf.append("}")
                    i += 2
                    continue
                self._fail("single '}' in formatted string", i, "}")
            buf.append(ch)
            i += 1
        end = i
        if buf:
            self._fseg(segs, seg_start, end, ("text", "".join(buf), gid))
        if not segs:
            self._fseg(segs, start, end, ("empty", gid))
        # Widen the first and last segment spans so the run covers the
        # prefix and closing quote.
        first = segs[0]
        new_off = self._boff(start)
        segs[0] = first._replace(
            col=self._col(start), offset=new_off, length=first.offset + first.length - new_off
        )
        last = segs[-1]
        segs[-1] = last._replace(length=self._boff(end) - last.offset)
        self.tokens.extend(segs)
        self.pos = end
        self.pending_newline = True

    def _fseg(self, segs: List[Token], s: int, e: int, value: tuple) -> None:
        off = self._boff(s)
        segs.append(
            Token("fstring-segment", self.text[s:e], self.line, self._col(s), off, self._boff(e) - off, value)
        )

    def _scan_hole(self, start: int, q: str) -> int:
        """Find the '}' closing the hole whose body starts at ``start``."""
        text = self.text
        other = "'" if q == '"' else '"'
        depth = 0
        i = start
        while i < self.n and text[i] not in "\r\n":
            ch = text[i]
            if ch == "\\":
                self._fail("backslash in formatted-string hole", i, "\\")
            if ch == "#":
                self._fail("'#' in formatted-string hole", i, "#")
            if ch == q:
                self._fail("quote character in formatted-string hole", i, q)
            if ch == other:
                j = i + 1
                while j < self.n and text[j] not in "\r\n" and text[j] != other:
                    if text[j] == "\\":
                        self._fail("backslash in formatted-string hole", j, "\\")
                    j += 1
                if j >= self.n or text[j] in "\r\n":
                    self._fail("unterminated string", i, other)
                i = j + 1
                continue
            if ch in _OPENERS:
                depth += 1
            elif ch in _CLOSERS:
                if ch == "}" and depth == 0:
                    if not text[start:i].strip():
                        self._fail("empty formatted-string hole", start, "{}")
                    return i
                depth -= 1
            elif depth == 0:
                if ch == ":":
                    self._fail("format specs in formatted-string holes are not supported", i, ":")
                if ch == "!" and (i + 1 >= self.n or text[i + 1] != "="):
                    self._fail("conversions in formatted-string holes are not supported", i, "!")
            i += 1
        self._fail("unterminated string", start - 1, "{")
        raise AssertionError("unreachable")


def tokenize_source(text: str) -> List[Token]:
    """Tokenize a whole program. Raises ParseError (phase=lex) on bad input."""
    return Lexer(text).run()


def tokenize_fragment(text: str, line: int, col: int, offset: int) -> List[Token]:
    """Tokenize a formatted-string hole body with spans anchored at its
    absolute source position."""
    return Lexer(text, line_base=line, col_base=col - 1, offset_base=offset, fragment=True).run()
