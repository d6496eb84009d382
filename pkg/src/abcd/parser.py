"""Recursive-descent parser for VPLang.

Grammar (statements):

    module     : stmt* EOF
    stmt       : simple NEWLINE | funcdef | for | if | while
    simple     : pass | break | continue | return [testlist]
               | import dotted (, dotted)*          # no-op, produces no node
               | testlist ('=' testlist | AUGOP testlist)?
    suite      : NEWLINE INDENT stmt+ DEDENT | simple NEWLINE

Expressions, loosest to tightest:

    testlist   : or (',' or)* [',']                 # bare tuple
    or         : and ('or' and)*                    # chains collapse
    and        : not ('and' not)*
    not        : 'not' not | comparison
    comparison : arith (compop arith)*              # chained comparisons
    arith      : term (('+'|'-') term)*
    term       : factor (('*'|'/'|'//'|'%') factor)*
    factor     : ('-'|'+') factor | power
    power      : postfix ['**' factor]              # right-associative
    postfix    : atom ('(' args ')' | '[' index ']' | '.' NAME)*
    atom       : NAME | NUMBER | STRING | FSTRING | True | False | None
               | '(' [testlist] ')' | '[' items ']' | '{' pairs '}'

Every construct outside this grammar raises ParseError; no partial trees.
"""

from __future__ import annotations

from typing import List, Optional, Tuple as TTuple

from .errors import ParseError
from .lexer import Token, tokenize_fragment, tokenize_source
from .tree import AstNode, SourceProgram, Span, SyntaxTree

_AUG_OPS = {"+=": "+", "-=": "-", "*=": "*", "/=": "/"}
_COMPARE_OPS = frozenset({"==", "!=", "<", "<=", ">", ">="})
_TERM_OPS = frozenset({"*", "/", "//", "%"})
_COMPOUND_HEADS = frozenset({"def", "for", "if", "while"})
_EXPR_KEYWORDS = frozenset({"not", "True", "False", "None"})

_EOF = "eof"


class _Cursor:
    """Token cursor; comments are filtered out up front."""

    __slots__ = ("toks", "i", "prev_content", "_eof")

    def __init__(self, tokens: List[Token], eof_line: int, eof_col: int, eof_offset: int):
        self.toks = [t for t in tokens if t.kind != "comment"]
        self._eof = Token(_EOF, "", eof_line, eof_col, eof_offset, 0)
        self.toks.append(self._eof)
        self.i = 0
        self.prev_content: Optional[Token] = None

    def peek(self, ahead: int = 0) -> Token:
        if ahead == 0:
            # advance() never steps past the eof sentinel, so no bound check
            return self.toks[self.i]
        j = self.i + ahead
        return self.toks[j] if j < len(self.toks) else self._eof

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if self.i < len(self.toks) - 1:
            self.i += 1
        if tok.kind not in ("newline", "indent", "dedent", _EOF):
            self.prev_content = tok
        return tok


class Parser:
    def __init__(self, tokens: List[Token], eof_line: int = 1, eof_col: int = 1, eof_offset: int = 0):
        if tokens:
            last = tokens[-1]
            eof_line = last.line
            eof_col = last.col + len(last.lexeme)
            eof_offset = last.offset + last.length
        self.cur = _Cursor(tokens, eof_line, eof_col, eof_offset)

    # -- cursor shorthand --------------------------------------------------

    def _at(self, kind: str, lexeme: Optional[str] = None) -> bool:
        tok = self.cur.peek()
        return tok.kind == kind and (lexeme is None or tok.lexeme == lexeme)

    def _match(self, kind: str, lexeme: Optional[str] = None) -> Optional[Token]:
        if self._at(kind, lexeme):
            return self.cur.advance()
        return None

    def _expect(self, kind: str, lexeme: Optional[str], what: str) -> Token:
        tok = self.cur.peek()
        if tok.kind == kind and (lexeme is None or tok.lexeme == lexeme):
            return self.cur.advance()
        self._fail(f"expected {what}", tok)

    def _fail(self, message: str, tok: Token) -> None:
        found = tok.lexeme if tok.lexeme else tok.kind
        raise ParseError(f"{message}, found {found!r}", tok.line, tok.col, tok.lexeme, phase="parse")

    def _span_from(self, start_index: int) -> Span:
        first = self.cur.toks[start_index]
        last = self.cur.prev_content or first
        end = last.offset + last.length
        return Span(first.line, first.col, first.offset, max(end - first.offset, 0))

    # -- statements ---------------------------------------------------------

    def parse_module(self, module_span: Span) -> AstNode:
        body = []
        while not self._at(_EOF):
            node = self._statement()
            if node is not None:
                body.append(("body", node))
        return AstNode("Module", (), tuple(body), module_span)

    def _statement(self) -> Optional[AstNode]:
        tok = self.cur.peek()
        if tok.kind == "keyword":
            word = tok.lexeme
            if word in _COMPOUND_HEADS:
                if word == "def":
                    return self._funcdef()
                if word == "for":
                    return self._for()
                if word == "if":
                    return self._if()
                return self._while()
            if word in _EXPR_KEYWORDS:
                node = self._simple()
            else:
                node = self._simple_keyword(tok)
        elif tok.kind in ("identifier", "number", "string", "fstring-segment") or (
            tok.kind == "delimiter" and tok.lexeme in "([{"
        ) or (tok.kind == "operator" and tok.lexeme in ("-", "+")):
            node = self._simple()
        else:
            self._fail("expected a statement", tok)
        self._expect("newline", None, "end of line")
        return node

    def _simple_keyword(self, tok: Token) -> Optional[AstNode]:
        word = tok.lexeme
        if word == "pass":
            self.cur.advance()
            return AstNode("Pass", (), (), tok.span)
        if word == "break":
            self.cur.advance()
            return AstNode("Break", (), (), tok.span)
        if word == "continue":
            self.cur.advance()
            return AstNode("Continue", (), (), tok.span)
        if word == "return":
            return self._return()
        if word == "import":
            self._import()
            return None
        self._fail("unexpected keyword", tok)
        return None

    def _return(self) -> AstNode:
        start = self.cur.i
        self.cur.advance()
        if self._at("newline") or self._at(_EOF):
            tok = self.cur.toks[start]
            return AstNode("Return", (), (), tok.span)
        value = self._testlist()
        return AstNode("Return", (), (("value", value),), self._span_from(start))

    def _import(self) -> None:
        """Tolerated no-op form: consume 'import dotted (, dotted)*'."""
        self.cur.advance()
        while True:
            self._expect("identifier", None, "a module name after 'import'")
            while self._match("delimiter", "."):
                self._expect("identifier", None, "a name after '.'")
            if not self._match("delimiter", ","):
                break

    def _simple(self) -> AstNode:
        start = self.cur.i
        expr = self._testlist()
        nxt = self.cur.peek()
        if nxt.kind == "operator" and nxt.lexeme == "=":
            self.cur.advance()
            self._check_target(expr, aug=False)
            value = self._testlist()
            return AstNode("Assign", (), (("target", expr), ("value", value)), self._span_from(start))
        if nxt.kind == "operator" and nxt.lexeme in _AUG_OPS:
            self.cur.advance()
            self._check_target(expr, aug=True)
            value = self._testlist()
            return AstNode(
                "AugAssign",
                (("op", _AUG_OPS[nxt.lexeme]),),
                (("target", expr), ("value", value)),
                self._span_from(start),
            )
        return AstNode("ExprStmt", (), (("value", expr),), self._span_from(start))

    def _check_target(self, node: AstNode, aug: bool) -> None:
        if node.kind in ("Name", "Attribute", "Subscript"):
            return
        if node.kind == "Tuple" and not aug:
            for child in node.child_nodes():
                self._check_target(child, aug=False)
            return
        span = node.span or Span(0, 0, 0, 0)
        raise ParseError(
            f"cannot assign to {node.kind}", span.line, span.col, "", phase="parse"
        )

    def _funcdef(self) -> AstNode:
        start = self.cur.i
        self.cur.advance()
        name = self._expect("identifier", None, "a function name after 'def'")
        self._expect("delimiter", "(", "'(' after the function name")
        children: List[TTuple[str, AstNode]] = []
        while not self._at("delimiter", ")"):
            ptok = self._expect("identifier", None, "a parameter name")
            children.append(("param", AstNode("Parameter", (("name", ptok.lexeme),), (), ptok.span)))
            if not self._match("delimiter", ","):
                break
        self._expect("delimiter", ")", "')' closing the parameter list")
        if self._match("delimiter", "->"):
            children.append(("returns", self._or()))
        self._expect("delimiter", ":", "':' after the function header")
        for stmt in self._suite():
            children.append(("body", stmt))
        return AstNode("FunctionDef", (("name", name.lexeme),), tuple(children), self._span_from(start))

    def _for(self) -> AstNode:
        start = self.cur.i
        self.cur.advance()
        target = self._for_target()
        self._expect("keyword", "in", "'in' after the loop target")
        it = self._testlist()
        self._expect("delimiter", ":", "':' after the loop header")
        body = tuple(("body", s) for s in self._suite())
        return AstNode("For", (), (("target", target), ("iter", it)) + body, self._span_from(start))

    def _for_target(self) -> AstNode:
        """Loop targets are postfix expressions (commas make a tuple); the
        comparison level would swallow the 'in' keyword."""
        start = self.cur.i
        first = self._postfix()
        self._check_target(first, aug=False)
        if not self._at("delimiter", ","):
            return first
        elts = [first]
        while self._match("delimiter", ","):
            if self._at("keyword", "in"):
                break
            nxt = self._postfix()
            self._check_target(nxt, aug=False)
            elts.append(nxt)
        return AstNode("Tuple", (), tuple(("elt", e) for e in elts), self._span_from(start))

    def _if(self) -> AstNode:
        start = self.cur.i
        self.cur.advance()
        test = self._or()
        self._expect("delimiter", ":", "':' after the condition")
        children: List[TTuple[str, AstNode]] = [("test", test)]
        children.extend(("body", s) for s in self._suite())
        if self._at("keyword", "elif"):
            children.append(("orelse", self._if()))
        elif self._match("keyword", "else"):
            self._expect("delimiter", ":", "':' after 'else'")
            children.extend(("orelse", s) for s in self._suite())
        return AstNode("If", (), tuple(children), self._span_from(start))

    def _while(self) -> AstNode:
        start = self.cur.i
        self.cur.advance()
        test = self._or()
        self._expect("delimiter", ":", "':' after the condition")
        body = tuple(("body", s) for s in self._suite())
        return AstNode("While", (), (("test", test),) + body, self._span_from(start))

    def _suite(self) -> List[AstNode]:
        if self._match("newline"):
            self._expect("indent", None, "an indented block")
            stmts: List[AstNode] = []
            while not self._at("dedent"):
                node = self._statement()
                if node is not None:
                    stmts.append(node)
            self.cur.advance()
            return stmts
        # Inline suite: one simple statement on the header line.
        tok = self.cur.peek()
        if tok.kind == "keyword" and tok.lexeme in _COMPOUND_HEADS:
            self._fail("expected a simple statement after ':'", tok)
        node = self._statement()
        return [node] if node is not None else []

    # -- expressions ----------------------------------------------------------

    def _testlist(self) -> AstNode:
        start = self.cur.i
        first = self._or()
        if not self._at("delimiter", ","):
            return first
        elts = [first]
        while self._match("delimiter", ","):
            nxt = self.cur.peek()
            if nxt.kind in ("newline", _EOF) or (
                nxt.kind == "operator" and (nxt.lexeme == "=" or nxt.lexeme in _AUG_OPS)
            ) or (nxt.kind == "delimiter" and nxt.lexeme in (":", ")", "]", "}")):
                break
            elts.append(self._or())
        return AstNode("Tuple", (), tuple(("elt", e) for e in elts), self._span_from(start))

    def _or(self) -> AstNode:
        start = self.cur.i
        node = self._and()
        if not self._at("keyword", "or"):
            return node
        values = [node]
        while self._match("keyword", "or"):
            values.append(self._and())
        return AstNode("BoolOp", (("op", "or"),), tuple(("value", v) for v in values), self._span_from(start))

    def _and(self) -> AstNode:
        start = self.cur.i
        node = self._not()
        if not self._at("keyword", "and"):
            return node
        values = [node]
        while self._match("keyword", "and"):
            values.append(self._not())
        return AstNode("BoolOp", (("op", "and"),), tuple(("value", v) for v in values), self._span_from(start))

    def _not(self) -> AstNode:
        tok = self.cur.peek()
        if tok.kind == "keyword" and tok.lexeme == "not":
            start = self.cur.i
            self.cur.advance()
            operand = self._not()
            return AstNode("UnaryOp", (("op", "not"),), (("operand", operand),), self._span_from(start))
        return self._comparison()

    def _comparison(self) -> AstNode:
        start = self.cur.i
        left = self._arith()
        ops: List[str] = []
        comparators: List[AstNode] = []
        while True:
            sym = self._compare_op()
            if sym is None:
                break
            ops.append(sym)
            comparators.append(self._arith())
        if not ops:
            return left
        attrs = tuple(("op", sym) for sym in ops)
        children = (("left", left),) + tuple(("comparator", c) for c in comparators)
        return AstNode("Compare", attrs, children, self._span_from(start))

    def _compare_op(self) -> Optional[str]:
        tok = self.cur.peek()
        if tok.kind == "operator" and tok.lexeme in _COMPARE_OPS:
            self.cur.advance()
            return tok.lexeme
        if tok.kind == "keyword":
            if tok.lexeme == "in":
                self.cur.advance()
                return "in"
            if tok.lexeme == "is":
                self.cur.advance()
                if self._match("keyword", "not"):
                    return "is not"
                return "is"
            if tok.lexeme == "not":
                nxt = self.cur.peek(1)
                if nxt.kind == "keyword" and nxt.lexeme == "in":
                    self.cur.advance()
                    self.cur.advance()
                    return "not in"
        return None

    def _arith(self) -> AstNode:
        start = self.cur.i
        node = self._term()
        while True:
            tok = self.cur.peek()
            if tok.kind == "operator" and (tok.lexeme == "+" or tok.lexeme == "-"):
                self.cur.advance()
                right = self._term()
                node = AstNode("BinOp", (("op", tok.lexeme),), (("left", node), ("right", right)), self._span_from(start))
            else:
                return node

    def _term(self) -> AstNode:
        start = self.cur.i
        node = self._factor()
        while True:
            tok = self.cur.peek()
            if tok.kind == "operator" and tok.lexeme in _TERM_OPS:
                self.cur.advance()
                right = self._factor()
                node = AstNode("BinOp", (("op", tok.lexeme),), (("left", node), ("right", right)), self._span_from(start))
            else:
                return node

    def _factor(self) -> AstNode:
        tok = self.cur.peek()
        if tok.kind == "operator" and (tok.lexeme == "-" or tok.lexeme == "+"):
            start = self.cur.i
            self.cur.advance()
            operand = self._factor()
            return AstNode("UnaryOp", (("op", tok.lexeme),), (("operand", operand),), self._span_from(start))
        return self._power()

    def _power(self) -> AstNode:
        start = self.cur.i
        base = self._postfix()
        if self._at("operator", "**"):
            self.cur.advance()
            right = self._factor()
            return AstNode("BinOp", (("op", "**"),), (("left", base), ("right", right)), self._span_from(start))
        return base

    def _postfix(self) -> AstNode:
        start = self.cur.i
        node = self._atom()
        while True:
            tok = self.cur.peek()
            if tok.kind != "delimiter":
                return node
            if tok.lexeme == "(":
                self.cur.advance()
                node = self._call(node, start)
            elif tok.lexeme == "[":
                self.cur.advance()
                index = self._index()
                self._expect("delimiter", "]", "']' closing the subscript")
                node = AstNode("Subscript", (), (("value", node), ("index", index)), self._span_from(start))
            elif tok.lexeme == ".":
                self.cur.advance()
                name = self._expect("identifier", None, "an attribute name after '.'")
                node = AstNode("Attribute", (("attr", name.lexeme),), (("value", node),), self._span_from(start))
            else:
                return node

    def _call(self, func: AstNode, start: int) -> AstNode:
        children: List[TTuple[str, AstNode]] = [("func", func)]
        keywords: List[AstNode] = []
        while not self._at("delimiter", ")"):
            tok = self.cur.peek()
            nxt = self.cur.peek(1)
            if tok.kind == "identifier" and nxt.kind == "operator" and nxt.lexeme == "=":
                kw_start = self.cur.i
                self.cur.advance()
                self.cur.advance()
                value = self._or()
                keywords.append(
                    AstNode("Keyword", (("name", tok.lexeme),), (("value", value),), self._span_from(kw_start))
                )
            else:
                if keywords:
                    self._fail("positional argument follows keyword argument", tok)
                children.append(("arg", self._or()))
            if not self._match("delimiter", ","):
                break
        self._expect("delimiter", ")", "')' closing the call")
        children.extend(("keyword", kw) for kw in keywords)
        return AstNode("Call", (), tuple(children), self._span_from(start))

    def _index(self) -> AstNode:
        start = self.cur.i
        if self._at("delimiter", ":"):
            return self._slice(None, start)
        first = self._or()
        if self._at("delimiter", ":"):
            return self._slice(first, start)
        if not self._at("delimiter", ","):
            return first
        elts = [first]
        while self._match("delimiter", ","):
            if self._at("delimiter", "]"):
                break
            elts.append(self._or())
        return AstNode("Tuple", (), tuple(("elt", e) for e in elts), self._span_from(start))

    def _slice(self, lower: Optional[AstNode], start: int) -> AstNode:
        self._expect("delimiter", ":", "':'")
        children: List[TTuple[str, AstNode]] = []
        if lower is not None:
            children.append(("lower", lower))
        if not (self._at("delimiter", "]") or self._at("delimiter", ":")):
            children.append(("upper", self._or()))
        if self._match("delimiter", ":"):
            if not self._at("delimiter", "]"):
                children.append(("step", self._or()))
        return AstNode("Slice", (), tuple(children), self._span_from(start))

    def _atom(self) -> AstNode:
        tok = self.cur.peek()
        kind = tok.kind
        if kind == "identifier":
            self.cur.advance()
            return AstNode("Name", (("id", tok.lexeme),), (), tok.span)
        if kind == "number":
            self.cur.advance()
            return AstNode("Constant", (("value", tok.value),), (), tok.span)
        if kind == "string":
            self.cur.advance()
            return AstNode("StringLiteral", (("value", tok.value),), (), tok.span)
        if kind == "fstring-segment":
            return self._formatted_string()
        if kind == "keyword":
            if tok.lexeme == "True":
                self.cur.advance()
                return AstNode("Constant", (("value", True),), (), tok.span)
            if tok.lexeme == "False":
                self.cur.advance()
                return AstNode("Constant", (("value", False),), (), tok.span)
            if tok.lexeme == "None":
                self.cur.advance()
                return AstNode("Constant", (("value", None),), (), tok.span)
            self._fail("expected an expression", tok)
        if kind == "delimiter":
            if tok.lexeme == "(":
                return self._paren(tok)
            if tok.lexeme == "[":
                return self._list(tok)
            if tok.lexeme == "{":
                return self._dict(tok)
        self._fail("expected an expression", tok)
        raise AssertionError("unreachable")

    def _paren(self, open_tok: Token) -> AstNode:
        start = self.cur.i
        self.cur.advance()
        if self._at("delimiter", ")"):
            self.cur.advance()
            return AstNode("Tuple", (), (), self._span_from(start))
        first = self._or()
        if self._at("delimiter", ")"):
            self.cur.advance()
            return first
        elts = [first]
        saw_comma = False
        while self._match("delimiter", ","):
            saw_comma = True
            if self._at("delimiter", ")"):
                break
            elts.append(self._or())
        if not saw_comma:
            self._fail("expected ')'", self.cur.peek())
        self._expect("delimiter", ")", "')'")
        return AstNode("Tuple", (), tuple(("elt", e) for e in elts), self._span_from(start))

    def _list(self, open_tok: Token) -> AstNode:
        start = self.cur.i
        self.cur.advance()
        elts: List[AstNode] = []
        while not self._at("delimiter", "]"):
            elts.append(self._or())
            if not self._match("delimiter", ","):
                break
        self._expect("delimiter", "]", "']' closing the list")
        return AstNode("List", (), tuple(("elt", e) for e in elts), self._span_from(start))

    def _dict(self, open_tok: Token) -> AstNode:
        start = self.cur.i
        self.cur.advance()
        children: List[TTuple[str, AstNode]] = []
        while not self._at("delimiter", "}"):
            key = self._or()
            self._expect("delimiter", ":", "':' between dict key and value")
            value = self._or()
            children.append(("key", key))
            children.append(("value", value))
            if not self._match("delimiter", ","):
                break
        self._expect("delimiter", "}", "'}' closing the dict")
        return AstNode("Dict", (), tuple(children), self._span_from(start))

    def _formatted_string(self) -> AstNode:
        first = self.cur.peek()
        gid = first.value[-1]
        segs: List[Token] = []
        while self._at("fstring-segment") and self.cur.peek().value[-1] == gid:
            segs.append(self.cur.advance())
        children: List[TTuple[str, AstNode]] = []
        for seg in segs:
            val = seg.value
            tag = val[0]
            if tag == "text":
                children.append(("segment", AstNode("StringLiteral", (("value", val[1]),), (), seg.span)))
            elif tag == "hole":
                expr = self._parse_hole(val)
                children.append(("segment", AstNode("FormatHole", (), (("value", expr),), seg.span)))
            # "empty" contributes no children
        last = segs[-1]
        span = Span(first.line, first.col, first.offset, last.offset + last.length - first.offset)
        return AstNode("FormattedString", (), tuple(children), span)

    def _parse_hole(self, val: tuple) -> AstNode:
        _, src, line, col, offset, _ = val
        toks = tokenize_fragment(src, line, col, offset)
        sub = Parser(toks)
        expr = sub._testlist()
        trailing = sub.cur.peek()
        if trailing.kind != _EOF:
            sub._fail("unexpected token in formatted-string hole", trailing)
        return expr


def parse_program(text: str, path: str = "<string>") -> SyntaxTree:
    """Parse VPLang source into a SyntaxTree. Raises ParseError on any
    construct outside the grammar; no partial trees are returned."""
    tokens = tokenize_source(text)
    nbytes = len(text) if text.isascii() else len(text.encode("utf-8"))
    module_span = Span(1, 1, 0, nbytes)
    parser = Parser(tokens)
    root = parser.parse_module(module_span)
    return SyntaxTree(root, SourceProgram(text, path))
