"""Parser behavior, checked two ways: golden dumps for targeted shapes, and
full-tree equivalence against the independent stdlib-ast oracle."""

import glob

import pytest

import ast_oracle
from abcd.dump import dump_tree
from abcd.errors import ParseError
from abcd.parser import parse_program
from abcd.synth import generate_program
from conftest import REPO_ROOT


def sexpr(src):
    return dump_tree(parse_program(src), "sexpr")


def oracle_sexpr(src):
    return ast_oracle.render_sexpr(ast_oracle.expected_tree(src))


ALL_FIXTURES = sorted(
    glob.glob(str(REPO_ROOT / "fixtures" / "**" / "*.vp"), recursive=True)
)


# ---------------------------------------------------------------- dual route


@pytest.mark.parametrize("path", ALL_FIXTURES, ids=lambda p: p.split("fixtures/")[-1])
def test_fixture_matches_oracle(path):
    text = open(path, encoding="utf-8").read()
    assert dump_tree(parse_program(text, path), "sexpr") == oracle_sexpr(text)


@pytest.mark.parametrize("seed", range(0, 100))
def test_synth_program_matches_oracle(seed):
    text = generate_program(seed)
    assert sexpr(text) == oracle_sexpr(text)


# ------------------------------------------------------------------- goldens


def test_assign_golden():
    assert sexpr("x = 1\n") == '(Module (Assign (Name id=x) (Constant value=1)))'


def test_power_is_right_associative():
    assert sexpr("y = 2 ** 3 ** 4\n") == (
        '(Module (Assign (Name id=y) (BinOp op="**" (Constant value=2) '
        '(BinOp op="**" (Constant value=3) (Constant value=4)))))'
    )


def test_chained_comparison_collapses_to_one_node():
    out = sexpr("r = a < b <= c\n")
    assert out.count("Compare") == 1
    assert 'op="<" op="<="' in out


def test_boolop_chain_collapses():
    out = sexpr("r = a and b and c\n")
    assert out.count("BoolOp") == 1


def test_mixed_boolops_nest():
    out = sexpr("r = a and b or c\n")
    assert out.count("BoolOp") == 2


def test_import_is_a_no_op():
    assert sexpr("import math\nx = 1\n") == sexpr("x = 1\n")


def test_inline_suite():
    assert sexpr("if x: y = 1\n") == sexpr("if x:\n    y = 1\n")


def test_nested_tuple_for_target():
    out = sexpr("for i, (a, b) in enumerate(pairs.items()):\n    t = a\n")
    assert out.count("Tuple") == 2


def test_unary_and_not():
    out = sexpr("m = not -x\n")
    assert out.count("UnaryOp") == 2


def test_slice_forms_match_oracle():
    src = (
        "a = xs[1:]\n"
        "b = xs[:2]\n"
        "c = xs[::2]\n"
        "d = xs[:]\n"
        "e = xs[1:2:3]\n"
        "f = xs[i - 1]\n"
    )
    assert sexpr(src) == oracle_sexpr(src)


def test_call_keyword_arguments():
    out = sexpr('r = obj.query("hi", to_yesno=True)\n')
    assert "Keyword" in out and "name=to_yesno" in out


def test_empty_and_singleton_tuples():
    src = "a = ()\nb = (1,)\nc = (1, 2)\n"
    assert sexpr(src) == oracle_sexpr(src)


def test_docstring_is_an_exprstmt():
    src = 'def f(a):\n    """doc"""\n    return a\n'
    assert sexpr(src) == oracle_sexpr(src)


# ----------------------------------------------------------------- rejection


@pytest.mark.parametrize(
    "src",
    [
        "class A:\n    pass\n",
        "@deco\ndef f():\n    pass\n",
        "f = lambda x: x\n",
        "xs = [i for i in ys]\n",
        "try:\n    pass\nexcept Exception:\n    pass\n",
        "with open(p) as f:\n    pass\n",
        "x = 1; y = 2\n",
        "if (n := 10) > 5:\n    pass\n",
        "x = a | b\n",
        "x = a ^ b\n",
        "x = a @ b\n",
        "x = a << 2\n",
        "x = y = 1\n",
        "def f(a=1):\n    pass\n",
        'x = f"{v!r}"\n',
        'x = f"{v:>8}"\n',
        'x = "a" "b"\n',
        "for x in ys:\n    pass\nelse:\n    pass\n",
        "while x:\n    pass\nelse:\n    pass\n",
        "if a, b:\n    pass\n",
        "x = 1 if c else 2\n",
        "del x\n",
        "global x\n",
        "assert x\n",
        "yield x\n",
        "raise ValueError\n",
        "from os import path\n",
        "async def f():\n    pass\n",
        "def f(*args):\n    pass\n",
        "def f(**kw):\n    pass\n",
        "print(*xs)\n",
        "print(**kw)\n",
        "for 1 in xs:\n    pass\n",
        "for f(x) in xs:\n    pass\n",
        "1 += 2\n",
        "(a, b) += c\n",
    ],
    ids=lambda s: s.splitlines()[0][:34],
)
def test_out_of_grammar_constructs_rejected(src):
    with pytest.raises(ParseError):
        parse_program(src)


def test_parse_error_carries_location():
    with pytest.raises(ParseError) as exc:
        parse_program("x = )\n", path="bad.vp")
    err = exc.value
    assert err.line == 1
    assert err.col == 5
    assert err.lexeme == ")"
    assert err.phase == "parse"


def test_path_labels_the_source_program():
    tree = parse_program("x = 1\n", path="prog.vp")
    assert tree.source.path == "prog.vp"


# --------------------------------------------------------------------- spans


def test_spans_slice_back_to_source():
    src = 'result = frame.find("person")\n'
    tree = parse_program(src)
    blob = src.encode("utf-8")

    def spans(node, acc):
        acc.append(node)
        for _, child in node.children:
            spans(child, acc)
        return acc

    by_kind = {}
    for node in spans(tree.root, []):
        if node.span is not None:
            text = blob[node.span.offset : node.span.offset + node.span.length]
            by_kind.setdefault(node.kind, []).append(text.decode("utf-8"))
    assert 'frame.find("person")' in by_kind["Call"]
    assert "frame.find" in by_kind["Attribute"]
    assert "result" in by_kind["Name"]


def test_module_node_has_full_span():
    src = "x = 1\ny = 2\n"
    root = parse_program(src).root
    assert root.kind == "Module"
    assert root.span.offset == 0
    assert root.span.length == len(src.encode("utf-8"))
