import pytest
from hypothesis import given, settings

from conftest import linear_terms, random_nnf
from linweb.semantics import truth_table
from linweb.terms import (
    BOT,
    TOP,
    And,
    Or,
    ParseError,
    Var,
    ac_canonical,
    ac_equal,
    count_connectives,
    dual,
    is_linear,
    normalize_acu,
    normalize_acu_prime,
    parse_term,
    render,
    substitute,
)

P = parse_term


def test_parse_grammar():
    assert P("x & (y | z)") == And(Var("x"), Or(Var("y"), Var("z")))
    # | binds weaker than &
    assert P("x & y | z") == Or(And(Var("x"), Var("y")), Var("z"))
    assert P("~x") == Var("x", True)
    assert P("T") == TOP and P("F") == BOT


@pytest.mark.parametrize("bad", ["~(x & y)", "x &", "(x | y", "x y", "~T", "x $ y"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        P(bad)


def test_render_roundtrip(rng):
    for _ in range(300):
        t = random_nnf(rng, constants=True)
        assert P(render(t)) == t


def test_linearity():
    assert is_linear(P("x & (y | z)"))
    assert not is_linear(P("x | x"))
    assert not is_linear(P("(x & y) | (x & y)"))
    # x and ~x count as different variables
    assert is_linear(P("x | ~x"))


def test_substitute():
    assert substitute(P("x & y"), {"x": P("a | b")}) == P("(a | b) & y")
    assert substitute(P("~x"), {"x": P("a & b")}) == P("~a | ~b")
    assert substitute(P("x"), {}) == P("x")


def test_dual_is_involution(rng):
    for _ in range(200):
        t = random_nnf(rng)
        assert dual(dual(t)) == t


def test_ac_canonical_sorting_and_assoc():
    assert render(ac_canonical(P("(z | y) | x"))) == "x | y | z"
    assert ac_canonical(P("x & (y & z)")) == ac_canonical(P("(x & y) & z"))
    assert ac_equal(P("(a | b) & c"), P("c & (b | a)"))
    assert not ac_equal(P("a & b"), P("a | b"))


@given(linear_terms())
@settings(max_examples=200, deadline=None)
def test_ac_canonical_idempotent_and_semantic(t):
    c = ac_canonical(t)
    assert ac_canonical(c) == c
    names = sorted({v.name for v in _vars(t)})
    assert truth_table(c, names) == truth_table(t, names)


def _vars(t):
    if isinstance(t, Var):
        yield t
    elif isinstance(t, (And, Or)):
        yield from _vars(t.left)
        yield from _vars(t.right)


def test_unit_laws():
    assert normalize_acu(P("x | F")) == P("x")
    assert normalize_acu(P("x & T")) == P("x")
    # plain ACU keeps a dominating constant next to its sibling
    assert normalize_acu(P("x & F")) != BOT
    assert normalize_acu_prime(P("x & F")) == BOT
    assert normalize_acu_prime(P("(x | T) & (y | F)")) == P("y")


def test_count_connectives():
    assert count_connectives(P("(a & b) | (c & d)")) == (2, 1)
