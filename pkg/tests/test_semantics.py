import itertools

import pytest
from hypothesis import given, settings

from conftest import linear_terms, random_nnf
from linweb.rewriting import enumerate_linear_terms
from linweb.semantics import (
    SemanticsError,
    SetFamily,
    clique_maxterms,
    clique_minterms,
    entails,
    evaluate,
    implies,
    is_read_once,
    is_tautology,
    maxterms,
    maxterms_by_table,
    minimal_transversals,
    minterms,
    minterms_by_table,
    satisfiable,
    threshold,
    truth_table,
)
from linweb.terms import BOT, TOP, ac_equal, parse_term
from linweb.webs import LabelledGraph, web_of

P = parse_term
EXAMPLE = P("((v | w) & x) | (y & z)")
X5 = "vwxyz"


def fam(*sets):
    return {frozenset(s) for s in sets}


def test_evaluate():
    t = P("x & (y | z)")
    assert evaluate(t, {"x", "z"}) == 1
    assert evaluate(t, {"y", "z"}) == 0
    assert evaluate(P("x | ~x"), set()) == 1


def test_truth_table_matches_evaluate(rng):
    names = ("a", "b", "c", "d")
    for _ in range(100):
        t = random_nnf(rng, names, constants=True)
        table = truth_table(t, names)
        for i, bits in enumerate(itertools.product((0, 1), repeat=4)):
            y = {n for n, b in zip(names, bits) if b}
            got = table >> _index(y, names) & 1
            assert got == evaluate(t, y), (t, y)


def _index(y, names):
    # bit position used by truth_table: variable i contributes 2**i
    return sum(1 << i for i, n in enumerate(names) if n in y)


def test_example_families():
    assert set(minterms(EXAMPLE).sets) == fam("vx", "wx", "yz")
    assert set(maxterms(EXAMPLE).sets) == fam("vwy", "vwz", "xy", "xz")
    w = web_of(EXAMPLE)
    assert set(clique_minterms(w).sets) == fam("vx", "wx", "yz")
    assert set(clique_maxterms(w).sets) == fam("vwy", "vwz", "xy", "xz")


def test_constant_families():
    assert minterms(BOT, ()).sets == ()
    assert maxterms(TOP, ()).sets == ()
    assert set(minterms(P("x & y")).sets) == fam("xy")
    assert set(maxterms(P("x & y")).sets) == fam("x", "y")


def test_all_or_web():
    w = LabelledGraph.build("xyz")
    assert set(clique_minterms(w).sets) == fam("x", "y", "z")


@pytest.mark.parametrize("n", range(1, 6))
def test_three_minterm_methods_agree(n):
    names = "abcde"[:n]
    for t in enumerate_linear_terms(names):
        a, b, c = minterms(t, names), clique_minterms(web_of(t)), minterms_by_table(t, names)
        assert set(a.sets) == set(b.sets) == set(c.sets)
        a, b, c = maxterms(t, names), clique_maxterms(web_of(t)), maxterms_by_table(t, names)
        assert set(a.sets) == set(b.sets) == set(c.sets)


@given(linear_terms())
@settings(max_examples=100, deadline=None)
def test_maxterms_are_transversals_of_minterms(t):
    assert set(minimal_transversals(minterms(t).sets)) == set(maxterms(t).sets)


def test_entails_methods():
    assert entails(P("x & (y | z)"), P("(x & y) | z"))
    assert not entails(P("(x & y) | z"), P("x & (y | z)"))
    assert entails(EXAMPLE, EXAMPLE)
    assert entails(EXAMPLE, threshold(X5, 2))
    for method in ("truth_table", "minterm_cover", "maxterm_cover"):
        assert entails(EXAMPLE, threshold(X5, 2), method=method)
        assert not entails(threshold(X5, 2), EXAMPLE, method=method)


def test_threshold_families():
    assert set(threshold("xy", 1).minterms().sets) == fam("x", "y")
    assert set(threshold("xy", 2).minterms().sets) == fam("xy")
    assert set(threshold(X5, 2).maxterms().sets) == {frozenset(c) for c in itertools.combinations(X5, 4)}
    assert threshold("xy", 0).minterms().sets == (frozenset(),)
    assert threshold("xy", 3).minterms().sets == ()
    with pytest.raises(SemanticsError):
        threshold("xy", 4)


def test_read_once():
    v = is_read_once(EXAMPLE)
    assert v and ac_equal(v.witness, EXAMPLE)
    assert is_read_once(P("x"))
    v = is_read_once(threshold("xyz", 2))
    assert not v
    s, t = v.violation
    assert len(s & t) == 2


def test_tautology():
    assert is_tautology(P("x | ~x"))
    assert not is_tautology(P("x | ~y"))


def test_set_family_json_roundtrip():
    f = SetFamily.of("abc", ["ab", "c"])
    assert SetFamily.from_json(f.to_json()) == f
    assert f.is_antichain()


def test_minterms_require_negation_free():
    with pytest.raises(SemanticsError):
        minterms(P("x & ~y"))


def test_sat_path_matches_truth_tables(rng):
    names = ("a", "b", "c", "d")
    for _ in range(200):
        s = random_nnf(rng, names, constants=True)
        t = random_nnf(rng, names, constants=True)
        fs, ft = truth_table(s, names), truth_table(t, names)
        assert satisfiable(s) == (fs != 0)
        assert implies(s, t, cap=0) == (fs & ~ft == 0)
        assert implies(s, t) == (fs & ~ft == 0)


def test_tautology_beyond_table_cap():
    wide = " & ".join(f"(x{i} | ~x{i})" for i in range(30))
    assert is_tautology(P(wide))
    assert not is_tautology(P(wide + " & x0"))
