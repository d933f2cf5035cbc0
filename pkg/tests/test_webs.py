import itertools

import pytest

from linweb.rewriting import enumerate_linear_terms
from linweb.terms import ac_canonical, parse_term
from linweb.webs import (
    LabelledGraph,
    WebError,
    all_labelled_graphs,
    edge_counts,
    find_p4,
    is_p4_free,
    term_of_web,
    to_dot,
    web_of,
)

P = parse_term
EXAMPLE = P("((v | w) & x) | (y & z)")


def test_example_web():
    w = web_of(EXAMPLE)
    assert w.and_edges == {("v", "x"), ("w", "x"), ("y", "z")}
    assert edge_counts(w) == (3, 7)


def test_small_webs():
    assert edge_counts(web_of(P("x & y"))) == (1, 0)
    assert edge_counts(web_of(P("x | (y | z)"))) == (0, 3)


def test_web_rejects_nonlinear():
    with pytest.raises(WebError):
        web_of(P("x | x"))
    with pytest.raises(WebError):
        web_of(P("x & ~y"))


def test_from_labels_pair_order():
    g = LabelledGraph.from_labels("abc", "rgg")
    assert g.and_edges == {("a", "b")}


def test_p4_detection():
    path = LabelledGraph.build("wxyz", [("w", "x"), ("x", "y"), ("y", "z")])
    ok, quad = is_p4_free(path)
    assert not ok and set(quad) == set("wxyz")
    with pytest.raises(WebError):
        term_of_web(path)
    complete = LabelledGraph.build("wxyz", itertools.combinations("wxyz", 2))
    assert find_p4(complete) is None


def test_term_of_web_example():
    assert term_of_web(web_of(EXAMPLE)) == ac_canonical(EXAMPLE)
    assert term_of_web(LabelledGraph.build("x")) == P("x")


@pytest.mark.parametrize("n", range(1, 6))
def test_p4_free_graphs_are_exactly_webs(n):
    """Every web is P4-free, every P4-free graph round-trips, and the two
    sets have the same size."""
    names = "abcde"[:n]
    webs = {web_of(t) for t in enumerate_linear_terms(names)}
    free = [g for g in all_labelled_graphs(names) if is_p4_free(g)[0]]
    assert set(free) == webs
    for g in free:
        assert web_of(term_of_web(g)) == g


def test_web_equality_is_ac_equality():
    terms = enumerate_linear_terms("abcd")
    webs = [web_of(t) for t in terms]
    assert len(set(webs)) == len(terms)


def test_dot_output():
    dot = to_dot(web_of(P("x & y | z")))
    assert dot.startswith("graph web {")
    assert '"x" -- "y" [style=solid]' in dot
    assert '"x" -- "z" [style=dashed]' in dot
