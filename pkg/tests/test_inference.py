import itertools
import random

import pytest

from linweb.inference import (
    CriticalChains,
    Derivation,
    Inference,
    InferenceError,
    Step,
    Trivial,
    TrivialEndpoints,
    check_increasing_measure,
    critical_chains,
    eliminate_negation,
    erasure_trivialities,
    is_globally_trivial,
    is_sound,
    leq,
    minterm_shrinks,
    remove_trivialities,
    trivial_at,
    trivial_at_terms,
    trivial_variables,
)
from linweb.rewriting import SWITCH_MEDIAL, enumerate_linear_terms, match_steps, rule_set, supermix
from linweb.semantics import minterms, maxterms, truth_table
from linweb.terms import Or, base_names, parse_term, render
from linweb.webs import web_of

P = parse_term
I = Inference.parse
SWITCH = I("x & (y | z)", "(x & y) | z")
MEDIAL = I("(w & x) | (y & z)", "(w | y) & (x | z)")
WITH_SUPERMIX = rule_set("switch,medial,supermix1,supermix2")
EQ13 = [P("(w & x) | (y & z)"), P("(w | y) & (x | z)"), P("w | x | (y & z)")]


def test_inference_requires_distinct_sides():
    with pytest.raises(InferenceError):
        I("x", "x")


def test_soundness():
    assert is_sound(SWITCH)
    assert is_sound(MEDIAL)
    assert not is_sound(I("x | y", "x & y"))
    # negation is allowed
    assert is_sound(I("x & ~y", "x | y"))


def test_example_trivialities():
    assert trivial_variables(I("x & y", "x | y")) == ["x", "y"]
    smix = supermix(2).as_inference()
    names = sorted(base_names(smix.lhs))
    for y in names:
        if y.startswith("y"):
            assert trivial_at(smix, y)
    assert not trivial_at(smix, "x")
    assert trivial_variables(SWITCH) == []


def _brute_trivial(s, t, x, ground):
    """Def 5.4 by evaluating terms directly on every assignment."""
    from linweb.semantics import evaluate

    rest = [v for v in ground if v != x]
    for bits in itertools.product((0, 1), repeat=len(rest)):
        y = {v for v, b in zip(rest, bits) if b}
        if evaluate(s, y | {x}) and not evaluate(t, y - {x}):
            return False
    return True


@pytest.mark.parametrize("n", [2, 3])
def test_triviality_methods_agree_with_brute_force(n):
    names = "abcd"[:n]
    terms = enumerate_linear_terms(names)
    for s, t in itertools.product(terms, repeat=2):
        for x in names:
            want = _brute_trivial(s, t, x, names)
            for method in ("definition", "minterm", "maxterm"):
                assert trivial_at_terms(s, t, x, method) == want, (render(s), render(t), x, method)


def test_trivial_at_unknown_variable():
    with pytest.raises(InferenceError):
        trivial_at(SWITCH, "q")


def test_erasure():
    assert erasure_trivialities(I("x & y", "x")) == {"y"}
    assert erasure_trivialities(SWITCH) == set()
    assert erasure_trivialities(I("x", "x | y")) == {"y"}
    for x in erasure_trivialities(I("x & y", "x")):
        assert trivial_at(I("x & y", "x"), x)


def test_eliminate_negation():
    out = eliminate_negation(I("~x & ~y", "~x | ~y"))
    assert isinstance(out, Inference)
    assert render(out.lhs) == "x' & y'" and render(out.rhs) == "x' | y'"
    out = eliminate_negation(I("x & ~y", "x | ~y"))
    assert render(out.lhs) == "x & y'"
    out = eliminate_negation(I("~x & y", "x | y"))
    assert isinstance(out, Trivial) and out.variable == "x"
    assert trivial_at(I("~x & y", "x | y"), "x")


def _check_contract(inf, r):
    s, t = inf.lhs, inf.rhs
    if r.fully_trivial:
        assert leq(s, r.u) and leq(r.u, t)
        return
    assert leq(r.s_prime, r.t_prime)
    if r.u is not None:
        assert leq(s, Or(r.s_prime, r.u))
        assert leq(Or(r.t_prime, r.u), t)
    ground = sorted(base_names(r.s_prime) | base_names(r.t_prime))
    assert not any(trivial_at_terms(r.s_prime, r.t_prime, x, ground=ground) for x in ground)
    if r.u is not None:
        assert not base_names(r.u) & base_names(r.s_prime)


def test_remove_trivialities_nontrivial_input():
    r = remove_trivialities(SWITCH)
    assert r.status == "nontrivial"
    assert (r.s_prime, r.t_prime) == (SWITCH.lhs, SWITCH.rhs)


def test_remove_trivialities_supermix():
    inf = supermix(2).as_inference()
    r = remove_trivialities(inf)
    assert set(r.moved) >= {v for v in base_names(inf.lhs) if v.startswith("y")}
    _check_contract(inf, r)


def test_remove_trivialities_degenerate():
    inf = I("x & y", "x | y")
    r = remove_trivialities(inf)
    assert r.moved
    _check_contract(inf, r)


def test_remove_trivialities_contract_exhaustive():
    terms = enumerate_linear_terms("abcd")
    tables = [truth_table(t, "abcd") for t in terms]
    count = 0
    for (s, fs), (t, ft) in itertools.product(zip(terms, tables), repeat=2):
        if s == t or fs & ~ft:
            continue
        inf = Inference(s, t)
        r = remove_trivialities(inf, budget=0)
        _check_contract(inf, r)
        count += 1
    assert count > 100


def test_remove_trivialities_preconditions():
    with pytest.raises(InferenceError):
        remove_trivialities(I("x | y", "x & y"))
    with pytest.raises(InferenceError):
        remove_trivialities(I("x & ~y", "x | ~y"))


def test_witness_derivations_are_valid():
    inf = I("(a & b) | (c & d)", "a | b | (c & d)")
    r = remove_trivialities(inf)
    _check_contract(inf, r)
    if r.witnessed:
        for d in r.derivations:
            for a, b in zip(d.lines, d.lines[1:]):
                assert leq(a, b)


# -- chains and measures ------------------------------------------------------


def _verify_chains(lines, c):
    X = c.variables
    for x in X:
        for i, t in enumerate(lines):
            S, T = c.minterm_chains[x][i], c.maxterm_chains[x][i]
            assert S in minterms(t, X).sets and T in maxterms(t, X).sets
            assert S & T == {x}
        for i in range(len(lines) - 1):
            assert c.minterm_chains[x][i + 1] <= c.minterm_chains[x][i]
            assert c.maxterm_chains[x][i] <= c.maxterm_chains[x][i + 1]


def test_chains_single_switch():
    lines = [SWITCH.lhs, SWITCH.rhs]
    c = critical_chains(lines)
    assert isinstance(c, CriticalChains)
    _verify_chains(lines, c)
    rep = check_increasing_measure(lines, c)
    assert rep.ok
    assert rep.values[0].e_and == 2 and rep.values[1].e_and == 1
    assert rep.values[1].mu > rep.values[0].mu


def test_chains_single_medial():
    lines = [MEDIAL.lhs, MEDIAL.rhs]
    c = critical_chains(lines)
    _verify_chains(lines, c)
    rep = check_increasing_measure(lines, c)
    assert rep.ok
    assert rep.values[0].mu <= rep.values[1].mu
    assert (rep.values[0].count_or, rep.values[1].count_or) == (1, 2)


def test_eq13_second_step_sound():
    assert leq(EQ13[1], EQ13[2])
    assert leq(EQ13[0], EQ13[1])


def test_eq13_globally_trivial():
    ends = Inference(EQ13[0], EQ13[2])
    assert trivial_at(ends, "w") and trivial_at(ends, "x")
    for a, b in zip(EQ13, EQ13[1:]):
        assert trivial_variables(Inference(a, b)) == []
    glob, at = is_globally_trivial(EQ13)
    assert glob and set(at) == {"w", "x"}
    out = critical_chains(EQ13)
    assert isinstance(out, TrivialEndpoints) and out.variable in ("w", "x")


def test_chains_reject_non_increasing():
    with pytest.raises(InferenceError):
        critical_chains([SWITCH.rhs, SWITCH.lhs])


def _random_sound_walk(rng, names, steps, rules=SWITCH_MEDIAL):
    t = rng.choice(enumerate_linear_terms(names))
    lines = [t]
    for _ in range(steps):
        reds = match_steps(lines[-1], rules)
        if not reds:
            break
        lines.append(rng.choice(reds).result)
    return lines


def test_hereditariness():
    """A step trivial at x makes every enclosing sound pair trivial at x."""
    rng = random.Random(5)
    hits = 0
    for _ in range(200):
        lines = _random_sound_walk(rng, "abcde", 5, WITH_SUPERMIX)
        names = sorted(base_names(lines[0]))
        for i in range(len(lines) - 1):
            local = {x for x in names if trivial_at_terms(lines[i], lines[i + 1], x, ground=names)}
            for x in local:
                hits += 1
                for a in range(i + 1):
                    for b in range(i + 1, len(lines)):
                        assert trivial_at_terms(lines[a], lines[b], x, ground=names)
    assert hits > 0


def test_edge_flip_shrinks_a_minterm():
    """An AND edge turning OR across a sound strict step comes with a
    strictly smaller minterm."""
    rng = random.Random(11)
    seen = 0
    for _ in range(300):
        lines = _random_sound_walk(rng, "abcde", 3)
        for a, b in zip(lines, lines[1:]):
            if web_of(a).and_edges - web_of(b).and_edges:
                seen += 1
                assert minterm_shrinks(a, b)
    assert seen > 0


def test_derivation_json_roundtrip():
    d = Derivation((SWITCH.lhs, SWITCH.rhs), (Step("switch", (), {}),), "AC")
    assert Derivation.from_json(d.to_json()) == d
    assert len(d) == 1
