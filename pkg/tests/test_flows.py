import random

import pytest

from linweb.flows import (
    CD,
    CU,
    WD,
    WU,
    AtomicFlow,
    FlowError,
    apply_redex,
    eliminate_loops,
    extract_flow,
    find_redexes,
    has_contraction_loop,
    is_normal,
    norm_rules,
    random_flow,
    rewrite_flow,
    weight_measure,
    weights,
)
from linweb.inference import Derivation, Step
from linweb.terms import parse_term

P = parse_term


def derivation(lines, rules, modulo="AC"):
    return Derivation(tuple(P(x) for x in lines), tuple(Step(r) for r in rules), modulo)


EQ6 = derivation(["(a & b) | (a & b)", "(a | a) & (b | b)", "a & (b | b)", "a & b"], ["medial", "acd", "acd"])
# c-up, weakening, switch and co-weakening around contractions: a flow with a loop
LOOPY = derivation(
    ["a", "a & a", "(a | a) & a", "a & a", "a & (a | b)", "a & b | a", "a | a", "a"],
    ["acu", "awd", "acd", "awd", "switch", "awu", "acd"],
)


def flow(spec):
    """Build a flow from (kind, inputs, outputs) rows over named edges."""
    data = {"nodes": [], "edges": {}, "upper": [], "lower": []}
    for i, (kind, ins, outs) in enumerate(spec["nodes"]):
        data["nodes"].append({"id": i, "kind": kind})
        for e in ins:
            data["edges"].setdefault(e, {"atom": "a"})["to"] = i
        for e in outs:
            data["edges"].setdefault(e, {"atom": "a"})["from"] = i
    edges = []
    for k, (name, e) in enumerate(sorted(data["edges"].items())):
        edges.append({"id": k, "atom": e["atom"], "from": e.get("from"), "to": e.get("to")})
    ids = {name: k for k, name in enumerate(sorted(data["edges"]))}
    upper = [ids[n] for n in sorted(data["edges"]) if "from" not in data["edges"][n]]
    lower = [ids[n] for n in sorted(data["edges"]) if "to" not in data["edges"][n]]
    return AtomicFlow.from_json({"nodes": data["nodes"], "edges": edges, "upper": upper, "lower": lower})


MIN_LOOP = flow({"nodes": [(CU, ["i"], ["l", "r"]), (CD, ["l", "r"], ["o"])]})


def test_single_contraction():
    f = extract_flow(derivation(["a | a", "a"], ["acd"]))
    assert f.kind_counts() == {CD: 1, CU: 0, WD: 0, WU: 0}
    assert f.interface() == (("a", "a"), ("a",))


def test_eq6_flow():
    f = extract_flow(EQ6)
    assert f.kind_counts() == {CD: 2, CU: 0, WD: 0, WU: 0}
    assert f.interface() == (("a", "b", "a", "b"), ("a", "b"))
    assert has_contraction_loop(f) is None


def test_extraction_rejects_compound_contraction():
    with pytest.raises(FlowError):
        extract_flow(derivation(["(a & b) | (a & b)", "a & b"], ["acd"]))


def test_extraction_without_step_names():
    d = Derivation(EQ6.lines, (), "AC")
    assert extract_flow(d).kind_counts()[CD] == 2


def test_loopy_derivation():
    f = extract_flow(LOOPY)
    assert f.kind_counts() == {CD: 2, CU: 1, WD: 2, WU: 1}
    assert has_contraction_loop(f) is not None


def test_json_roundtrip_and_dot():
    f = extract_flow(LOOPY)
    g = AtomicFlow.from_json(f.to_json())
    assert g.canonical() == f.canonical()
    assert f.to_dot().startswith("digraph flow {")


def test_validate_catches_bad_arity():
    with pytest.raises(FlowError):
        AtomicFlow.from_json(
            {"nodes": [{"id": 0, "kind": CD}], "edges": [{"id": 0, "atom": "a", "to": 0}], "upper": [0], "lower": []}
        )


def test_weakening_into_contraction_erases():
    f = flow({"nodes": [(WD, [], ["w"]), (CD, ["w", "i"], ["o"])]})
    out = rewrite_flow(f).result
    assert out.nodes == {} and out.interface() == (("a",), ("a",))


def test_norm_on_normal_flow_is_identity():
    f = extract_flow(EQ6)
    tr = rewrite_flow(f)
    assert len(tr) == 0 and tr.result.canonical() == f.canonical()


@pytest.mark.parametrize("seed", range(3))
def test_norm_reaches_redex_free_forms(seed):
    rng = random.Random(seed)
    pairs = {(WD, CD), (WD, CU), (WD, WU), (CD, WU), (CU, WU), (CD, CU)}
    for _ in range(200):
        f = random_flow(rng, 12)
        out = rewrite_flow(f).result
        assert is_normal(out)
        assert out.interface() == f.interface()
        for e in out.edges.values():
            if e.src is not None and e.dst is not None:
                assert (out.nodes[e.src], out.nodes[e.dst]) not in pairs


def test_norm_rule_names():
    assert set(norm_rules()) == {"wd-cd", "wd-cu", "wd-wu", "cd-wu", "cu-wu", "cd-cu"}


def test_minimal_loop():
    loop = has_contraction_loop(MIN_LOOP)
    assert loop is not None
    assert MIN_LOOP.nodes[loop.top] == CU and MIN_LOOP.nodes[loop.bottom] == CD
    (r,) = find_redexes(MIN_LOOP, ("cu-cd",))
    out = apply_redex(MIN_LOOP, r)
    assert out.nodes == {} and has_contraction_loop(out) is None


def test_single_edge_has_no_loop():
    f = AtomicFlow.from_json({"nodes": [], "edges": [{"id": 0, "atom": "a"}], "upper": [0], "lower": [0]})
    assert has_contraction_loop(f) is None


def test_eliminate_loops_on_loopy_flow():
    out = eliminate_loops(extract_flow(LOOPY))
    assert has_contraction_loop(out.result) is None
    assert out.measure_decreases()
    assert [r for r, _ in out.steps].count("cu-cd") >= 1


def test_loop_free_input_keeps_its_nodes():
    f = extract_flow(EQ6)
    out = eliminate_loops(f)
    assert out.result.kind_counts() == f.kind_counts()


def test_weights_count_contractions_above():
    # CD then CU below it: the CU sits under one contraction
    f = flow({"nodes": [(CD, ["i", "j"], ["m"]), (CU, ["m"], ["o", "p"])]})
    assert list(weights(f).values()) == [1]
    assert weight_measure(f) == 4
    (r,) = find_redexes(f, ("cd-cu",))
    g = apply_redex(f, r)
    assert sorted(weights(g).values()) == [0, 0]
    assert weight_measure(g) < weight_measure(f)


def test_random_loop_elimination():
    rng = random.Random(4)
    for _ in range(300):
        f = random_flow(rng, 12)
        out = eliminate_loops(f)
        assert has_contraction_loop(out.result) is None
        assert out.measure_decreases()
        assert out.result.interface() == f.interface()
