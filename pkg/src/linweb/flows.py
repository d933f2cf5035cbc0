"""Atomic flows: occurrence graphs of derivations with structural steps.

A flow is a directed acyclic port graph.  Edges carry an atom and run
downwards from a node (or the upper boundary) to a node (or the lower
boundary).  Node kinds and their (in, out) arities:

* ``CD`` contraction, (2, 1)
* ``CU`` cocontraction, (1, 2)
* ``WD`` weakening, (0, 1)
* ``WU`` coweakening, (1, 0)
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .inference import Derivation
from .terms import And, Or, Term, Var, base_names, conj, disj, flatten
from .rewriting import (
    RuleSet,
    builtin_rules,
    nary_replace,
    normal_form,
    rule_reducts,
)

CD, CU, WD, WU = "CD", "CU", "WD", "WU"
ARITY = {CD: (2, 1), CU: (1, 2), WD: (0, 1), WU: (1, 0)}


class FlowError(ValueError):
    pass


@dataclass
class Edge:
    atom: str
    src: int | None = None  # None: upper boundary
    dst: int | None = None  # None: lower boundary


@dataclass
class AtomicFlow:
    nodes: dict[int, str] = field(default_factory=dict)
    edges: dict[int, Edge] = field(default_factory=dict)
    upper: list[int] = field(default_factory=list)
    lower: list[int] = field(default_factory=list)

    # -- construction -----------------------------------------------------

    def copy(self) -> "AtomicFlow":
        return AtomicFlow(
            dict(self.nodes),
            {k: Edge(e.atom, e.src, e.dst) for k, e in self.edges.items()},
            list(self.upper),
            list(self.lower),
        )

    def _new_node(self, kind: str) -> int:
        nid = max(self.nodes, default=-1) + 1
        self.nodes[nid] = kind
        return nid

    def _new_edge(self, atom: str, src: int | None = None, dst: int | None = None) -> int:
        eid = max(self.edges, default=-1) + 1
        self.edges[eid] = Edge(atom, src, dst)
        return eid

    # -- queries ----------------------------------------------------------

    def inputs(self, nid: int) -> list[int]:
        return sorted(k for k, e in self.edges.items() if e.dst == nid)

    def outputs(self, nid: int) -> list[int]:
        return sorted(k for k, e in self.edges.items() if e.src == nid)

    def kind_counts(self) -> dict[str, int]:
        out = {k: 0 for k in ARITY}
        for kind in self.nodes.values():
            out[kind] += 1
        return out

    def interface(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (
            tuple(self.edges[e].atom for e in self.upper),
            tuple(self.edges[e].atom for e in self.lower),
        )

    def validate(self) -> None:
        for nid, kind in self.nodes.items():
            if kind not in ARITY:
                raise FlowError(f"node {nid} has unknown kind {kind!r}")
            ins, outs = self.inputs(nid), self.outputs(nid)
            if (len(ins), len(outs)) != ARITY[kind]:
                raise FlowError(f"node {nid} ({kind}) has arity {(len(ins), len(outs))}")
            if len({self.edges[e].atom for e in ins + outs}) > 1:
                raise FlowError(f"node {nid} mixes atoms")
        for k, e in self.edges.items():
            for end in (e.src, e.dst):
                if end is not None and end not in self.nodes:
                    raise FlowError(f"edge {k} points at missing node {end}")
        if sorted(self.upper) != sorted(k for k, e in self.edges.items() if e.src is None):
            raise FlowError("upper boundary does not match the edges")
        if sorted(self.lower) != sorted(k for k, e in self.edges.items() if e.dst is None):
            raise FlowError("lower boundary does not match the edges")
        self.topological_order()

    def topological_order(self) -> list[int]:
        indeg = {n: 0 for n in self.nodes}
        for e in self.edges.values():
            if e.src is not None and e.dst is not None:
                indeg[e.dst] += 1
        ready = sorted(n for n, d in indeg.items() if d == 0)
        order = []
        while ready:
            n = ready.pop(0)
            order.append(n)
            for k in self.outputs(n):
                d = self.edges[k].dst
                if d is not None:
                    indeg[d] -= 1
                    if indeg[d] == 0:
                        ready.append(d)
                        ready.sort()
        if len(order) != len(self.nodes):
            raise FlowError("flow has a cycle")
        return order

    def canonical(self) -> tuple:
        """Structure up to renumbering (used for equality in tests)."""
        order = self.topological_order()
        rank = {n: i for i, n in enumerate(order)}
        return (
            tuple(self.nodes[n] for n in order),
            tuple(sorted(
                (e.atom, -1 if e.src is None else rank[e.src], -1 if e.dst is None else rank[e.dst])
                for e in self.edges.values()
            )),
        )

    # -- serialisation ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": n, "kind": k} for n, k in sorted(self.nodes.items())],
            "edges": [
                {"id": k, "atom": e.atom, "from": e.src, "to": e.dst} for k, e in sorted(self.edges.items())
            ],
            "upper": list(self.upper),
            "lower": list(self.lower),
        }

    @classmethod
    def from_json(cls, data) -> "AtomicFlow":
        if isinstance(data, str):
            data = json.loads(data)
        f = cls(
            {int(n["id"]): n["kind"] for n in data["nodes"]},
            {
                int(e.get("id", i)): Edge(e["atom"], e.get("from"), e.get("to"))
                for i, e in enumerate(data["edges"])
            },
            [int(x) for x in data["upper"]],
            [int(x) for x in data["lower"]],
        )
        f.validate()
        return f

    def to_dot(self, name: str = "flow") -> str:
        shapes = {
            CD: "shape=invtriangle, style=filled, fillcolor=black",
            CU: "shape=triangle",
            WD: "shape=circle, style=filled, fillcolor=black, width=0.15",
            WU: "shape=circle, width=0.15",
        }
        out = [f"digraph {name} {{", "  node [label=\"\"];"]
        for n, k in sorted(self.nodes.items()):
            out.append(f"  n{n} [{shapes[k]}, tooltip=\"{k}\"];")
        for k, e in sorted(self.edges.items()):
            src = f"n{e.src}" if e.src is not None else f"top{k}"
            dst = f"n{e.dst}" if e.dst is not None else f"bot{k}"
            if e.src is None:
                out.append(f"  top{k} [shape=plaintext, label=\"{e.atom}\"];")
            if e.dst is None:
                out.append(f"  bot{k} [shape=plaintext, label=\"{e.atom}\"];")
            out.append(f"  {src} -> {dst} [label=\"{e.atom}\"];")
        out.append("}")
        return "\n".join(out) + "\n"

    # -- editing helpers used by the rewrite rules -------------------------

    def _drop_node(self, nid: int) -> None:
        del self.nodes[nid]

    def _drop_edge(self, eid: int) -> None:
        del self.edges[eid]

    def _fuse(self, above: int, below: int) -> None:
        """Join edge ``above`` (ending at a removed node) with edge ``below``
        (starting at it) into one edge, kept under the id ``above``."""
        a, b = self.edges[above], self.edges[below]
        a.dst = b.dst
        if below in self.lower:
            self.lower[self.lower.index(below)] = above
        del self.edges[below]


# ---------------------------------------------------------------------------
# Extraction from derivations

_TAG = "#"


def _tagged(atom: str, eid: int) -> Var:
    return Var(f"{atom}{_TAG}{eid}")


def _untag(t: Term) -> Term:
    if isinstance(t, Var):
        return Var(t.name.split(_TAG, 1)[0], t.negative)
    if isinstance(t, (And, Or)):
        return type(t)(_untag(t.left), _untag(t.right))
    return t


def _edge_of(v: Var) -> int:
    return int(v.name.split(_TAG, 1)[1])


def _leaves(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, (And, Or)):
        yield from _leaves(t.left)
        yield from _leaves(t.right)


def _nodes_with_paths(t: Term, path: tuple = ()) -> Iterator[tuple[tuple, Term]]:
    yield path, t
    if isinstance(t, (And, Or)):
        for i, c in enumerate(flatten(t)):
            yield from _nodes_with_paths(c, path + (i,))


STRUCTURAL = {"cd": CD, "acd": CD, "cu": CU, "acu": CU, "wd": WD, "awd": WD, "wu": WU, "awu": WU}


@dataclass
class _Candidate:
    term: Term
    kind: str | None = None
    consumed: tuple[int, ...] = ()  # edges entering the new node
    produced: tuple[Var, ...] = ()  # placeholder leaves leaving it
    atom: str = ""


class _Builder:
    def __init__(self):
        self.flow = AtomicFlow()
        self.pending = itertools.count(10**9)

    def placeholder(self, atom: str) -> Var:
        return Var(f"{atom}{_TAG}{next(self.pending)}")

    def structural(self, t: Term, kind: str, names: Sequence[str]) -> Iterator[_Candidate]:
        if kind == CD:
            for path, node in _nodes_with_paths(t):
                if not isinstance(node, Or):
                    continue
                kids = flatten(node)
                for i, j in itertools.combinations(range(len(kids)), 2):
                    a, b = kids[i], kids[j]
                    if _untag(a) != _untag(b):
                        continue
                    if not isinstance(a, Var):
                        yield _Candidate(None, atom=f"non-atomic contraction at {path + (i,)}")
                        continue
                    atom = _untag(a).name
                    new = self.placeholder(atom)
                    rest = [k for n, k in enumerate(kids) if n not in (i, j)]
                    repl = disj(new, *rest) if rest else new
                    yield _Candidate(nary_replace(t, path, repl), CD, (_edge_of(a), _edge_of(b)), (new,), atom)
        elif kind == CU:
            for path, node in _nodes_with_paths(t):
                if isinstance(node, Var):
                    atom = _untag(node).name
                    p, q = self.placeholder(atom), self.placeholder(atom)
                    yield _Candidate(nary_replace(t, path, And(p, q)), CU, (_edge_of(node),), (p, q), atom)
                elif isinstance(node, (And, Or)):
                    yield _Candidate(None, atom=f"non-atomic cocontraction at {path}")
        elif kind == WD:
            for path, node in _nodes_with_paths(t):
                targets = [(path, node, None)]
                if isinstance(node, And):
                    kids = flatten(node)
                    for r in range(2, len(kids)):
                        for sub in itertools.combinations(range(len(kids)), r):
                            targets.append((path, node, sub))
                for p, nd, sub in targets:
                    for atom in names:
                        new = self.placeholder(atom)
                        if sub is None:
                            repl = Or(nd, new)
                        else:
                            kids = flatten(nd)
                            inner = Or(conj(*(kids[k] for k in sub)), new)
                            repl = conj(inner, *(kids[k] for k in range(len(kids)) if k not in sub))
                        yield _Candidate(nary_replace(t, p, repl), WD, (), (new,), atom)
        elif kind == WU:
            for path, node in _nodes_with_paths(t):
                if not isinstance(node, And):
                    continue
                kids = flatten(node)
                for i, k in enumerate(kids):
                    rest = kids[:i] + kids[i + 1 :]
                    repl = conj(*rest)
                    if isinstance(k, Var):
                        yield _Candidate(nary_replace(t, path, repl), WU, (_edge_of(k),), (), _untag(k).name)
                    else:
                        yield _Candidate(None, atom=f"non-atomic coweakening at {path + (i,)}")

    def commit(self, cand: _Candidate) -> Term:
        f = self.flow
        if cand.kind is None:
            return cand.term
        nid = f._new_node(cand.kind)
        for e in cand.consumed:
            f.edges[e].dst = nid
        mapping = {}
        for ph in cand.produced:
            eid = f._new_edge(cand.atom, src=nid)
            mapping[ph.name] = _tagged(cand.atom, eid)
        return _rename(cand.term, mapping)


def _rename(t: Term, mapping: dict[str, Var]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, (And, Or)):
        return type(t)(_rename(t.left, mapping), _rename(t.right, mapping))
    return t


def _linear_rules(rules: RuleSet | None) -> dict:
    cat = {n: r for n, r in builtin_rules().items() if n not in STRUCTURAL}
    if rules is not None:
        cat.update({r.name: r for r in rules if r.name not in STRUCTURAL})
    return cat


def extract_flow(d: Derivation, rules: RuleSet | None = None) -> AtomicFlow:
    """Trace every variable occurrence through ``d``.

    Atomic structural steps (``cd``/``cu``/``wd``/``wu`` and their ``a``
    prefixed forms) create one node each; linear and congruence steps only
    move occurrences.  When several occurrence choices reproduce the next
    line, the first in the traversal order of the tagged term is taken.
    """
    if d.modulo not in ("none", "AC", "ACU"):
        raise FlowError("flows are extracted modulo none, AC or ACU only")
    modulo = "AC" if d.modulo == "none" else d.modulo
    for t in d.lines:
        if any(v.negative for v in _leaves(t)):
            raise FlowError("flows need negation-free lines")
    b = _Builder()
    f = b.flow
    cur = d.lines[0]

    def tag(u: Term) -> Term:
        if isinstance(u, Var):
            eid = f._new_edge(u.name)
            f.upper.append(eid)
            return _tagged(u.name, eid)
        if isinstance(u, (And, Or)):
            return type(u)(tag(u.left), tag(u.right))
        return u

    cur = normal_form(tag(cur), modulo)
    linear = _linear_rules(rules)
    for i in range(len(d.lines) - 1):
        want = normal_form(d.lines[i + 1], modulo)
        names = sorted(base_names(d.lines[i + 1]))
        rule_names = [d.steps[i].rule] if d.steps else list(STRUCTURAL) + sorted(linear)
        chosen = None
        problem = None
        if normal_form(_untag(cur), modulo) == want and not d.steps:
            continue
        for rn in rule_names:
            if rn in STRUCTURAL:
                cands = b.structural(cur, STRUCTURAL[rn], names)
            elif rn in linear:
                cands = (
                    _Candidate(red.result)
                    for red in rule_reducts(cur, linear[rn], modulo, canonical=False)
                )
            else:
                raise FlowError(f"step {i}: unknown rule {rn!r}")
            for cand in cands:
                if cand.term is None:
                    problem = problem or cand.atom
                    continue
                if normal_form(_untag(cand.term), modulo) == want:
                    chosen = cand
                    break
            if chosen:
                break
        if chosen is None:
            if problem:
                raise FlowError(f"step {i}: {problem}")
            raise FlowError(f"step {i}: no atomic instance reproduces the next line")
        cur = normal_form(b.commit(chosen), modulo)
    f.lower = [_edge_of(v) for v in _leaves(cur)]
    f.validate()
    return f


# ---------------------------------------------------------------------------
# Flow rewriting


@dataclass(frozen=True)
class Redex:
    rule: str
    upper: int  # node
    lower: int  # node
    edge: int


NORM_RULES = ("wd-cd", "wd-cu", "wd-wu", "cd-wu", "cu-wu", "cd-cu")
LOOP_RULES = ("cd-cu", "cu-cd")


def norm_rules() -> tuple[str, ...]:
    """Names of the norm rules, each keyed by the (upper, lower) node kinds of its redex."""
    return NORM_RULES


_PAIR = {
    (WD, CD): "wd-cd",
    (WD, CU): "wd-cu",
    (WD, WU): "wd-wu",
    (CD, WU): "cd-wu",
    (CU, WU): "cu-wu",
    (CD, CU): "cd-cu",
}


def _depth(f: AtomicFlow) -> dict[int, int]:
    depth = {}
    for n in f.topological_order():
        ins = [f.edges[e].src for e in f.inputs(n)]
        depth[n] = max((depth[s] + 1 for s in ins if s is not None), default=0)
    return depth


def find_redexes(f: AtomicFlow, rules: Iterable[str] = NORM_RULES) -> list[Redex]:
    """Redexes ordered topmost first, then by node id (leftmost)."""
    allowed = set(rules)
    depth = _depth(f)
    out = []
    for k, e in f.edges.items():
        if e.src is None or e.dst is None:
            continue
        name = _PAIR.get((f.nodes[e.src], f.nodes[e.dst]))
        if name in allowed:
            out.append(Redex(name, e.src, e.dst, k))
    if "cu-cd" in allowed:
        for n, kind in f.nodes.items():
            if kind != CU:
                continue
            outs = f.outputs(n)
            dsts = {f.edges[o].dst for o in outs}
            if len(dsts) == 1 and None not in dsts and f.nodes[dsts.pop()] == CD:
                out.append(Redex("cu-cd", n, f.edges[outs[0]].dst, outs[0]))
    return sorted(out, key=lambda r: (depth[r.upper], r.upper, r.lower, r.rule))


def apply_redex(f: AtomicFlow, r: Redex) -> AtomicFlow:
    g = f.copy()
    u, v, e = r.upper, r.lower, r.edge
    atom = g.edges[e].atom
    if r.rule == "wd-cd":
        (other,) = [x for x in g.inputs(v) if x != e]
        (out,) = g.outputs(v)
        g._drop_edge(e)
        g._fuse(other, out)
        g._drop_node(u)
        g._drop_node(v)
    elif r.rule == "wd-cu":
        outs = g.outputs(v)
        g._drop_edge(e)
        g._drop_node(u)
        g._drop_node(v)
        for o in outs:
            g.edges[o].src = g._new_node(WD)
    elif r.rule == "wd-wu":
        g._drop_edge(e)
        g._drop_node(u)
        g._drop_node(v)
    elif r.rule == "cd-wu":
        ins = g.inputs(u)
        g._drop_edge(e)
        g._drop_node(u)
        g._drop_node(v)
        for i in ins:
            g.edges[i].dst = g._new_node(WU)
    elif r.rule == "cu-wu":
        (inp,) = g.inputs(u)
        (other,) = [x for x in g.outputs(u) if x != e]
        g._drop_edge(e)
        g._fuse(inp, other)
        g._drop_node(u)
        g._drop_node(v)
    elif r.rule == "cd-cu":
        i1, i2 = g.inputs(u)
        o1, o2 = g.outputs(v)
        g._drop_edge(e)
        g._drop_node(u)
        g._drop_node(v)
        a1, a2 = g._new_node(CU), g._new_node(CU)
        b1, b2 = g._new_node(CD), g._new_node(CD)
        g.edges[i1].dst = a1
        g.edges[i2].dst = a2
        g._new_edge(atom, a1, b1)
        g._new_edge(atom, a1, b2)
        g._new_edge(atom, a2, b1)
        g._new_edge(atom, a2, b2)
        g.edges[o1].src = b1
        g.edges[o2].src = b2
    elif r.rule == "cu-cd":
        (inp,) = g.inputs(u)
        (out,) = g.outputs(v)
        for o in g.outputs(u):
            g._drop_edge(o)
        g._fuse(inp, out)
        g._drop_node(u)
        g._drop_node(v)
    else:
        raise FlowError(f"unknown flow rule {r.rule!r}")
    return g


def is_normal(f: AtomicFlow, rules: Iterable[str] = NORM_RULES) -> bool:
    return not find_redexes(f, rules)


@dataclass
class FlowTrace:
    result: AtomicFlow
    steps: list[tuple[str, AtomicFlow]]

    def __len__(self) -> int:
        return len(self.steps)


def rewrite_flow(
    f: AtomicFlow,
    rules: Iterable[str] = NORM_RULES,
    strategy: str = "leftmost-topmost",
    budget: int = 100_000,
) -> FlowTrace:
    """Rewrite to normal form, recording each (rule, resulting flow)."""
    if strategy != "leftmost-topmost":
        raise FlowError(f"unknown strategy {strategy!r}")
    rules = tuple(rules)
    steps = []
    cur = f
    for _ in range(budget):
        redexes = find_redexes(cur, rules)
        if not redexes:
            return FlowTrace(cur, steps)
        cur = apply_redex(cur, redexes[0])
        steps.append((redexes[0].rule, cur))
    raise FlowError(f"no normal form within {budget} steps")


# ---------------------------------------------------------------------------
# Contraction loops


@dataclass(frozen=True)
class ContractionLoop:
    top: int
    bottom: int
    first: tuple[int, ...]  # edge ids
    second: tuple[int, ...]


def has_contraction_loop(f: AtomicFlow) -> ContractionLoop | None:
    """A node pair joined by two distinct downward paths, or None."""
    order = f.topological_order()
    for start in order:
        # paths[n]: up to two distinct edge paths from start to n
        paths: dict[int, list[tuple[int, ...]]] = {start: [()]}
        for n in order[order.index(start):]:
            if n not in paths:
                continue
            for k in f.outputs(n):
                d = f.edges[k].dst
                if d is None:
                    continue
                bucket = paths.setdefault(d, [])
                for p in paths[n]:
                    if len(bucket) < 2:
                        bucket.append(p + (k,))
        for n in order:
            if n != start and len(paths.get(n, [])) >= 2:
                a, b = paths[n][:2]
                return ContractionLoop(start, n, a, b)
    return None


def weights(f: AtomicFlow) -> dict[int, int]:
    """Per CU node: the largest number of CD nodes on a path from the top."""
    cds = {}
    for n in f.topological_order():
        above = [f.edges[e].src for e in f.inputs(n)]
        best = max((cds[s] + (f.nodes[s] == CD) for s in above if s is not None), default=0)
        cds[n] = best
    return {n: w for n, w in cds.items() if f.nodes[n] == CU}


def weight_measure(f: AtomicFlow) -> int:
    return sum(4**w for w in weights(f).values())


def _trees(f: AtomicFlow, kind: str) -> list[list[int]]:
    """Maximal connected groups of ``kind`` nodes joined by direct edges."""
    seen, groups = set(), []
    for n in sorted(f.nodes):
        if f.nodes[n] != kind or n in seen:
            continue
        group, stack = [], [n]
        seen.add(n)
        while stack:
            m = stack.pop()
            group.append(m)
            for k in f.inputs(m) + f.outputs(m):
                e = f.edges[k]
                for other in (e.src, e.dst):
                    if other is not None and other not in seen and f.nodes[other] == kind:
                        seen.add(other)
                        stack.append(other)
        groups.append(sorted(group))
    return groups


def _tree_boundary(f: AtomicFlow, group: list[int]) -> tuple[list[int], list[int]]:
    inside = set(group)
    ins = sorted(k for n in group for k in f.inputs(n) if f.edges[k].src not in inside)
    outs = sorted(k for n in group for k in f.outputs(n) if f.edges[k].dst not in inside)
    return ins, outs


def _strip(f: AtomicFlow, group: list[int]) -> None:
    for n in group:
        for k in f.outputs(n):
            if f.edges[k].dst in group:
                f._drop_edge(k)
    for n in group:
        f._drop_node(n)


def _rebuild_cu_tree(f: AtomicFlow, group: list[int], first: tuple[int, int]) -> int:
    """Re-associate a CU tree as a comb whose last CU emits the two leaves ``first``."""
    (root,), leaves = _tree_boundary(f, group)
    atom = f.edges[root].atom
    _strip(f, group)
    pair = f._new_node(CU)
    for leaf in first:
        f.edges[leaf].src = pair
    items = [k for k in leaves if k not in first] + [None]  # None stands for the pair node
    feed = root
    while len(items) > 1:
        comb = f._new_node(CU)
        f.edges[feed].dst = comb
        k = items.pop(0)
        f.edges[k].src = comb
        if len(items) == 1:
            f._new_edge(atom, comb, pair)
            items.pop()
            break
        feed = f._new_edge(atom, comb, None)
    else:
        f.edges[feed].dst = pair
    return pair


def _rebuild_cd_tree(f: AtomicFlow, group: list[int], first: tuple[int, int]) -> int:
    """Re-associate a CD tree as a comb whose first CD takes the two inputs ``first``."""
    leaves, (root,) = _tree_boundary(f, group)
    atom = f.edges[root].atom
    _strip(f, group)
    pair = f._new_node(CD)
    for leaf in first:
        f.edges[leaf].dst = pair
    last = pair
    for k in leaves:
        if k in first:
            continue
        comb = f._new_node(CD)
        f._new_edge(atom, last, comb)
        f.edges[k].dst = comb
        last = comb
    f.edges[root].src = last
    return pair


@dataclass
class LoopElimination:
    result: AtomicFlow
    steps: list[tuple[str, int]]  # (rule, weight measure after the step)
    initial_measure: int

    def measure_decreases(self) -> bool:
        prev = self.initial_measure
        for rule, m in self.steps:
            if rule in LOOP_RULES and not m < prev:
                return False
            if rule == "assoc" and m != prev:
                return False
            prev = m
        return True


def eliminate_loops(f: AtomicFlow, budget: int = 100_000) -> LoopElimination:
    """Normalise under cd-cu and cu-cd modulo re-association of C-trees.

    First every CD feeding a CU is exchanged, which leaves all CU nodes
    above all CD nodes.  Then, while some CU tree has two leaves entering
    the same CD tree, both trees are re-associated so those leaves meet
    at a single CU/CD pair, which cu-cd removes.
    """
    cur = f.copy()
    steps: list[tuple[str, int]] = []
    start = weight_measure(cur)
    for _ in range(budget):
        red = find_redexes(cur, ("cd-cu",))
        if not red:
            break
        cur = apply_redex(cur, red[0])
        steps.append(("cd-cu", weight_measure(cur)))
    else:
        raise FlowError("cd-cu exchange did not terminate within budget")
    for _ in range(budget):
        hit = _shared_leaves(cur)
        if hit is None:
            break
        cu_group, cd_group, pair = hit
        _rebuild_cu_tree(cur, cu_group, pair)
        _rebuild_cd_tree(cur, cd_group, pair)
        cur.validate()
        steps.append(("assoc", weight_measure(cur)))
        red = [r for r in find_redexes(cur, ("cu-cd",))]
        cur = apply_redex(cur, red[0])
        steps.append(("cu-cd", weight_measure(cur)))
    else:
        raise FlowError("loop elimination did not terminate within budget")
    cur.validate()
    return LoopElimination(cur, steps, start)


def _shared_leaves(f: AtomicFlow):
    cd_of = {}
    cd_groups = _trees(f, CD)
    for i, g in enumerate(cd_groups):
        for n in g:
            cd_of[n] = i
    for group in _trees(f, CU):
        _, leaves = _tree_boundary(f, group)
        by_tree: dict[int, list[int]] = {}
        for k in leaves:
            d = f.edges[k].dst
            if d is not None and f.nodes[d] == CD:
                by_tree.setdefault(cd_of[d], []).append(k)
        for t, ks in sorted(by_tree.items()):
            if len(ks) >= 2:
                return group, cd_groups[t], (ks[0], ks[1])
    return None


# ---------------------------------------------------------------------------
# Random flows


def random_flow(rng: random.Random, max_nodes: int = 12, atoms: Sequence[str] = ("a", "b")) -> AtomicFlow:
    """Grow a flow top-down by attaching random nodes to open edges."""
    f = AtomicFlow()
    for _ in range(rng.randint(1, 3)):
        f.upper.append(f._new_edge(rng.choice(atoms)))
    target = rng.randint(0, max_nodes)
    attempts = 0
    while len(f.nodes) < target and attempts < 10 * max_nodes:
        attempts += 1
        open_edges = sorted(k for k, e in f.edges.items() if e.dst is None)
        kind = rng.choice((CD, CU, WD, WU))
        if kind == WD:
            n = f._new_node(WD)
            f._new_edge(rng.choice(atoms), n, None)
        elif not open_edges:
            continue
        elif kind == CU or kind == WU:
            k = rng.choice(open_edges)
            n = f._new_node(kind)
            f.edges[k].dst = n
            if kind == CU:
                f._new_edge(f.edges[k].atom, n, None)
                f._new_edge(f.edges[k].atom, n, None)
        else:
            atom = f.edges[rng.choice(open_edges)].atom
            same = [k for k in open_edges if f.edges[k].atom == atom]
            if len(same) < 2:
                continue
            a, b = rng.sample(same, 2)
            n = f._new_node(CD)
            f.edges[a].dst = n
            f.edges[b].dst = n
            f._new_edge(atom, n, None)
    f.lower = sorted(k for k, e in f.edges.items() if e.dst is None)
    f.validate()
    return f


__all__ = [
    "AtomicFlow",
    "Edge",
    "FlowError",
    "CD",
    "CU",
    "WD",
    "WU",
    "extract_flow",
    "norm_rules",
    "NORM_RULES",
    "find_redexes",
    "apply_redex",
    "is_normal",
    "rewrite_flow",
    "FlowTrace",
    "has_contraction_loop",
    "ContractionLoop",
    "eliminate_loops",
    "LoopElimination",
    "weights",
    "weight_measure",
    "random_flow",
]
