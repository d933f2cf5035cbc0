"""Relation webs: complete graphs with edges labelled AND or OR.

The web of a linear, constant-free, negation-free term labels every pair
of variables with their least common connective.  Webs of such terms are
exactly the P4-free labelled graphs, and two terms share a web iff they
are equal modulo AC.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from .terms import And, Term, Var, ac_canonical, conj, disj, is_plain_linear, render

AND = "and"
OR = "or"


class WebError(ValueError):
    pass


def _pair(x: str, y: str) -> tuple[str, str]:
    return (x, y) if x < y else (y, x)


@dataclass(frozen=True)
class LabelledGraph:
    """Complete graph on ``vertices`` whose AND-labelled pairs are listed.

    Every pair not in ``and_edges`` is labelled OR.  Instances are hashable
    and compare by value, so they double as AC-class keys for terms.
    """

    vertices: tuple[str, ...]
    and_edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        vs = tuple(sorted(set(self.vertices)))
        if vs != tuple(self.vertices):
            object.__setattr__(self, "vertices", vs)
        edges = frozenset(_pair(*e) for e in self.and_edges)
        vset = set(vs)
        for x, y in edges:
            if x == y or x not in vset or y not in vset:
                raise WebError(f"bad edge {(x, y)}")
        object.__setattr__(self, "and_edges", edges)

    @classmethod
    def build(cls, vertices: Iterable[str], and_edges: Iterable[Iterable[str]] = ()) -> "LabelledGraph":
        return cls(tuple(vertices), frozenset(tuple(e) for e in and_edges))

    @classmethod
    def from_labels(cls, vertices: Iterable[str], labels: str) -> "LabelledGraph":
        """Build from a string of ``r``/``g`` (AND/OR) over pairs in lexicographic order."""
        vs = list(vertices)
        pairs = list(itertools.combinations(vs, 2))
        if len(labels) != len(pairs):
            raise WebError("one label per pair expected")
        return cls.build(vs, [p for p, c in zip(pairs, labels) if c == "r"])

    def label(self, x: str, y: str) -> str:
        if x == y:
            raise WebError("no label on the diagonal")
        return AND if _pair(x, y) in self.and_edges else OR

    def is_and(self, x: str, y: str) -> bool:
        return _pair(x, y) in self.and_edges

    def pairs(self) -> Iterator[tuple[str, str]]:
        return itertools.combinations(self.vertices, 2)

    def or_edges(self) -> frozenset[tuple[str, str]]:
        return frozenset(p for p in self.pairs() if p not in self.and_edges)

    def neighbours(self, x: str, label: str) -> set[str]:
        want = label == AND
        return {y for y in self.vertices if y != x and self.is_and(x, y) == want}

    def induced(self, subset: Iterable[str]) -> "LabelledGraph":
        s = set(subset)
        return LabelledGraph(tuple(sorted(s)), frozenset(e for e in self.and_edges if e[0] in s and e[1] in s))

    def relabel(self, x: str, y: str) -> "LabelledGraph":
        """Flip the label of one pair."""
        p = _pair(x, y)
        return LabelledGraph(self.vertices, self.and_edges ^ {p})

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "and_edges": [list(e) for e in sorted(self.and_edges)]}

    @classmethod
    def from_json(cls, data) -> "LabelledGraph":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.build(data["vertices"], data.get("and_edges", []))

    def __str__(self) -> str:
        return f"web({', '.join(self.vertices)}; and={sorted(self.and_edges)})"


RelationWeb = LabelledGraph


def web_of(t: Term) -> LabelledGraph:
    """The relation web of a linear, constant-free, negation-free term."""
    if not is_plain_linear(t):
        raise WebError(f"webs need a linear constant-free negation-free term: {render(t)}")
    edges: set[tuple[str, str]] = set()

    def walk(u: Term) -> list[str]:
        if isinstance(u, Var):
            return [u.name]
        left = walk(u.left)
        right = walk(u.right)
        if isinstance(u, And):
            edges.update(_pair(a, b) for a in left for b in right)
        return left + right

    names = walk(t)
    return LabelledGraph(tuple(sorted(names)), frozenset(edges))


def edge_counts(w: LabelledGraph) -> tuple[int, int]:
    """``(e_and, e_or)``; they sum to n(n-1)/2."""
    n = len(w.vertices)
    e_and = len(w.and_edges)
    return e_and, n * (n - 1) // 2 - e_and


def find_p4(w: LabelledGraph) -> tuple[str, str, str, str] | None:
    """A four-vertex set inducing a P4 in the AND-edges, or None.

    The complement of a P4 is a P4, so this is also the OR-edge test.
    """
    adj = {v: w.neighbours(v, AND) for v in w.vertices}
    for quad in itertools.combinations(w.vertices, 4):
        degs = sorted(len(adj[v] & set(quad)) for v in quad)
        # three edges with degree sequence 1,1,2,2 is exactly a path
        if degs == [1, 1, 2, 2]:
            return quad
    return None


def is_p4_free(w: LabelledGraph) -> tuple[bool, tuple[str, str, str, str] | None]:
    quad = find_p4(w)
    return quad is None, quad


def _components(vertices: list[str], w: LabelledGraph, label: str) -> list[list[str]]:
    rest = set(vertices)
    comps = []
    for v in vertices:
        if v not in rest:
            continue
        comp = []
        stack = [v]
        rest.discard(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for z in w.neighbours(u, label):
                if z in rest:
                    rest.discard(z)
                    stack.append(z)
        comps.append(sorted(comp))
    return comps


def term_of_web(w: LabelledGraph) -> Term:
    """Rebuild the (AC-canonical) linear term whose web is ``w``.

    Cotree decomposition: split on AND-components (root OR) or, failing
    that, on OR-components (root AND).
    """
    if not w.vertices:
        raise WebError("empty web")
    ok, quad = is_p4_free(w)
    if not ok:
        raise WebError(f"graph is not P4-free, witness {quad}")

    def build(vs: list[str]) -> Term:
        if len(vs) == 1:
            return Var(vs[0])
        comps = _components(vs, w, AND)
        if len(comps) > 1:
            return disj(*(build(c) for c in comps))
        comps = _components(vs, w, OR)
        if len(comps) > 1:
            return conj(*(build(c) for c in comps))
        raise WebError(f"no cotree split for {vs}")  # unreachable for P4-free input

    return ac_canonical(build(list(w.vertices)))


def all_labelled_graphs(vertices: Iterable[str]) -> Iterator[LabelledGraph]:
    vs = tuple(sorted(vertices))
    pairs = list(itertools.combinations(vs, 2))
    for mask in range(1 << len(pairs)):
        yield LabelledGraph(vs, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))


def to_dot(w: LabelledGraph, name: str = "web") -> str:
    """Graphviz rendering: AND edges solid, OR edges dashed."""
    lines = [f"graph {name} {{"]
    for v in w.vertices:
        lines.append(f'  "{v}";')
    for x, y in w.pairs():
        style = "solid" if w.is_and(x, y) else "dashed"
        lines.append(f'  "{x}" -- "{y}" [style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
