"""Entailment between arbitrary AND/OR-labelled complete graphs via maximal cliques."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .cliques import labelled_cliques
from .webs import AND, OR, LabelledGraph, WebError, is_p4_free


def _check(g: LabelledGraph, h: LabelledGraph) -> None:
    if g.vertices != h.vertices:
        raise WebError("graphs must share their vertex set")


def rel_and(g: LabelledGraph, h: LabelledGraph) -> bool:
    """Every AND-maxclique of ``g`` contains an AND-maxclique of ``h``."""
    _check(g, h)
    targets = labelled_cliques(h, AND)
    return all(any(c2 <= c for c2 in targets) for c in labelled_cliques(g, AND))


def rel_or(g: LabelledGraph, h: LabelledGraph) -> bool:
    """Every OR-maxclique of ``h`` contains an OR-maxclique of ``g``."""
    _check(g, h)
    sources = labelled_cliques(g, OR)
    return all(any(c2 <= c for c2 in sources) for c in labelled_cliques(h, OR))


def rel_intersect(g: LabelledGraph, h: LabelledGraph) -> bool:
    """Every AND-maxclique of ``g`` meets every OR-maxclique of ``h``.

    On webs of linear terms this is entailment, but on arbitrary graphs
    it can fail to be reflexive.
    """
    _check(g, h)
    return all(a & b for a in labelled_cliques(g, AND) for b in labelled_cliques(h, OR))


RELATIONS = {"and": rel_and, "or": rel_or}


@dataclass(frozen=True)
class ChainNotFound:
    exhausted: bool
    explored: int

    def __bool__(self) -> bool:
        return False


def chain_search(
    start: LabelledGraph,
    end: LabelledGraph,
    relation: str = "and",
    budget: int = 100_000,
    require_p4_free: bool = True,
) -> list[LabelledGraph] | ChainNotFound:
    """Shortest chain from ``start`` to ``end`` where each step flips one edge
    label and is an instance of the chosen relation.  Intermediate graphs
    may contain P4s.
    """
    _check(start, end)
    if relation not in RELATIONS:
        raise WebError(f"relation must be one of {sorted(RELATIONS)}")
    if require_p4_free:
        for g in (start, end):
            ok, quad = is_p4_free(g)
            if not ok:
                raise WebError(f"endpoint is not P4-free, witness {quad}")
    rel = RELATIONS[relation]
    parents = {start: None}
    queue = deque([start])
    while queue:
        g = queue.popleft()
        if g == end:
            chain = []
            while g is not None:
                chain.append(g)
                g = parents[g]
            return chain[::-1]
        for x, y in g.pairs():
            h = g.relabel(x, y)
            if h in parents or not rel(g, h):
                continue
            parents[h] = g
            if len(parents) > budget:
                return ChainNotFound(False, len(parents))
            queue.append(h)
    return ChainNotFound(True, len(parents))


__all__ = ["rel_and", "rel_or", "rel_intersect", "chain_search", "ChainNotFound", "RELATIONS"]
