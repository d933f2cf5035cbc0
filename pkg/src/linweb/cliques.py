"""Maximal clique enumeration (Bron-Kerbosch with Tomita pivoting)."""

from __future__ import annotations

from typing import Hashable, Mapping


def maximal_cliques(adj: Mapping[Hashable, set]) -> list[frozenset]:
    """All maximal cliques of the undirected graph ``adj``, sorted by size then members."""
    out: list[frozenset] = []

    def expand(r: set, p: set, x: set) -> None:
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: len(adj[u] & p))
        for v in sorted(p - adj[pivot], key=repr):
            expand(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    if adj:
        expand(set(), set(adj), set())
    return sorted(out, key=lambda c: (len(c), sorted(map(repr, c))))


def labelled_cliques(graph, label: str) -> list[frozenset[str]]:
    """Maximal cliques of one label in a complete labelled graph."""
    adj = {v: graph.neighbours(v, label) for v in graph.vertices}
    return maximal_cliques(adj)
