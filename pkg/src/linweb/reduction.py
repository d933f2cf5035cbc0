"""Linearising a formula into an inference that is sound iff the formula is valid."""

from __future__ import annotations

from dataclasses import dataclass

from .semantics import implies
from .terms import BOT, TOP, And, Const, Or, Term, Var, conj, disj, fresh_name, render


@dataclass(frozen=True)
class VariableSplit:
    """Fresh variables introduced for one base name.

    ``positive[i][j]`` replaces the i-th positive occurrence in the j-th
    disjunct, ``negative[j][i]`` the j-th negative occurrence likewise.
    """

    name: str
    n: int
    m: int
    positive: tuple[tuple[str, ...], ...]
    negative: tuple[tuple[str, ...], ...]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "positive": [list(r) for r in self.positive],
            "negative": [list(r) for r in self.negative],
        }


@dataclass(frozen=True)
class ReductionOutput:
    s_prime: Term
    t_prime: Term
    mapping: dict[str, VariableSplit]

    def is_sound(self) -> bool:
        return implies(self.s_prime, self.t_prime)

    def to_json(self) -> dict:
        return {
            "s_prime": render(self.s_prime),
            "t_prime": render(self.t_prime),
            "mapping": {k: v.to_json() for k, v in sorted(self.mapping.items())},
        }


def _count(t: Term, counts: dict[str, list[int]]) -> None:
    if isinstance(t, Var):
        counts.setdefault(t.name, [0, 0])[int(t.negative)] += 1
    elif isinstance(t, (And, Or)):
        _count(t.left, counts)
        _count(t.right, counts)


def reduce_tautology(t: Term) -> ReductionOutput:
    """Build ``s' -> t'`` (linear, negation-free) with ``t`` valid iff it is sound.

    A base name with ``n`` positive and ``m`` negative occurrences gets
    ``2nm`` fresh variables.  The i-th positive occurrence becomes the
    disjunction of ``x.p.i.1 .. x.p.i.m`` and the j-th negative occurrence
    the disjunction of ``x.n.1.j .. x.n.n.j``; ``s'`` conjoins every pair
    ``x.p.i.j | x.n.i.j``.  A polarity with no partner is replaced by ``F``.
    Occurrences are numbered left to right from 1.
    """
    counts: dict[str, list[int]] = {}
    _count(t, counts)
    taken = set(counts)
    mapping: dict[str, VariableSplit] = {}
    for name in sorted(counts):
        n, m = counts[name]
        pos, neg = [], []
        for i in range(1, n + 1):
            row = []
            for j in range(1, m + 1):
                a = fresh_name(f"{name}.p.{i}.{j}", taken)
                taken.add(a)
                row.append(a)
            pos.append(tuple(row))
        for j in range(1, m + 1):
            row = []
            for i in range(1, n + 1):
                b = fresh_name(f"{name}.n.{i}.{j}", taken)
                taken.add(b)
                row.append(b)
            neg.append(tuple(row))
        mapping[name] = VariableSplit(name, n, m, tuple(pos), tuple(neg))

    seen = {name: [0, 0] for name in counts}

    def walk(u: Term) -> Term:
        if isinstance(u, Const):
            return u
        if isinstance(u, Var):
            split = mapping[u.name]
            k = seen[u.name][int(u.negative)]
            seen[u.name][int(u.negative)] += 1
            row = split.negative[k] if u.negative else split.positive[k]
            return disj(*(Var(v) for v in row)) if row else BOT
        return type(u)(walk(u.left), walk(u.right))

    t_prime = walk(t)
    pairs = [
        Or(Var(split.positive[i][j]), Var(split.negative[j][i]))
        for split in mapping.values()
        for i in range(split.n)
        for j in range(split.m)
    ]
    s_prime = conj(*pairs) if pairs else TOP
    return ReductionOutput(s_prime, t_prime, mapping)


__all__ = ["reduce_tautology", "ReductionOutput", "VariableSplit"]
