"""Boolean semantics of terms: truth tables, minterms and maxterms.

Assignments are sets of variable names set to 1.  Truth tables over an
ordered ground set are Python ints: bit ``k`` is the value on the
assignment whose i-th variable is ``(k >> i) & 1``.  Bitwise ``&``/``|``
on those ints evaluate a term on every assignment at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import AbstractSet, Iterable, Sequence

from .cliques import labelled_cliques
from pysat.solvers import Solver

from .terms import And, Const, Or, Term, Var, base_names, dual, is_negation_free, render
from .webs import AND, OR, LabelledGraph, term_of_web

TRUTH_TABLE_CAP = 22


class SemanticsError(ValueError):
    pass


def evaluate(t: Term, assignment: AbstractSet[str], ground: AbstractSet[str] | None = None) -> int:
    """Value (0 or 1) of ``t`` when exactly the names in ``assignment`` are 1.

    ``ground`` is the variable set the assignment ranges over; every base
    name of ``t`` must belong to it.
    """
    if ground is not None:
        missing = base_names(t) - set(ground)
        if missing:
            raise SemanticsError(f"unbound variables {sorted(missing)}")

    def ev(u: Term) -> bool:
        if isinstance(u, Const):
            return u.value
        if isinstance(u, Var):
            return (u.name in assignment) != u.negative
        if isinstance(u, And):
            return ev(u.left) and ev(u.right)
        return ev(u.left) or ev(u.right)

    return int(ev(t))


@lru_cache(maxsize=None)
def _columns(n: int) -> tuple[int, ...]:
    full = (1 << (1 << n)) - 1
    cols = []
    for i in range(n):
        block = 1 << i
        period = 1 << (i + 1)
        pattern = ((1 << block) - 1) << block
        cols.append(pattern * (full // ((1 << period) - 1)))
    return tuple(cols)


def truth_table(t: Term, ground: Sequence[str], cap: int = TRUTH_TABLE_CAP) -> int:
    """Bit-parallel truth table of ``t`` over the ordered ``ground`` names."""
    n = len(ground)
    if n > cap:
        raise SemanticsError(f"{n} variables exceed the truth-table cap of {cap}")
    index = {x: i for i, x in enumerate(ground)}
    cols = _columns(n)
    full = (1 << (1 << n)) - 1

    def tt(u: Term) -> int:
        if isinstance(u, Const):
            return full if u.value else 0
        if isinstance(u, Var):
            try:
                c = cols[index[u.name]]
            except KeyError:
                raise SemanticsError(f"unbound variable {u.name}") from None
            return full ^ c if u.negative else c
        if isinstance(u, And):
            return tt(u.left) & tt(u.right)
        return tt(u.left) | tt(u.right)

    return tt(t)


def full_mask(n: int) -> int:
    return (1 << (1 << n)) - 1


def assignment_index(assignment: AbstractSet[str], ground: Sequence[str]) -> int:
    return sum(1 << i for i, x in enumerate(ground) if x in assignment)


def satisfiable(t: Term) -> bool:
    """SAT check for an NNF term of any size.

    Each connective gets a fresh variable that implies its subformula
    (one-sided Tseitin, enough because NNF is monotone in its gates).
    """
    ids: dict[str, int] = {}
    clauses: list[list[int]] = []
    counter = itertools.count(1)

    def lit(u: Term) -> int:
        if isinstance(u, Var):
            if u.name not in ids:
                ids[u.name] = next(counter)
            return -ids[u.name] if u.negative else ids[u.name]
        if isinstance(u, Const):
            g = next(counter)
            clauses.append([g] if u.value else [-g])
            return g
        a, b = lit(u.left), lit(u.right)
        g = next(counter)
        if isinstance(u, And):
            clauses.extend([[-g, a], [-g, b]])
        else:
            clauses.append([-g, a, b])
        return g

    clauses.append([lit(t)])
    with Solver(name="cadical153", bootstrap_with=clauses) as solver:
        return solver.solve()


def implies(s: Term, t: Term, cap: int = TRUTH_TABLE_CAP) -> bool:
    """``s <= t``; truth tables up to ``cap`` variables, SAT beyond."""
    ground = sorted(base_names(s) | base_names(t))
    if len(ground) <= cap:
        return truth_table(s, ground) & ~truth_table(t, ground) == 0
    return not satisfiable(And(s, dual(t)))


def is_tautology(t: Term, cap: int = TRUTH_TABLE_CAP) -> bool:
    ground = sorted(base_names(t))
    if len(ground) > cap:
        return not satisfiable(dual(t))
    return truth_table(t, ground, cap) == full_mask(len(ground))


# ---------------------------------------------------------------------------
# Set families


def _set_key(s: frozenset) -> tuple:
    return (len(s), tuple(sorted(s)))


def minimal_sets(sets: Iterable[AbstractSet[str]]) -> list[frozenset[str]]:
    """Inclusion-minimal members, deduplicated and sorted by size then lexicographically."""
    ordered = sorted({frozenset(s) for s in sets}, key=_set_key)
    kept: list[frozenset[str]] = []
    for s in ordered:
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


@dataclass(frozen=True)
class SetFamily:
    """A family of subsets of ``ground``, kept sorted by (size, members)."""

    ground: tuple[str, ...]
    sets: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "ground", tuple(sorted(set(self.ground))))
        sets = tuple(sorted({frozenset(s) for s in self.sets}, key=_set_key))
        object.__setattr__(self, "sets", sets)
        extra = set().union(*sets) - set(self.ground) if sets else set()
        if extra:
            raise SemanticsError(f"sets mention {sorted(extra)} outside the ground set")

    @classmethod
    def of(cls, ground: Iterable[str], sets: Iterable[Iterable[str]]) -> "SetFamily":
        return cls(tuple(ground), tuple(frozenset(s) for s in sets))

    def is_antichain(self) -> bool:
        return all(not (a < b) for a in self.sets for b in self.sets)

    def as_lists(self) -> list[list[str]]:
        return [sorted(s) for s in self.sets]

    def __iter__(self):
        return iter(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __contains__(self, s) -> bool:
        return frozenset(s) in self.sets

    def to_json(self) -> dict:
        return {"ground": list(self.ground), "sets": self.as_lists()}

    @classmethod
    def from_json(cls, data: dict) -> "SetFamily":
        return cls.of(data["ground"], data["sets"])

    def lines(self) -> list[str]:
        return ["{" + ", ".join(sorted(s)) + "}" for s in self.sets]


def minimal_transversals(sets: Iterable[AbstractSet[str]]) -> list[frozenset[str]]:
    """Minimal hitting sets (Berge's incremental dualisation).

    The empty family has the single transversal ``{}``; a family
    containing the empty set has none.
    """
    result: list[frozenset[str]] = [frozenset()]
    for s in minimal_sets(sets):
        if not s:
            return []
        grown = []
        for t in result:
            if t & s:
                grown.append(t)
            else:
                grown.extend(t | {x} for x in s)
        result = minimal_sets(grown)
    return result


# ---------------------------------------------------------------------------
# Monotone functions


@dataclass(frozen=True)
class MonotoneFunction:
    """A monotone Boolean function on ``ground``, given by a term or by its minterms."""

    ground: tuple[str, ...]
    term: Term | None = None
    minterm_sets: tuple[frozenset[str], ...] | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "ground", tuple(sorted(set(self.ground))))
        if (self.term is None) == (self.minterm_sets is None):
            raise SemanticsError("give exactly one of term / minterms")
        if self.term is not None:
            if not is_negation_free(self.term):
                raise SemanticsError(f"monotone functions need negation-free terms: {render(self.term)}")
            missing = base_names(self.term) - set(self.ground)
            if missing:
                raise SemanticsError(f"term variables {sorted(missing)} outside the ground set")
        else:
            sets = tuple(minimal_sets(self.minterm_sets))
            extra = set().union(*sets) - set(self.ground) if sets else set()
            if extra:
                raise SemanticsError(f"minterms mention {sorted(extra)} outside the ground set")
            object.__setattr__(self, "minterm_sets", sets)

    @classmethod
    def from_term(cls, t: Term, ground: Iterable[str] | None = None) -> "MonotoneFunction":
        g = tuple(ground) if ground is not None else tuple(sorted(base_names(t)))
        return cls(g, term=t)

    @classmethod
    def from_minterms(cls, ground: Iterable[str], sets: Iterable[Iterable[str]]) -> "MonotoneFunction":
        return cls(tuple(ground), minterm_sets=tuple(frozenset(s) for s in sets))

    def minterms(self) -> SetFamily:
        if self.term is not None:
            return minterms(self.term, self.ground)
        return SetFamily(self.ground, self.minterm_sets)

    def maxterms(self) -> SetFamily:
        if self.term is not None:
            return maxterms(self.term, self.ground)
        return SetFamily(self.ground, tuple(minimal_transversals(self.minterm_sets)))

    def value(self, assignment: AbstractSet[str]) -> int:
        if self.term is not None:
            return evaluate(self.term, assignment)
        return int(any(s <= assignment for s in self.minterm_sets))

    def table(self, cap: int = TRUTH_TABLE_CAP) -> int:
        """Truth table over ``self.ground`` (see module docstring)."""
        if self.term is not None:
            return truth_table(self.term, self.ground, cap)
        n = len(self.ground)
        if n > cap:
            raise SemanticsError(f"{n} variables exceed the truth-table cap of {cap}")
        cols = _columns(n)
        index = {x: i for i, x in enumerate(self.ground)}
        out = 0
        for s in self.minterm_sets:
            m = full_mask(n)
            for x in s:
                m &= cols[index[x]]
            out |= m
        return out


def as_function(f, ground: Iterable[str] | None = None) -> MonotoneFunction:
    if isinstance(f, MonotoneFunction):
        return f
    return MonotoneFunction.from_term(f, ground)


def _inductive(t: Term, want_min: bool) -> list[frozenset[str]]:
    if isinstance(t, Const):
        # T has the single minterm {}, F none; dually for maxterms
        return [frozenset()] if t.value == want_min else []
    if isinstance(t, Var):
        if t.negative:
            raise SemanticsError("minterms need a negation-free term")
        return [frozenset([t.name])]
    left = _inductive(t.left, want_min)
    right = _inductive(t.right, want_min)
    union_case = isinstance(t, Or) == want_min
    if union_case:
        return minimal_sets(left + right)
    return minimal_sets(a | b for a in left for b in right)


def minterms(t: Term, ground: Iterable[str] | None = None) -> SetFamily:
    """MIN(t) by structural induction, pruned to inclusion-minimal sets."""
    g = tuple(ground) if ground is not None else tuple(sorted(base_names(t)))
    return SetFamily(g, tuple(_inductive(t, True)))


def maxterms(t: Term, ground: Iterable[str] | None = None) -> SetFamily:
    """MAX(t), dual of :func:`minterms`."""
    g = tuple(ground) if ground is not None else tuple(sorted(base_names(t)))
    return SetFamily(g, tuple(_inductive(t, False)))


def clique_minterms(w: LabelledGraph) -> SetFamily:
    """Maximal AND-cliques of a web (the minterms of its term)."""
    return SetFamily(w.vertices, tuple(labelled_cliques(w, AND)))


def clique_maxterms(w: LabelledGraph) -> SetFamily:
    return SetFamily(w.vertices, tuple(labelled_cliques(w, OR)))


def minterms_by_table(t: Term, ground: Sequence[str]) -> SetFamily:
    """Brute-force MIN straight from the definition (exponential; for tests)."""
    g = list(ground)
    ones = [frozenset(c) for r in range(len(g) + 1) for c in itertools.combinations(g, r) if evaluate(t, set(c))]
    return SetFamily(tuple(g), tuple(minimal_sets(ones)))


def maxterms_by_table(t: Term, ground: Sequence[str]) -> SetFamily:
    g = list(ground)
    zeros = [
        frozenset(c)
        for r in range(len(g) + 1)
        for c in itertools.combinations(g, r)
        if not evaluate(t, set(g) - set(c))
    ]
    return SetFamily(tuple(g), tuple(minimal_sets(zeros)))


# ---------------------------------------------------------------------------
# Entailment and friends

ENTAIL_METHODS = ("truth_table", "minterm_cover", "maxterm_cover")


def entails(s, t, method: str = "truth_table", cap: int = TRUTH_TABLE_CAP) -> bool:
    """``s <= t`` for monotone functions (or negation-free terms) on one ground set.

    Terms without an explicit ground set are lifted to the union of both
    variable sets.
    """
    if not isinstance(s, MonotoneFunction) or not isinstance(t, MonotoneFunction):
        names = set()
        for f in (s, t):
            names |= set(f.ground) if isinstance(f, MonotoneFunction) else set(base_names(f))
        s = as_function(s, sorted(names)) if not isinstance(s, MonotoneFunction) else s
        t = as_function(t, sorted(names)) if not isinstance(t, MonotoneFunction) else t
    if s.ground != t.ground:
        raise SemanticsError(f"ground sets differ: {s.ground} vs {t.ground}")
    if method == "truth_table":
        fs, ft = s.table(cap), t.table(cap)
        return fs & ~ft == 0
    if method == "minterm_cover":
        targets = t.minterms().sets
        return all(any(b <= a for b in targets) for a in s.minterms().sets)
    if method == "maxterm_cover":
        sources = s.maxterms().sets
        return all(any(b <= a for b in sources) for a in t.maxterms().sets)
    raise SemanticsError(f"unknown method {method!r}")


def threshold(ground: Iterable[str], k: int) -> MonotoneFunction:
    """TH_k: 1 exactly on assignments with at least ``k`` ones."""
    g = tuple(sorted(set(ground)))
    if not 0 <= k <= len(g) + 1:
        raise SemanticsError(f"threshold needs 0 <= k <= {len(g) + 1}")
    return MonotoneFunction.from_minterms(g, itertools.combinations(g, k))


@dataclass(frozen=True)
class ReadOnceVerdict:
    read_once: bool
    witness: Term | None = None
    violation: tuple[frozenset[str], frozenset[str]] | None = None

    def __bool__(self) -> bool:
        return self.read_once


def cooccurrence_web(family: Iterable[AbstractSet[str]], vertices: Iterable[str]) -> LabelledGraph:
    """AND-label exactly the pairs that appear together in some set."""
    edges = set()
    for s in family:
        edges.update(itertools.combinations(sorted(s), 2))
    return LabelledGraph.build(vertices, edges)


def is_read_once(f, cap: int = TRUTH_TABLE_CAP) -> ReadOnceVerdict:
    """Gurvich's test: every minterm meets every maxterm in exactly one variable.

    A positive verdict carries a linear term for ``f``, rebuilt from the
    minterm co-occurrence web and checked against ``f``'s truth table.
    """
    f = as_function(f)
    mins = f.minterms().sets
    maxs = f.maxterms().sets
    for s in mins:
        for t in maxs:
            if len(s & t) != 1:
                return ReadOnceVerdict(False, violation=(s, t))
    if not mins:
        witness: Term = Const(False)
    elif frozenset() in mins:
        witness = Const(True)
    else:
        support = sorted(set().union(*mins))
        witness = term_of_web(cooccurrence_web(mins, support))
    if truth_table(witness, f.ground, cap) != f.table(cap):
        raise SemanticsError("read-once witness does not compute the function")
    return ReadOnceVerdict(True, witness=witness)
