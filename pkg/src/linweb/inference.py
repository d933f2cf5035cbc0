"""Soundness, triviality and length measures for linear inferences."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .semantics import (
    TRUTH_TABLE_CAP,
    implies,
    maxterms,
    minterms,
    truth_table,
)
from .terms import (
    BOT,
    TOP,
    Or,
    Term,
    Var,
    base_names,
    count_connectives,
    fresh_name,
    is_linear,
    is_negation_free,
    is_plain_linear,
    literals,
    normalize_acu_prime,
    parse_term,
    rename,
    render,
    substitute,
)
from .webs import edge_counts, web_of


class InferenceError(ValueError):
    pass


@dataclass(frozen=True)
class Inference:
    lhs: Term
    rhs: Term
    name: str = ""

    def __post_init__(self):
        if self.lhs == self.rhs:
            raise InferenceError("an inference needs lhs != rhs")

    @classmethod
    def parse(cls, lhs: str, rhs: str, name: str = "") -> "Inference":
        return cls(parse_term(lhs), parse_term(rhs), name)

    @property
    def ground(self) -> tuple[str, ...]:
        return tuple(sorted(base_names(self.lhs) | base_names(self.rhs)))

    def is_linear(self) -> bool:
        return is_linear(self.lhs) and is_linear(self.rhs)

    def __str__(self) -> str:
        head = f"{self.name}: " if self.name else ""
        return f"{head}{render(self.lhs)} -> {render(self.rhs)}"


@dataclass(frozen=True)
class Step:
    """One rewrite step: rule name, position and matching substitution."""

    rule: str
    position: tuple = ()
    subst: dict = field(default_factory=dict, compare=False, hash=False)

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "position": list(self.position),
            "subst": {k: render(v) for k, v in sorted(self.subst.items())},
        }


@dataclass(frozen=True)
class Derivation:
    """Lines ``t_0 .. t_l`` and the ``l`` steps between them.

    Congruence steps are not counted: each step may land on any term
    equal modulo ``modulo`` to the next line.
    """

    lines: tuple[Term, ...]
    steps: tuple[Step, ...] = ()
    modulo: str = "none"

    def __post_init__(self):
        if not self.lines:
            raise InferenceError("a derivation has at least one line")
        if self.steps and len(self.steps) != len(self.lines) - 1:
            raise InferenceError("need one step per consecutive pair of lines")

    @classmethod
    def of_lines(cls, lines: Iterable[Term], modulo: str = "none") -> "Derivation":
        return cls(tuple(lines), (), modulo)

    def __len__(self) -> int:
        return len(self.lines) - 1

    def to_json(self) -> dict:
        return {
            "modulo": self.modulo,
            "lines": [render(t) for t in self.lines],
            "steps": [s.to_json() for s in self.steps],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Derivation":
        lines = tuple(parse_term(s) for s in data["lines"])
        steps = tuple(
            Step(
                s["rule"],
                tuple(s.get("position", ())),
                {k: parse_term(v) for k, v in s.get("subst", {}).items()},
            )
            for s in data.get("steps", [])
        )
        return cls(lines, steps, data.get("modulo", "none"))


# ---------------------------------------------------------------------------
# Soundness and triviality


def _tables(s: Term, t: Term, ground: Sequence[str], cap: int) -> tuple[int, int]:
    return truth_table(s, ground, cap), truth_table(t, ground, cap)


def is_sound(inf: Inference, cap: int = TRUTH_TABLE_CAP) -> bool:
    """Every assignment satisfying the lhs satisfies the rhs."""
    return implies(inf.lhs, inf.rhs, cap)


def leq(s: Term, t: Term, cap: int = TRUTH_TABLE_CAP) -> bool:
    return implies(s, t, cap)


def strictly_less(s: Term, t: Term, cap: int = TRUTH_TABLE_CAP) -> bool:
    ground = sorted(base_names(s) | base_names(t))
    f, g = _tables(s, t, ground, cap)
    return f & ~g == 0 and f != g


TRIVIALITY_METHODS = ("definition", "minterm", "maxterm")


def _trivial_by_definition(s: Term, t: Term, x: str, ground: Sequence[str], cap: int) -> bool:
    f, g = _tables(s, t, ground, cap)
    bit = 1 << list(ground).index(x)
    for y in range(1 << len(ground)):
        if (f >> (y | bit)) & 1 and not (g >> (y & ~bit)) & 1:
            return False
    return True


def trivial_at_terms(
    s: Term,
    t: Term,
    x: str,
    method: str = "definition",
    ground: Sequence[str] | None = None,
    cap: int = TRUTH_TABLE_CAP,
) -> bool:
    ground = tuple(ground) if ground is not None else tuple(sorted(base_names(s) | base_names(t)))
    if x not in ground:
        raise InferenceError(f"{x} is not a variable of the inference")
    if method == "definition":
        return _trivial_by_definition(s, t, x, ground, cap)
    if not (is_negation_free(s) and is_negation_free(t)):
        raise InferenceError(f"method {method!r} needs a negation-free inference")
    if method == "minterm":
        target = minterms(t, ground).sets
        return all(any(b <= a - {x} for b in target) for a in minterms(s, ground).sets)
    if method == "maxterm":
        source = maxterms(s, ground).sets
        return all(any(b <= a - {x} for b in source) for a in maxterms(t, ground).sets)
    raise InferenceError(f"unknown method {method!r}")


def trivial_at(inf: Inference, x: str, method: str = "definition", cap: int = TRUTH_TABLE_CAP) -> bool:
    """Whether ``f(Y + x) <= g(Y - x)`` for every assignment ``Y``."""
    return trivial_at_terms(inf.lhs, inf.rhs, x, method, inf.ground, cap)


def trivial_variables(inf: Inference, method: str = "definition") -> list[str]:
    return [x for x in inf.ground if trivial_at(inf, x, method)]


def erasure_trivialities(inf: Inference) -> set[str]:
    """Names of variables that occur on only one side of a linear inference."""
    left, right = set(literals(inf.lhs)), set(literals(inf.rhs))
    return {v.name for v in left ^ right}


@dataclass(frozen=True)
class Trivial:
    variable: str
    reason: str = ""

    def __bool__(self) -> bool:
        return False


def eliminate_negation(inf: Inference) -> Inference | Trivial:
    """An equivalent negation-free rule, or the variable witnessing triviality.

    Names that occur only negatively are renamed to fresh positive
    variables.  A name occurring positively on one side and negatively on
    the other (or with both polarities on one side only) makes a sound
    inference trivial there.
    """
    if not inf.is_linear():
        raise InferenceError("eliminate_negation needs a linear inference")
    left = {}
    right = {}
    for side, lits in ((left, literals(inf.lhs)), (right, literals(inf.rhs))):
        for v in lits:
            side.setdefault(v.name, set()).add(v.negative)
    for name in sorted(set(left) | set(right)):
        pl, pr = left.get(name, set()), right.get(name, set())
        if (False in pl and True in pr) or (True in pl and False in pr):
            return Trivial(name, "opposite polarities across the two sides")
        if len(pl | pr) == 2:
            return Trivial(name, "both polarities on one side only")
    taken = set(left) | set(right)
    mapping = {}
    for name in sorted(taken):
        if True in left.get(name, set()) | right.get(name, set()):
            new = fresh_name(name + "'", taken)
            taken.add(new)
            mapping[Var(name, True)] = Var(new)
    if not mapping:
        return inf
    return Inference(rename(inf.lhs, mapping), rename(inf.rhs, mapping), inf.name)


# ---------------------------------------------------------------------------
# Moving trivial variables aside


@dataclass
class DetrivResult:
    s_prime: Term | None
    t_prime: Term | None
    u: Term | None
    moved: list[str]
    witnessed: bool = False
    derivations: tuple | None = None
    degenerate: bool = False
    fully_trivial: bool = False

    @property
    def status(self) -> str:
        if not self.moved:
            return "nontrivial"
        if self.fully_trivial:
            return "fully trivial"
        return "witnessed" if self.witnessed else "unwitnessed"

    def to_json(self) -> dict:
        show = lambda t: None if t is None else render(t)  # noqa: E731
        out = {
            "s_prime": show(self.s_prime),
            "t_prime": show(self.t_prime),
            "u": show(self.u),
            "moved": self.moved,
            "status": self.status,
            "degenerate": self.degenerate,
        }
        if self.derivations:
            out["derivations"] = [d.to_json() for d in self.derivations]
        return out


def remove_trivialities(inf: Inference, budget: int | None = None, frontier_cap: int = 20000) -> DetrivResult:
    """Split a sound linear inference into a nontrivial core plus a side term.

    Repeatedly picks a trivial variable ``x`` and replaces the pair
    ``(s, t)`` by ``(s[x:=T], t[x:=F])``, normalised modulo ACU'.  With
    ``R`` the variables left in the final pair, the side term is
    ``u = t[R:=F]``; every other variable is reported as moved.
    Then ``s <= s' | u``, ``t' | u <= t`` and ``s' -> t'`` is sound with no
    trivial variable.  Derivations ``s ->* s' | u`` and ``t' | u ->* t``
    under switch and medial are searched for within ``budget`` steps.
    """
    s, t = inf.lhs, inf.rhs
    for side in (s, t):
        if not (is_linear(side) and is_negation_free(side)):
            raise InferenceError("remove_trivialities needs a negation-free linear inference")
    if base_names(s) != base_names(t):
        raise InferenceError("both sides must use the same variables")
    if not is_sound(inf):
        raise InferenceError("remove_trivialities needs a sound inference")

    moved: list[str] = []
    cur_s, cur_t = s, t
    while True:
        ground = sorted(base_names(cur_s) | base_names(cur_t))
        x = next((v for v in ground if trivial_at_terms(cur_s, cur_t, v, ground=ground)), None)
        if x is None:
            break
        moved.append(x)
        cur_s = normalize_acu_prime(substitute(cur_s, {x: TOP}))
        cur_t = normalize_acu_prime(substitute(cur_t, {x: BOT}))

    if not moved:
        return DetrivResult(s, t, None, [], witnessed=True, derivations=())

    # variables that vanished together with a moved one count as moved too
    kept = base_names(cur_s) | base_names(cur_t)
    moved += sorted(base_names(s) - kept - set(moved))
    u = normalize_acu_prime(substitute(t, {v: BOT for v in kept}))
    fully = not kept
    result = DetrivResult(
        None if fully else cur_s,
        None if fully else cur_t,
        u,
        moved,
        degenerate=cur_s == cur_t,
        fully_trivial=fully,
    )
    _check_detriv(inf, result)
    if not fully:
        _search_witnesses(inf, result, budget, frontier_cap)
    return result


def _check_detriv(inf: Inference, r: DetrivResult) -> None:
    s, t = inf.lhs, inf.rhs
    if r.fully_trivial:
        ok = leq(s, r.u) and leq(r.u, t)
    else:
        ok = leq(r.s_prime, r.t_prime) and leq(s, Or(r.s_prime, r.u)) and leq(Or(r.t_prime, r.u), t)
        ground = sorted(base_names(r.s_prime) | base_names(r.t_prime))
        ok = ok and not any(trivial_at_terms(r.s_prime, r.t_prime, x, ground=ground) for x in ground)
    if not ok:
        raise AssertionError(f"triviality removal broke its contract on {inf}")


def _search_witnesses(inf: Inference, r: DetrivResult, budget: int | None, frontier_cap: int) -> None:
    from .rewriting import SWITCH_MEDIAL, NotReached, reachable

    left_goal = normalize_acu_prime(Or(r.s_prime, r.u)) if r.u != BOT else r.s_prime
    right_start = normalize_acu_prime(Or(r.t_prime, r.u)) if r.u != BOT else r.t_prime
    n = len(base_names(inf.lhs))
    depth = budget if budget is not None else 4 * n * n
    pieces = []
    for src, dst in ((inf.lhs, left_goal), (right_start, inf.rhs)):
        if not (is_plain_linear(src) and is_plain_linear(dst)) or base_names(src) != base_names(dst):
            return
        found = reachable(src, dst, SWITCH_MEDIAL, max_depth=depth, max_nodes=frontier_cap)
        if isinstance(found, NotReached):
            return
        pieces.append(found)
    r.witnessed = True
    r.derivations = tuple(pieces)


# ---------------------------------------------------------------------------
# Critical minterm / maxterm chains


@dataclass(frozen=True)
class TrivialEndpoints:
    variable: str

    def __bool__(self) -> bool:
        return False


@dataclass
class CriticalChains:
    variables: tuple[str, ...]
    minterm_chains: dict[str, list[frozenset[str]]]
    maxterm_chains: dict[str, list[frozenset[str]]]

    def nu(self, i: int) -> int:
        return sum(len(self.minterm_chains[x][i]) for x in self.variables)

    def mu(self, i: int) -> int:
        return sum(len(self.maxterm_chains[x][i]) for x in self.variables)

    def check(self) -> list[str]:
        """Violated chain invariants (empty when all hold)."""
        problems = []
        for x in self.variables:
            ss, ts = self.minterm_chains[x], self.maxterm_chains[x]
            for i in range(len(ss)):
                if ss[i] & ts[i] != {x}:
                    problems.append(f"S^{x}_{i} & T^{x}_{i} != {{{x}}}")
                if i + 1 < len(ss):
                    if not ss[i + 1] <= ss[i]:
                        problems.append(f"S^{x} not decreasing at {i}")
                    if not ts[i] <= ts[i + 1]:
                        problems.append(f"T^{x} not increasing at {i}")
        return problems


def _tie(s: frozenset) -> tuple:
    return (len(s), tuple(sorted(s)))


def _check_lines(lines: Sequence[Term]) -> tuple[str, ...]:
    if not lines:
        raise InferenceError("empty derivation")
    names = base_names(lines[0])
    for t in lines:
        if not is_plain_linear(t):
            raise InferenceError(f"line is not constant-free negation-free linear: {render(t)}")
        if base_names(t) != names:
            raise InferenceError("all lines must use the same variables")
    for a, b in zip(lines, lines[1:]):
        if not strictly_less(a, b):
            raise InferenceError(f"not strictly increasing: {render(a)} -> {render(b)}")
    return tuple(sorted(names))


def critical_chains(d: Derivation | Sequence[Term]) -> CriticalChains | TrivialEndpoints:
    """Critical minterm and maxterm chains along a strictly increasing sequence.

    For each variable ``x`` a minterm ``S`` of the first line is chosen so
    that no minterm of any line inside ``S`` misses ``x``, then followed
    down by minterms that still contain ``x``; maxterm chains are built
    dually from the last line backwards.  Ties go to the smallest, then
    lexicographically first set.
    """
    lines = list(d.lines if isinstance(d, Derivation) else d)
    X = _check_lines(lines)
    first, last = lines[0], lines[-1]
    for x in X:
        if len(lines) > 1 and trivial_at_terms(first, last, x, ground=X):
            return TrivialEndpoints(x)
    mins = [sorted(minterms(t, X).sets, key=_tie) for t in lines]
    maxs = [sorted(maxterms(t, X).sets, key=_tie) for t in lines]

    min_chains, max_chains = {}, {}
    for x in X:
        start = next(
            (S for S in mins[0] if x in S and all(x in Si for fam in mins for Si in fam if Si <= S)),
            None,
        )
        end = next(
            (T for T in maxs[-1] if x in T and all(x in Ti for fam in maxs for Ti in fam if Ti <= T)),
            None,
        )
        if start is None or end is None:
            raise AssertionError(f"no critical set for {x} although the endpoints are nontrivial")
        chain = [start]
        for fam in mins[1:]:
            chain.append(next(S for S in fam if x in S and S <= chain[-1]))
        min_chains[x] = chain
        back = [end]
        for fam in reversed(maxs[:-1]):
            back.append(next(T for T in fam if x in T and T <= back[-1]))
        max_chains[x] = back[::-1]
    chains = CriticalChains(X, min_chains, max_chains)
    problems = chains.check()
    if problems:
        raise AssertionError("; ".join(problems))
    return chains


@dataclass(frozen=True)
class Measures:
    e_and: int
    e_or: int
    count_and: int
    count_or: int
    nu: int | None = None
    mu: int | None = None


def measures(t: Term, chains: CriticalChains | None = None, index: int | None = None) -> Measures:
    e_and, e_or = edge_counts(web_of(t))
    c_and, c_or = count_connectives(t)
    if chains is None:
        return Measures(e_and, e_or, c_and, c_or)
    return Measures(e_and, e_or, c_and, c_or, chains.nu(index), chains.mu(index))


@dataclass
class MeasureReport:
    length: int
    n: int
    values: list[Measures]
    violations: list[int]
    cubic_violations: list[int]
    lex_range: int
    cubic_range: int

    @property
    def ok(self) -> bool:
        return not self.violations and self.length <= self.lex_range

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "n": self.n,
            "mu": [m.mu for m in self.values],
            "e_and": [m.e_and for m in self.values],
            "count_or": [m.count_or for m in self.values],
            "violations": self.violations,
            "cubic_violations": self.cubic_violations,
            "lex_range": self.lex_range,
            "cubic_range": self.cubic_range,
            "ok": self.ok,
        }


def check_increasing_measure(d: Derivation | Sequence[Term], chains: CriticalChains) -> MeasureReport:
    """Check that ``(mu, e_and)`` strictly increases lexicographically at every step.

    Also checks the ``(mu, #or)`` variant.  Encoding a pair as
    ``mu * (E + 1) + second`` turns strict increase into an integer range
    that bounds the length.
    """
    lines = list(d.lines if isinstance(d, Derivation) else d)
    n = len(chains.variables)
    vals = [measures(t, chains, i) for i, t in enumerate(lines)]
    e_max = n * (n - 1) // 2
    violations, cubic = [], []
    for i in range(len(lines) - 1):
        a, b = vals[i], vals[i + 1]
        if not (a.mu, a.e_and) < (b.mu, b.e_and):
            violations.append(i)
        if not (a.mu, a.count_or) < (b.mu, b.count_or):
            cubic.append(i)
    lex = lambda m: m.mu * (e_max + 1) + m.e_and  # noqa: E731
    cub = lambda m: m.mu * n + m.count_or  # noqa: E731
    return MeasureReport(
        length=len(lines) - 1,
        n=n,
        values=vals,
        violations=violations,
        cubic_violations=cubic,
        lex_range=lex(vals[-1]) - lex(vals[0]),
        cubic_range=cub(vals[-1]) - cub(vals[0]),
    )


def minterm_shrinks(s: Term, t: Term) -> bool:
    """Some minterm of ``t`` is a proper subset of some minterm of ``s``."""
    ms, mt = minterms(s).sets, minterms(t).sets
    return any(b < a for a in ms for b in mt)


def is_globally_trivial(lines: Sequence[Term]) -> tuple[bool, list[str]]:
    """Endpoint trivialities that no single step exhibits."""
    ground = tuple(sorted(base_names(lines[0]) | base_names(lines[-1])))
    ends = [x for x in ground if trivial_at_terms(lines[0], lines[-1], x, ground=ground)]
    local = set()
    for a, b in zip(lines, lines[1:]):
        g = tuple(sorted(base_names(a) | base_names(b)))
        local |= {x for x in g if trivial_at_terms(a, b, x, ground=g)}
    return bool(ends) and not local, ends


__all__ = [
    "Inference",
    "InferenceError",
    "Step",
    "Derivation",
    "is_sound",
    "leq",
    "strictly_less",
    "trivial_at",
    "trivial_at_terms",
    "trivial_variables",
    "erasure_trivialities",
    "eliminate_negation",
    "Trivial",
    "remove_trivialities",
    "DetrivResult",
    "critical_chains",
    "CriticalChains",
    "TrivialEndpoints",
    "Measures",
    "measures",
    "check_increasing_measure",
    "MeasureReport",
    "minterm_shrinks",
    "is_globally_trivial",
]
