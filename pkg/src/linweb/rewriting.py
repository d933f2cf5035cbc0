"""Rewrite rules, matching modulo AC(U), bounded search and medial tools.

Terms are matched modulo associativity and commutativity on their
flattened n-ary views: a pattern connective matches any sub-multiset of
an n-ary chain of the same connective, and whatever is left over stays in
the surrounding chain.  Positions in this module index children of those
n-ary views.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path as FilePath
from typing import Callable, Iterable, Iterator, Sequence

from .inference import Derivation, Inference, InferenceError, Step, strictly_less
from .semantics import truth_table
from .terms import (
    And,
    Const,
    Or,
    Term,
    TermError,
    Var,
    ac_canonical,
    base_names,
    conj,
    disj,
    dual,
    flatten,
    fresh_name,
    is_plain_linear,
    normalize_acu,
    normalize_acu_prime,
    parse_term,
    render,
    substitute,
)
from .webs import AND, OR, web_of

CONGRUENCES = ("none", "AC", "ACU", "ACU'")


class RewriteError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Rules


def _var_names(t: Term) -> frozenset[str]:
    return base_names(t)


def _is_linear_pattern(t: Term) -> bool:
    names = [v.name for v in _leaves(t) if isinstance(v, Var)]
    return len(names) == len(set(names))


def _leaves(t: Term) -> Iterator[Term]:
    if isinstance(t, (And, Or)):
        yield from _leaves(t.left)
        yield from _leaves(t.right)
    else:
        yield t


@dataclass(frozen=True)
class RewriteRule:
    """``lhs -> rhs`` with schematic variables ranging over terms.

    Variables listed in ``atomic`` may only be bound to a single variable
    (atomic instances of structural rules).
    """

    name: str
    lhs: Term
    rhs: Term
    atomic: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.lhs == self.rhs:
            raise RewriteError(f"rule {self.name}: lhs equals rhs")

    @classmethod
    def parse(cls, name: str, lhs: str, rhs: str, atomic: Iterable[str] = ()) -> "RewriteRule":
        return cls(name, parse_term(lhs), parse_term(rhs), frozenset(atomic))

    @property
    def left_linear(self) -> bool:
        return _is_linear_pattern(self.lhs)

    @property
    def right_linear(self) -> bool:
        return _is_linear_pattern(self.rhs)

    @property
    def variables(self) -> frozenset[str]:
        return _var_names(self.lhs) | _var_names(self.rhs)

    @property
    def fresh_variables(self) -> frozenset[str]:
        """Variables of the rhs that the lhs does not bind."""
        return _var_names(self.rhs) - _var_names(self.lhs)

    def as_inference(self) -> Inference:
        return Inference(self.lhs, self.rhs, self.name)

    def __str__(self) -> str:
        return f"{self.name}: {render(self.lhs)} -> {render(self.rhs)}"


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[RewriteRule, ...]
    modulo: str = "AC"

    def __post_init__(self):
        if self.modulo not in CONGRUENCES:
            raise RewriteError(f"unknown congruence {self.modulo!r}")
        names = [r.name for r in self.rules]
        if len(names) != len(set(names)):
            raise RewriteError("rule names must be unique")

    def __iter__(self):
        return iter(self.rules)

    def __getitem__(self, name: str) -> RewriteRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def names(self) -> list[str]:
        return [r.name for r in self.rules]

    def with_modulo(self, modulo: str) -> "RuleSet":
        return RuleSet(self.rules, modulo)

    def to_text(self) -> str:
        lines = [f"modulo {self.modulo}"]
        lines += [str(r) for r in self.rules]
        return "\n".join(lines) + "\n"


def supermix(n: int) -> RewriteRule:
    """``x & (y1 | .. | yn) -> x | (y1 & .. & yn)``."""
    if n < 1:
        raise RewriteError("supermix needs n >= 1")
    ys = [Var(f"y{i}") for i in range(1, n + 1)]
    return RewriteRule(f"supermix{n}", And(Var("x"), disj(*ys)), Or(Var("x"), conj(*ys)))


PHP32_LHS = "(u | v & v') & (w & w' | x & x') & (y & y' | z)"
PHP32_RHS = "u & (w | y) | w' & y' | v' & x' | (v | x) & z"


def builtin_rules() -> dict[str, RewriteRule]:
    rules = [
        RewriteRule.parse("switch", "x & (y | z)", "x & y | z"),
        RewriteRule.parse("medial", "w & x | y & z", "(w | y) & (x | z)"),
        RewriteRule.parse("cd", "x | x", "x"),
        RewriteRule.parse("cu", "x", "x & x"),
        RewriteRule.parse("wd", "x", "x | y"),
        RewriteRule.parse("wu", "x & y", "x"),
        RewriteRule.parse("acd", "x | x", "x", atomic={"x"}),
        RewriteRule.parse("acu", "x", "x & x", atomic={"x"}),
        RewriteRule.parse("awd", "x", "x | y", atomic={"y"}),
        RewriteRule.parse("awu", "x & y", "x", atomic={"y"}),
        RewriteRule.parse("php32", PHP32_LHS, PHP32_RHS),
    ]
    rules += [supermix(n) for n in range(1, 5)]
    return {r.name: r for r in rules}


_SHORTHAND = {"s": "switch", "m": "medial"}


def rule_set(spec: str | Iterable[str], modulo: str = "AC") -> RuleSet:
    """Build a rule set from names, e.g. ``"switch,medial"`` or the letters ``"sm"``."""
    if isinstance(spec, str):
        if "," in spec or spec in builtin_rules() or spec.startswith("supermix"):
            names = [s.strip() for s in spec.split(",") if s.strip()]
        elif set(spec) <= set(_SHORTHAND):
            names = [_SHORTHAND[c] for c in spec]
        else:
            names = [spec]
    else:
        names = list(spec)
    catalogue = builtin_rules()
    out = []
    for name in names:
        m = re.fullmatch(r"supermix(\d+)", name)
        if m:
            out.append(supermix(int(m.group(1))))
        elif name in catalogue:
            out.append(catalogue[name])
        else:
            raise RewriteError(f"unknown rule {name!r}")
    return RuleSet(tuple(out), modulo)


SWITCH_MEDIAL = rule_set("sm")
MEDIAL = rule_set("m")


_RULE_LINE = re.compile(r"^\s*([^:#]+?)\s*:\s*(.+?)\s*->\s*(.+?)\s*$")


def parse_rule_file(text: str) -> RuleSet:
    """Parse ``modulo M`` followed by ``name: lhs -> rhs`` lines (``#`` comments)."""
    modulo = "none"
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("modulo"):
            modulo = line.split(None, 1)[1].strip() if " " in line else ""
            if modulo not in CONGRUENCES:
                raise RewriteError(f"line {lineno}: unknown congruence {modulo!r}")
            continue
        m = _RULE_LINE.match(line)
        if not m:
            raise RewriteError(f"line {lineno}: expected 'name: lhs -> rhs'")
        try:
            rules.append(RewriteRule.parse(m.group(1), m.group(2), m.group(3)))
        except TermError as exc:
            raise RewriteError(f"line {lineno}: {exc}") from exc
    return RuleSet(tuple(rules), modulo)


def load_rules(spec: str, modulo: str | None = None) -> RuleSet:
    """A rule file path, or builtin rule names."""
    path = FilePath(spec)
    if path.is_file():
        rs = parse_rule_file(path.read_text())
    else:
        rs = rule_set(spec)
    return rs.with_modulo(modulo) if modulo else rs


# ---------------------------------------------------------------------------
# Matching


Binding = dict


def _bind(sigma: Binding, name: str, value: Term, eq) -> Binding | None:
    if name in sigma:
        return sigma if eq(sigma[name], value) else None
    out = dict(sigma)
    out[name] = value
    return out


def _match_var(p: Var, s: Term, sigma: Binding, atomic: frozenset, eq) -> Binding | None:
    if p.name in atomic and not isinstance(s, Var):
        return None
    return _bind(sigma, p.name, dual(s) if p.negative else s, eq)


def _nonempty_subsets(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    for r in range(1, len(items) + 1):
        yield from itertools.combinations(items, r)


def _match_ac(p: Term, s: Term, sigma: Binding, atomic: frozenset, eq) -> Iterator[Binding]:
    """Full matches of ``p`` against ``s`` modulo AC."""
    if isinstance(p, Var):
        b = _match_var(p, s, sigma, atomic, eq)
        if b is not None:
            yield b
        return
    if isinstance(p, Const):
        if p == s:
            yield sigma
        return
    if type(p) is not type(s):
        return
    for b, _used in _match_chain(flatten(p), flatten(s), type(p), sigma, atomic, eq, allow_rest=False):
        yield b


def _match_chain(pkids, skids, kind, sigma, atomic, eq, allow_rest):
    """Match pattern children against a sub-multiset of subject children.

    Yields ``(binding, used_indices)``.  Non-variable pattern children take
    exactly one subject child; variables take a nonempty sub-multiset.
    """
    ordered = sorted(pkids, key=lambda q: isinstance(q, Var))
    m = len(skids)

    def go(i: int, free: tuple[int, ...], sig: Binding):
        if i == len(ordered):
            if allow_rest or not free:
                yield sig, tuple(sorted(set(range(m)) - set(free)))
            return
        q = ordered[i]
        remaining_patterns = len(ordered) - i - 1
        if not isinstance(q, Var):
            for j in free:
                rest = tuple(k for k in free if k != j)
                for b in _match_ac(q, skids[j], sig, atomic, eq):
                    yield from go(i + 1, rest, b)
            return
        last = remaining_patterns == 0
        if last and not allow_rest:
            choices = [free] if free else []
        elif q.name in atomic:
            choices = [(j,) for j in free]
        else:
            choices = _nonempty_subsets(free)
        for chosen in choices:
            if len(free) - len(chosen) < remaining_patterns:
                continue
            value = skids[chosen[0]] if len(chosen) == 1 else ac_canonical(_rebuild(kind, [skids[j] for j in chosen]))
            b = _match_var(q, value, sig, atomic, eq)
            if b is None:
                continue
            rest = tuple(k for k in free if k not in chosen)
            yield from go(i + 1, rest, b)

    yield from go(0, tuple(range(m)), sigma)


def _rebuild(kind: type, kids: list[Term]) -> Term:
    return conj(*kids) if kind is And else disj(*kids)


def _match_syntactic(p: Term, s: Term, sigma: Binding, atomic: frozenset, eq) -> Binding | None:
    if isinstance(p, Var):
        return _match_var(p, s, sigma, atomic, eq)
    if isinstance(p, Const):
        return sigma if p == s else None
    if type(p) is not type(s):
        return None
    b = _match_syntactic(p.left, s.left, sigma, atomic, eq)
    return None if b is None else _match_syntactic(p.right, s.right, b, atomic, eq)


# ---------------------------------------------------------------------------
# One-step reducts


def normal_form(t: Term, modulo: str) -> Term:
    if modulo == "none":
        return t
    if modulo == "AC":
        return ac_canonical(t)
    if modulo == "ACU":
        return normalize_acu(t)
    if modulo == "ACU'":
        return normalize_acu_prime(t)
    raise RewriteError(f"unknown congruence {modulo!r}")


def search_key(t: Term):
    """Dedup key: the web for terms that have one, else the canonical rendering."""
    if is_plain_linear(t):
        return web_of(t)
    return render(ac_canonical(t))


@dataclass(frozen=True)
class Reduct:
    step: Step
    result: Term
    redex: Term = field(compare=False)


def _nary_nodes(t: Term, path: tuple = ()) -> Iterator[tuple[tuple, Term]]:
    yield path, t
    if isinstance(t, (And, Or)):
        for i, c in enumerate(flatten(t)):
            yield from _nary_nodes(c, path + (i,))


def nary_subterm(t: Term, path: Sequence[int]) -> Term:
    for i in path:
        t = flatten(t)[i]
    return t


def nary_replace(t: Term, path: Sequence[int], u: Term) -> Term:
    if not path:
        return u
    kids = flatten(t)
    kids[path[0]] = nary_replace(kids[path[0]], path[1:], u)
    return _rebuild(type(t), kids)


def _instantiate(rule: RewriteRule, sigma: Binding, taken: set[str]) -> tuple[Binding, Term]:
    full = dict(sigma)
    for name in sorted(rule.fresh_variables):
        new = fresh_name(name, taken)
        taken.add(new)
        full[name] = Var(new)
    return full, substitute(rule.rhs, full)


def _default_eq(a: Term, b: Term) -> bool:
    return a == b


def rule_reducts(
    t: Term,
    rule: RewriteRule,
    modulo: str = "AC",
    eq: Callable[[Term, Term], bool] = _default_eq,
    canonical: bool = True,
) -> Iterator[Reduct]:
    """All one-step reducts of ``t`` by ``rule`` (not deduplicated).

    ``t`` should already be in ``normal_form(t, modulo)``.  With
    ``canonical`` the reduct is normalised for the congruence.
    """
    taken = set(base_names(t))
    if modulo == "none":
        from .terms import positions, replace_at, subterm_at

        for pos in positions(t):
            sub = subterm_at(t, pos)
            b = _match_syntactic(rule.lhs, sub, {}, rule.atomic, eq)
            if b is None:
                continue
            full, inst = _instantiate(rule, b, set(taken))
            yield Reduct(Step(rule.name, pos, full), replace_at(t, pos, inst), sub)
        return
    p = rule.lhs
    for path, node in _nary_nodes(t):
        if isinstance(p, (And, Or)):
            if type(node) is not type(p):
                continue
            kids = flatten(node)
            for b, used in _match_chain(flatten(p), kids, type(p), {}, rule.atomic, eq, allow_rest=True):
                full, inst = _instantiate(rule, b, set(taken))
                rest = [kids[k] for k in range(len(kids)) if k not in used]
                redex = _rebuild(type(p), [kids[k] for k in used])
                new = _rebuild(type(p), [inst] + rest) if rest else inst
                out = nary_replace(t, path, new)
                yield Reduct(
                    Step(rule.name, path, full),
                    normal_form(out, modulo) if canonical else out,
                    redex,
                )
        else:
            for b in _match_ac(p, node, {}, rule.atomic, eq):
                full, inst = _instantiate(rule, b, set(taken))
                out = nary_replace(t, path, inst)
                yield Reduct(Step(rule.name, path, full), normal_form(out, modulo) if canonical else out, node)


def match_steps(t: Term, rs: RuleSet) -> list[Reduct]:
    """All one-step reducts of ``t`` under ``rs``, one per resulting class.

    Results are sorted by their rendering, so the order is deterministic.
    """
    src = normal_form(t, rs.modulo)
    seen = {}
    for rule in rs:
        for red in rule_reducts(src, rule, rs.modulo):
            key = search_key(red.result) if rs.modulo != "none" else red.result
            if key not in seen:
                seen[key] = red
    return sorted(seen.values(), key=lambda r: (render(r.result), r.step.rule, r.step.position))


# ---------------------------------------------------------------------------
# Search


@dataclass(frozen=True)
class NotReached:
    exhausted: bool
    explored: int = 0

    def __bool__(self) -> bool:
        return False


def default_budget(n: int) -> int:
    return 2 * n**4


DEFAULT_MAX_NODES = 10**6


def _key_for(rs: RuleSet):
    return (lambda t: t) if rs.modulo == "none" else search_key


def reachable(
    s: Term,
    t: Term,
    rs: RuleSet,
    max_depth: int | None = None,
    max_nodes: int | None = DEFAULT_MAX_NODES,
    prune: bool = False,
) -> Derivation | NotReached:
    """Shortest derivation ``s ->* t`` by breadth-first search.

    ``max_depth=None`` means no depth bound.  With ``prune``, terms not
    below ``t`` are dropped, which is only valid for sound rule sets.
    Returns :class:`NotReached` with ``exhausted=True`` when every
    reachable term (within the pruning) was visited.
    """
    key = _key_for(rs)
    start = normal_form(s, rs.modulo)
    goal = key(normal_form(t, rs.modulo))
    parents: dict = {key(start): (None, None, start)}
    if key(start) == goal:
        return Derivation((start,), (), rs.modulo)
    ground = sorted(base_names(s) | base_names(t))
    target_table = truth_table(t, ground) if prune else 0
    frontier = deque([(start, 0)])
    truncated = False
    while frontier:
        cur, depth = frontier.popleft()
        if max_depth is not None and depth >= max_depth:
            truncated = True
            continue
        for red in match_steps(cur, rs):
            k = key(red.result)
            if k in parents:
                continue
            if prune and set(base_names(red.result)) <= set(ground):
                if truth_table(red.result, ground) & ~target_table:
                    continue
            parents[k] = (key(cur), red.step, red.result)
            if k == goal:
                return _trace(parents, k, rs.modulo)
            if max_nodes is not None and len(parents) > max_nodes:
                return NotReached(False, len(parents))
            frontier.append((red.result, depth + 1))
    return NotReached(not truncated, len(parents))


def _trace(parents: dict, k, modulo: str) -> Derivation:
    lines, steps = [], []
    while k is not None:
        prev, step, term = parents[k]
        lines.append(term)
        if step is not None:
            steps.append(step)
        k = prev
    return Derivation(tuple(reversed(lines)), tuple(reversed(steps)), modulo)


@dataclass
class ReachableSet:
    terms: dict
    exhausted: bool

    def __contains__(self, t: Term) -> bool:
        return search_key(t) in self.terms

    def __len__(self) -> int:
        return len(self.terms)


def reachable_set(s: Term, rs: RuleSet, max_nodes: int | None = DEFAULT_MAX_NODES) -> ReachableSet:
    """Every term reachable from ``s`` (keyed like :func:`reachable`)."""
    key = _key_for(rs)
    start = normal_form(s, rs.modulo)
    seen = {key(start): start}
    frontier = deque([start])
    while frontier:
        cur = frontier.popleft()
        for red in match_steps(cur, rs):
            k = key(red.result)
            if k not in seen:
                seen[k] = red.result
                if max_nodes is not None and len(seen) > max_nodes:
                    return ReachableSet(seen, False)
                frontier.append(red.result)
    return ReachableSet(seen, True)


# ---------------------------------------------------------------------------
# Webs: medial criterion and edge preservation


def _same_vertices(s: Term, t: Term):
    if not (is_plain_linear(s) and is_plain_linear(t)):
        raise RewriteError("need constant-free negation-free linear terms")
    ws, wt = web_of(s), web_of(t)
    if ws.vertices != wt.vertices:
        raise RewriteError("both terms must use the same variables")
    return ws, wt


def medial_preorder(s: Term, t: Term) -> bool:
    """Decide the medial criterion on the webs of ``s`` and ``t``.

    Every AND edge of ``s`` must stay AND, and each pair ``x, y`` turning
    from OR to AND needs ``w, z`` with ``wx, yz`` AND and ``wy, wz, xz`` OR
    in ``s``, and ``wx, wz, yz`` AND and ``wy, xz`` OR in ``t``.
    """
    ws, wt = _same_vertices(s, t)
    if not ws.and_edges <= wt.and_edges:
        return False
    vs = ws.vertices
    for x, y in wt.and_edges - ws.and_edges:
        if not any(_medial_witness(ws, wt, x, y, w, z) or _medial_witness(ws, wt, y, x, w, z)
                   for w in vs for z in vs if len({w, x, y, z}) == 4):
            return False
    return True


def _medial_witness(ws, wt, x, y, w, z) -> bool:
    return (
        ws.is_and(w, x) and ws.is_and(y, z)
        and not ws.is_and(w, y) and not ws.is_and(w, z) and not ws.is_and(x, z)
        and wt.is_and(w, x) and wt.is_and(w, z) and wt.is_and(y, z)
        and not wt.is_and(w, y) and not wt.is_and(x, z)
    )


@dataclass(frozen=True)
class EdgeReport:
    preserves_or: bool
    preserves_and: bool
    and_to_or: tuple
    or_to_and: tuple
    count_and: tuple[int, int]

    def to_json(self) -> dict:
        return {
            "preserves_or": self.preserves_or,
            "preserves_and": self.preserves_and,
            "and_to_or": [list(p) for p in self.and_to_or],
            "or_to_and": [list(p) for p in self.or_to_and],
            "count_and": list(self.count_and),
        }


def edge_preservation(inf: Inference) -> EdgeReport:
    from .terms import count_connectives

    ws, wt = _same_vertices(inf.lhs, inf.rhs)
    lost = tuple(sorted(ws.and_edges - wt.and_edges))
    gained = tuple(sorted(wt.and_edges - ws.and_edges))
    return EdgeReport(
        preserves_or=not gained,
        preserves_and=not lost,
        and_to_or=lost,
        or_to_and=gained,
        count_and=(count_connectives(inf.lhs)[0], count_connectives(inf.rhs)[0]),
    )


# ---------------------------------------------------------------------------
# Enumeration and minimality


ENUMERATION_CAP = 7


def _set_partitions(items: tuple) -> Iterator[list[tuple]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [(head,)] + part
        for i in range(len(part)):
            yield part[:i] + [(head,) + part[i]] + part[i + 1 :]


@lru_cache(maxsize=None)
def _rooted(names: tuple[str, ...], kind: str) -> tuple[Term, ...]:
    """AC classes over ``names`` whose root is ``kind`` (or a single variable)."""
    if len(names) == 1:
        return (Var(names[0]),)
    other = OR if kind == AND else AND
    build = conj if kind == AND else disj
    out = []
    for blocks in _set_partitions(names):
        if len(blocks) < 2:
            continue
        options = [_rooted(b, other) for b in blocks]
        for choice in itertools.product(*options):
            out.append(ac_canonical(build(*choice)))
    return tuple(out)


def enumerate_linear_terms(names: Iterable[str], cap: int = ENUMERATION_CAP) -> list[Term]:
    """One AC-canonical linear term per AC class over ``names``, sorted by rendering."""
    vs = tuple(sorted(set(names)))
    if not vs:
        raise RewriteError("need at least one variable")
    if len(vs) > cap:
        raise RewriteError(f"{len(vs)} variables exceed the enumeration cap of {cap}")
    if len(vs) == 1:
        return [Var(vs[0])]
    return sorted(_rooted(vs, AND) + _rooted(vs, OR), key=render)


@dataclass(frozen=True)
class MinimalityVerdict:
    minimal: bool
    intermediate: Term | None = None

    def __bool__(self) -> bool:
        return self.minimal


def is_minimal(inf: Inference, cap: int = ENUMERATION_CAP) -> MinimalityVerdict:
    """No linear term strictly between the two sides (exhaustive)."""
    s, t = inf.lhs, inf.rhs
    if not (is_plain_linear(s) and is_plain_linear(t)) or base_names(s) != base_names(t):
        raise InferenceError("is_minimal needs constant-free negation-free linear sides on the same variables")
    ground = sorted(base_names(s))
    fs, ft = truth_table(s, ground), truth_table(t, ground)
    if fs & ~ft:
        raise InferenceError("is_minimal needs a sound inference")
    for u in enumerate_linear_terms(ground, cap):
        fu = truth_table(u, ground)
        if fs & ~fu == 0 and fu & ~ft == 0 and fu != fs and fu != ft:
            return MinimalityVerdict(False, u)
    return MinimalityVerdict(True)


def is_strict_chain(lines: Sequence[Term]) -> bool:
    return all(strictly_less(a, b) for a, b in zip(lines, lines[1:]))


__all__ = [
    "RewriteRule",
    "RuleSet",
    "RewriteError",
    "builtin_rules",
    "rule_set",
    "supermix",
    "parse_rule_file",
    "load_rules",
    "SWITCH_MEDIAL",
    "MEDIAL",
    "match_steps",
    "rule_reducts",
    "Reduct",
    "normal_form",
    "search_key",
    "reachable",
    "reachable_set",
    "ReachableSet",
    "NotReached",
    "default_budget",
    "medial_preorder",
    "edge_preservation",
    "EdgeReport",
    "enumerate_linear_terms",
    "is_minimal",
    "MinimalityVerdict",
    "nary_subterm",
    "nary_replace",
    "is_strict_chain",
]
