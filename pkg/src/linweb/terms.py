"""Boolean terms in negation normal form.

Terms are immutable binary trees over the constants ``T``/``F``, literals
(a variable name with a polarity) and the connectives ``&`` and ``|``.
Negation only ever sits on a variable; ``~x`` is the dual of ``x``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Union


class TermError(ValueError):
    """Raised for malformed terms and violated term preconditions."""


class ParseError(TermError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Var:
    name: str
    negative: bool = False

    def dual(self) -> "Var":
        return Var(self.name, not self.negative)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class And:
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Or:
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Hole:
    """The single hole of a :class:`Context`."""

    def __str__(self) -> str:
        return "[]"


Term = Union[Const, Var, And, Or]
TOP = Const(True)
BOT = Const(False)
HOLE = Hole()

Path = tuple  # sequence of 0 (left) / 1 (right) child indices


# ---------------------------------------------------------------------------
# Construction helpers


def conj(*terms: Term) -> Term:
    """Right-associated conjunction; the empty conjunction is ``T``."""
    if not terms:
        return TOP
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = And(t, out)
    return out


def disj(*terms: Term) -> Term:
    """Right-associated disjunction; the empty disjunction is ``F``."""
    if not terms:
        return BOT
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Or(t, out)
    return out


def dual(t: Term) -> Term:
    """NNF negation of ``t`` via the De Morgan laws."""
    if isinstance(t, Const):
        return Const(not t.value)
    if isinstance(t, Var):
        return t.dual()
    if isinstance(t, And):
        return Or(dual(t.left), dual(t.right))
    return And(dual(t.left), dual(t.right))


# ---------------------------------------------------------------------------
# Parsing and rendering

_TOKEN = re.compile(r"\s*(?:(?P<op>[()&|~])|(?P<ident>[A-Za-z][A-Za-z0-9_'.]*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", text, pos)
        start = m.start("op") if m.group("op") else m.start("ident")
        if m.group("op"):
            tokens.append(("op", m.group("op"), start))
        else:
            tokens.append(("ident", m.group("ident"), start))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        tok = self.peek()
        return tok[2] if tok else len(self.text)

    def expect(self, value: str) -> None:
        tok = self.peek()
        if tok is None or tok[1] != value:
            raise ParseError(f"expected {value!r}", self.text, self.pos())
        self.i += 1

    def parse(self) -> Term:
        if not self.tokens:
            raise ParseError("empty term", self.text, 0)
        t = self.disj()
        if self.peek() is not None:
            raise ParseError("trailing input", self.text, self.pos())
        return t

    def disj(self) -> Term:
        parts = [self.conj()]
        while (tok := self.peek()) is not None and tok[1] == "|":
            self.i += 1
            parts.append(self.conj())
        return disj(*parts)

    def conj(self) -> Term:
        parts = [self.atom()]
        while (tok := self.peek()) is not None and tok[1] == "&":
            self.i += 1
            parts.append(self.atom())
        return conj(*parts)

    def atom(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.text, len(self.text))
        kind, value, pos = tok
        if value == "(":
            self.i += 1
            t = self.disj()
            self.expect(")")
            return t
        if value == "~":
            self.i += 1
            nxt = self.peek()
            if nxt is None or nxt[0] != "ident" or nxt[1] in ("T", "F"):
                raise ParseError("negation is only allowed on a variable", self.text, pos)
            self.i += 1
            return Var(nxt[1], True)
        if kind == "ident":
            self.i += 1
            if value == "T":
                return TOP
            if value == "F":
                return BOT
            return Var(value)
        raise ParseError(f"unexpected {value!r}", self.text, pos)


def parse_term(text: str) -> Term:
    """Parse the ASCII term grammar (``|`` binds weaker than ``&``).

    >>> parse_term("x & (y | z)")
    And(left=Var(name='x', negative=False), right=Or(left=Var(name='y', negative=False), right=Var(name='z', negative=False)))
    """
    return _Parser(text).parse()


def _prec(t) -> int:
    if isinstance(t, Or):
        return 1
    if isinstance(t, And):
        return 2
    return 3


def render(t) -> str:
    """Inverse of :func:`parse_term`; right-nested chains print flat."""
    if isinstance(t, Hole):
        return "[]"
    if isinstance(t, Const):
        return "T" if t.value else "F"
    if isinstance(t, Var):
        return ("~" if t.negative else "") + t.name
    op = " & " if isinstance(t, And) else " | "
    p = _prec(t)
    left = render(t.left)
    if _prec(t.left) <= p:
        left = f"({left})"
    right = render(t.right)
    if _prec(t.right) < p:
        right = f"({right})"
    return left + op + right


# ---------------------------------------------------------------------------
# Structural queries


def literals(t: Term) -> Iterator[Var]:
    """Variable occurrences, left to right."""
    if isinstance(t, Var):
        yield t
    elif isinstance(t, (And, Or)):
        yield from literals(t.left)
        yield from literals(t.right)


def variables(t: Term) -> frozenset[Var]:
    return frozenset(literals(t))


def base_names(t: Term) -> frozenset[str]:
    return frozenset(v.name for v in literals(t))


def size(t: Term) -> int:
    if isinstance(t, (Const, Var)):
        return 1
    return 1 + size(t.left) + size(t.right)


def count_connectives(t: Term) -> tuple[int, int]:
    """Return ``(#and, #or)``."""
    if isinstance(t, (Const, Var)):
        return (0, 0)
    la, lo = count_connectives(t.left)
    ra, ro = count_connectives(t.right)
    if isinstance(t, And):
        return (la + ra + 1, lo + ro)
    return (la + ra, lo + ro + 1)


def is_linear(t: Term) -> bool:
    """Every variable occurs once; ``x`` and ``~x`` are distinct variables."""
    seen = set()
    for v in literals(t):
        if v in seen:
            return False
        seen.add(v)
    return True


def is_negation_free(t: Term) -> bool:
    return not any(v.negative for v in literals(t))


def is_constant_free(t: Term) -> bool:
    if isinstance(t, Const):
        return False
    if isinstance(t, Var):
        return True
    return is_constant_free(t.left) and is_constant_free(t.right)


def is_plain_linear(t: Term) -> bool:
    """Linear, constant-free and negation-free: the terms that have webs."""
    return is_linear(t) and is_constant_free(t) and is_negation_free(t)


# ---------------------------------------------------------------------------
# Substitution and contexts

Substitution = Mapping[str, Term]


def substitute(t: Term, sigma: Substitution) -> Term:
    """Replace variables by ``sigma[name]``; ``~x`` becomes ``dual(sigma[x])``."""
    if isinstance(t, Const):
        return t
    if isinstance(t, Var):
        if t.name not in sigma:
            return t
        u = sigma[t.name]
        return dual(u) if t.negative else u
    return type(t)(substitute(t.left, sigma), substitute(t.right, sigma))


def subterm_at(t: Term, path: Path) -> Term:
    for step in path:
        if not isinstance(t, (And, Or)):
            raise TermError(f"no position {tuple(path)}")
        t = t.left if step == 0 else t.right
    return t


def replace_at(t: Term, path: Path, u: Term) -> Term:
    if not path:
        return u
    if not isinstance(t, (And, Or)):
        raise TermError(f"no position {tuple(path)}")
    if path[0] == 0:
        return type(t)(replace_at(t.left, path[1:], u), t.right)
    return type(t)(t.left, replace_at(t.right, path[1:], u))


def positions(t: Term, prefix: Path = ()) -> Iterator[Path]:
    """All positions in pre-order."""
    yield prefix
    if isinstance(t, (And, Or)):
        yield from positions(t.left, prefix + (0,))
        yield from positions(t.right, prefix + (1,))


@dataclass(frozen=True)
class Context:
    """A term with exactly one hole."""

    shape: object

    def __post_init__(self):
        if _count_holes(self.shape) != 1:
            raise TermError("a context has exactly one hole")

    @classmethod
    def at(cls, t: Term, path: Path) -> "Context":
        subterm_at(t, path)
        return cls(replace_at(t, path, HOLE))

    def apply(self, u: Term) -> Term:
        return _plug(self.shape, u)

    def __str__(self) -> str:
        return render(self.shape)


def _count_holes(t) -> int:
    if isinstance(t, Hole):
        return 1
    if isinstance(t, (And, Or)):
        return _count_holes(t.left) + _count_holes(t.right)
    return 0


def _plug(t, u: Term) -> Term:
    if isinstance(t, Hole):
        return u
    if isinstance(t, (And, Or)):
        return type(t)(_plug(t.left, u), _plug(t.right, u))
    return t


# ---------------------------------------------------------------------------
# Canonical forms


def flatten(t: Term) -> list[Term]:
    """Children of the maximal same-connective chain rooted at ``t``."""
    if not isinstance(t, (And, Or)):
        return [t]
    kind = type(t)
    out: list[Term] = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, kind):
            stack.append(node.right)
            stack.append(node.left)
        else:
            out.append(node)
    return out


def _rebuild(kind: type, children: list[Term]) -> Term:
    return conj(*children) if kind is And else disj(*children)


def ac_canonical(t: Term) -> Term:
    """Canonical representative modulo associativity and commutativity.

    Chains are flattened, children canonicalised and sorted by their
    rendering, then re-associated to the right.
    """
    if not isinstance(t, (And, Or)):
        return t
    kids = sorted((ac_canonical(c) for c in flatten(t)), key=render)
    return _rebuild(type(t), kids)


def ac_equal(s: Term, t: Term) -> bool:
    return ac_canonical(s) == ac_canonical(t)


def simplify_units(t: Term, absorb: bool = True) -> Term:
    """Remove constants bottom-up with the unit equations.

    With ``absorb`` the dominating equations ``x | T = T`` and ``x & F = F``
    are used as well; otherwise only the plain unit laws apply and a
    dominating constant is kept next to its sibling.
    """
    if not isinstance(t, (And, Or)):
        return t
    left = simplify_units(t.left, absorb)
    right = simplify_units(t.right, absorb)
    unit, zero = (TOP, BOT) if isinstance(t, And) else (BOT, TOP)
    if left == unit:
        return right
    if right == unit:
        return left
    if left == zero and right == zero:
        return zero
    if absorb and zero in (left, right):
        return zero
    return type(t)(left, right)


def normalize_acu(t: Term) -> Term:
    return ac_canonical(simplify_units(t, absorb=False))


def normalize_acu_prime(t: Term) -> Term:
    """Unit/absorption simplification followed by :func:`ac_canonical`.

    The result is ``T``, ``F`` or constant-free.  For linear negation-free
    inputs it is the unique representative of the ACU' class.
    """
    return ac_canonical(simplify_units(t, absorb=True))


def rename(t: Term, mapping: Callable[[Var], Var] | Mapping[Var, Var]) -> Term:
    """Rename literals one by one (no De Morgan)."""
    f = mapping if callable(mapping) else (lambda v: mapping.get(v, v))
    if isinstance(t, Var):
        return f(t)
    if isinstance(t, Const):
        return t
    return type(t)(rename(t.left, f), rename(t.right, f))


def fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name
