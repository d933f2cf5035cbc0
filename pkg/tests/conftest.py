import random

import pytest
from hypothesis import strategies as st

from linweb.terms import BOT, TOP, And, Or, Var

NAMES = ("a", "b", "c", "d")


def random_nnf(rng: random.Random, names=NAMES, max_size: int = 12, constants: bool = False):
    """Random NNF formula with at most ``max_size`` leaves."""
    leaves = rng.randint(1, max_size)

    def build(k):
        if k == 1:
            if constants and rng.random() < 0.1:
                return rng.choice((TOP, BOT))
            return Var(rng.choice(names), rng.random() < 0.5)
        left = rng.randint(1, k - 1)
        kind = And if rng.random() < 0.5 else Or
        return kind(build(left), build(k - left))

    return build(leaves)


def linear_terms(names=("a", "b", "c", "d", "e")):
    """Hypothesis strategy for constant-free negation-free linear terms."""

    @st.composite
    def strat(draw):
        k = draw(st.integers(1, len(names)))
        order = draw(st.permutations(names))[:k]

        def build(vs):
            if len(vs) == 1:
                return Var(vs[0])
            cut = draw(st.integers(1, len(vs) - 1))
            kind = draw(st.sampled_from((And, Or)))
            return kind(build(vs[:cut]), build(vs[cut:]))

        return build(list(order))

    return strat()


@pytest.fixture
def rng():
    return random.Random(20150629)


# One line per acceptance criterion, filled in by tests/test_acceptance.py.
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, msg = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {msg}")
