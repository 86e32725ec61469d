import random
from fractions import Fraction

import pytest

from semibnf.scalars import Surd
from semibnf.weyl import FormalSymbol


def random_symbol(rng: random.Random, dim: int, truncation: int, n_terms: int = 4,
                  max_grade: int = None, irrational: bool = False) -> FormalSymbol:
    """Sparse symbol with small Gaussian-rational (optionally sqrt(2)) coefficients."""
    max_grade = truncation if max_grade is None else max_grade
    terms = {}
    for _ in range(n_terms):
        g = rng.randint(0, max_grade)
        j = rng.randint(0, g // 2)
        rest = g - 2 * j
        exps = [0] * (2 * dim)
        for _ in range(rest):
            exps[rng.randrange(2 * dim)] += 1
        c = Surd.gaussian(Fraction(rng.randint(-5, 5), rng.randint(1, 4)),
                          Fraction(rng.randint(-3, 3), rng.randint(1, 4)))
        if irrational and rng.random() < 0.5:
            c = c * Surd.sqrt(2)
        terms[(j, tuple(exps[:dim]), tuple(exps[dim:]))] = c
    return FormalSymbol(dim, truncation, terms)


def random_real_symbol(rng, dim, truncation, n_terms=4, min_grade=0, max_grade=None):
    max_grade = truncation if max_grade is None else max_grade
    terms = {}
    for _ in range(n_terms):
        g = rng.randint(min_grade, max_grade)
        j = rng.randint(0, g // 2)
        rest = g - 2 * j
        exps = [0] * (2 * dim)
        for _ in range(rest):
            exps[rng.randrange(2 * dim)] += 1
        terms[(j, tuple(exps[:dim]), tuple(exps[dim:]))] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return FormalSymbol(dim, truncation, terms)


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE_LINES = []


def record(criterion: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append((criterion, f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"))
    print(ACCEPTANCE_LINES[-1][1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
