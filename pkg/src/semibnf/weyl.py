"""Truncated semiclassical Weyl algebra.

Symbols are sparse polynomials in (hbar, x, xi) with exact ``Surd``
coefficients, graded by ``deg(hbar^j x^a xi^b) = 2j + |a| + |b|`` and cut off
at a fixed maximal grade. The Moyal product preserves the grading, so
truncation is exact: every stored coefficient is the true coefficient of the
untruncated computation.

Sign conventions are pinned by two identities (both unit-tested):

* ``x * xi - xi * x = i hbar`` for the star product;
* ``{Sigma, z^a zbar^b} = i <omega, a - b> z^a zbar^b`` with
  ``z = x + i xi`` and ``Sigma = sum omega_j (x_j^2 + xi_j^2) / 2``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .errors import DimensionMismatch, NonRealResult, NonTerminating, TruncationMismatch, ValidationError
from .scalars import ExactReal, Surd, ZERO, _sqrt_product

Key = Tuple[int, Tuple[int, ...], Tuple[int, ...]]


def _grade(key: Key) -> int:
    j, a, b = key
    return 2 * j + sum(a) + sum(b)


def _coerce(c) -> Surd:
    if isinstance(c, Surd):
        return c
    if isinstance(c, ExactReal):
        return c.to_surd()
    return Surd(c)


class _GradedPolynomial:
    """Shared storage and linear structure for real and complex symbols."""

    __slots__ = ("dim", "truncation", "terms")

    def __init__(self, dim: int, truncation: int, terms: Optional[dict] = None, *, _trusted=False):
        self.dim = dim
        self.truncation = truncation
        if _trusted:
            self.terms = terms
            return
        clean: Dict[Key, Surd] = {}
        for key, c in (terms or {}).items():
            j, a, b = key
            a, b = tuple(a), tuple(b)
            if len(a) != dim or len(b) != dim:
                raise DimensionMismatch(f"exponent {key} does not match dim={dim}")
            if j < 0 or min(a + b, default=0) < 0:
                raise ValidationError(f"negative exponent in {key}")
            key = (j, a, b)
            if _grade(key) > truncation:
                raise ValidationError(f"term {key} exceeds truncation {truncation}")
            c = _coerce(c)
            if c:
                prev = clean.get(key)
                c = c if prev is None else prev + c
                if c:
                    clean[key] = c
                else:
                    clean.pop(key, None)
        self.terms = clean

    def _new(self, terms: dict):
        return type(self)(self.dim, self.truncation, terms, _trusted=True)

    def _check(self, other):
        if not isinstance(other, type(self)):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionMismatch(f"dim {self.dim} vs {other.dim}")
        if other.truncation != self.truncation:
            raise TruncationMismatch(f"truncation {self.truncation} vs {other.truncation}")

    # linear structure -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, _GradedPolynomial):
            other = self._new({(0, (0,) * self.dim, (0,) * self.dim): _coerce(other)} if other else {})
        self._check(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            s = t.get(k)
            if s is None:
                t[k] = v
            else:
                s = s + v
                if s:
                    t[k] = s
                else:
                    del t[k]
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _coerce(c)
        if not c:
            return self._new({})
        return self._new({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, _GradedPolynomial):
            return self.pointwise(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(1 / _coerce(other))

    def pointwise(self, other):
        """Commutative (ordinary) product, truncated."""
        self._check(other)
        acc: dict = {}
        D = self.truncation
        for (j1, a1, b1), c1 in self.terms.items():
            g1 = 2 * j1 + sum(a1) + sum(b1)
            for (j2, a2, b2), c2 in other.terms.items():
                if g1 + 2 * j2 + sum(a2) + sum(b2) > D:
                    continue
                key = (j1 + j2, tuple(p + q for p, q in zip(a1, a2)),
                       tuple(p + q for p, q in zip(b1, b2)))
                acc[key] = acc.get(key, ZERO) + c1 * c2
        return self._new({k: v for k, v in acc.items() if v})

    def __pow__(self, n: int):
        out = self._new({(0, (0,) * self.dim, (0,) * self.dim): Surd(1)})
        for _ in range(n):
            out = out.pointwise(self)
        return out

    # comparison / inspection ------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, _GradedPolynomial):
            return type(self) is type(other) and self.dim == other.dim and self.terms == other.terms
        if not other:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((type(self).__name__, self.dim, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def coefficient(self, j: int, a: Sequence[int], b: Sequence[int]) -> Surd:
        return self.terms.get((j, tuple(a), tuple(b)), ZERO)

    def grades(self) -> list:
        return sorted({_grade(k) for k in self.terms})

    def min_grade(self) -> Optional[int]:
        return min((_grade(k) for k in self.terms), default=None)

    def with_truncation(self, D: int):
        return type(self)(self.dim, D, {k: v for k, v in self.terms.items() if _grade(k) <= D},
                          _trusted=True)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, D={self.truncation}, {self})"


def grade_component(f, n: int):
    """Sum of the terms of ``f`` whose graded degree is exactly ``n``."""
    return f._new({k: v for k, v in f.terms.items() if _grade(k) == n})


def _fmt_monomial(j, a, b, names):
    parts = []
    if j:
        parts.append("hbar" if j == 1 else f"hbar^{j}")
    for (u, v), e in zip(names, zip(a, b)):
        for name, p in ((u, e[0]), (v, e[1])):
            if p:
                parts.append(name if p == 1 else f"{name}^{p}")
    return "*".join(parts) or "1"


class FormalSymbol(_GradedPolynomial):
    """Weyl symbol: exponent keys ``(j, alpha, beta)`` for ``hbar^j x^alpha xi^beta``."""

    __slots__ = ()

    @classmethod
    def zero(cls, dim: int, truncation: int) -> "FormalSymbol":
        return cls(dim, truncation, {})

    @classmethod
    def monomial(cls, dim, truncation, j=0, alpha=None, beta=None, coeff=1) -> "FormalSymbol":
        alpha = tuple(alpha) if alpha is not None else (0,) * dim
        beta = tuple(beta) if beta is not None else (0,) * dim
        return cls(dim, truncation, {(j, alpha, beta): coeff})

    @classmethod
    def constant(cls, dim, truncation, c) -> "FormalSymbol":
        return cls.monomial(dim, truncation, coeff=c)

    @classmethod
    def x(cls, i, dim, truncation) -> "FormalSymbol":
        return cls.monomial(dim, truncation, alpha=_unit(i, dim))

    @classmethod
    def xi(cls, i, dim, truncation) -> "FormalSymbol":
        return cls.monomial(dim, truncation, beta=_unit(i, dim))

    @classmethod
    def hbar(cls, dim, truncation) -> "FormalSymbol":
        return cls.monomial(dim, truncation, j=1)

    @classmethod
    def action(cls, i, dim, truncation) -> "FormalSymbol":
        """I_i = (x_i^2 + xi_i^2) / 2."""
        two = tuple(2 * u for u in _unit(i, dim))
        zero = (0,) * dim
        return cls(dim, truncation, {(0, two, zero): Fraction(1, 2), (0, zero, two): Fraction(1, 2)})

    @classmethod
    def harmonic(cls, omegas: Sequence, truncation: int) -> "FormalSymbol":
        """Sigma = sum_j omega_j (x_j^2 + xi_j^2) / 2."""
        dim = len(omegas)
        out = cls.zero(dim, truncation)
        for i, w in enumerate(omegas):
            out = out + cls.action(i, dim, truncation).scale(_coerce(w))
        return out

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def __str__(self):
        if not self.terms:
            return "0"
        names = [(f"x{i+1}", f"xi{i+1}") for i in range(self.dim)]
        return " + ".join(f"({c})*{_fmt_monomial(j, a, b, names)}"
                          for (j, a, b), c in sorted(self.terms.items(), key=lambda kv: (_grade(kv[0]), kv[0])))


class ComplexSymbol(_GradedPolynomial):
    """Symbol in complex coordinates: keys ``(j, a, b)`` for ``hbar^j z^a zbar^b``."""

    __slots__ = ()

    def conjugate(self) -> "ComplexSymbol":
        return self._new({(j, b, a): c.conjugate() for (j, a, b), c in self.terms.items()})

    def is_real(self) -> bool:
        """Real-valued iff the coefficient of (j,a,b) is the conjugate of that of (j,b,a)."""
        return self == self.conjugate()

    def is_action_polynomial(self) -> bool:
        return all(a == b for _, a, b in self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        names = [(f"z{i+1}", f"zb{i+1}") for i in range(self.dim)]
        return " + ".join(f"({c})*{_fmt_monomial(j, a, b, names)}"
                          for (j, a, b), c in sorted(self.terms.items(), key=lambda kv: (_grade(kv[0]), kv[0])))


def _unit(i: int, dim: int) -> tuple:
    return tuple(int(k == i) for k in range(dim))


# ---------------------------------------------------------------------------
# Bidifferential expansions


def _falling(n: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= n - t
    return out


@lru_cache(maxsize=None)
def _mode_expansion(a1: int, b1: int, a2: int, b2: int) -> tuple:
    """One-mode terms of sum_{g,d} (-1)^d / (g! d!) d_x^g d_xi^d f * d_xi^g d_x^d g.

    Entries are ``(k, coefficient, x_exponent, xi_exponent)`` with k = g + d.
    """
    out = []
    for g in range(min(a1, b2) + 1):
        fg = Fraction(_falling(a1, g) * _falling(b2, g), factorial(g))
        for d in range(min(b1, a2) + 1):
            q = fg * Fraction(_falling(b1, d) * _falling(a2, d), factorial(d))
            if d % 2:
                q = -q
            out.append((g + d, q, a1 - g + a2 - d, b1 - d + b2 - g))
    return tuple(out)


@lru_cache(maxsize=200000)
def _pair_expansion(a1: tuple, b1: tuple, a2: tuple, b2: tuple, kmode: str) -> tuple:
    """All-mode expansion for a monomial pair, filtered by ``kmode``.

    Returns entries ``(k, coefficient, x_exponents, xi_exponents)`` where the
    coefficient already includes the factor (1/2)^k.
    """
    per_mode = [_mode_expansion(*args) for args in zip(a1, b1, a2, b2)]
    acc: dict = {}
    for combo in product(*per_mode):
        k = sum(c[0] for c in combo)
        if kmode == "odd" and k % 2 == 0:
            continue
        if kmode == "one" and k != 1:
            continue
        q = Fraction(1, 2 ** k)
        for c in combo:
            q *= c[1]
        if not q:
            continue
        key = (k, tuple(c[2] for c in combo), tuple(c[3] for c in combo))
        acc[key] = acc.get(key, 0) + q
    return tuple((k, q, xe, pe) for (k, xe, pe), q in acc.items() if q)


def _bidiff(f: FormalSymbol, g: FormalSymbol, mode: str) -> FormalSymbol:
    """Shared engine for the star product, bracket-over-hbar and Poisson bracket.

    mode ``star``:    f*g = sum_k (i hbar/2)^k Pi^k(f,g)/k!
    mode ``bracket``: (f*g - g*f)/hbar  (odd k only, doubled, hbar^(k-1))
    mode ``poisson``: {f,g} = Pi(f,g)
    """
    f._check(g)
    D = f.truncation
    kmode = {"star": "all", "bracket": "odd", "poisson": "one"}[mode]
    drop = 0 if mode == "star" else 2  # grade lost by the output
    hshift = 0 if mode == "star" else 1
    acc: dict = {}
    for (j1, a1, b1), c1 in f.terms.items():
        g1 = 2 * j1 + sum(a1) + sum(b1)
        for (j2, a2, b2), c2 in g.terms.items():
            if g1 + 2 * j2 + sum(a2) + sum(b2) - drop > D:
                continue
            base = c1 * c2
            for k, q, xe, pe in _pair_expansion(a1, b1, a2, b2, kmode):
                if mode == "poisson":
                    coeff, j = base * (2 * q), j1 + j2
                else:
                    if mode == "bracket":
                        q = 2 * q
                    coeff, j = _times_i_power(base, q, k), j1 + j2 + k - hshift
                key = (j, xe, pe)
                prev = acc.get(key)
                acc[key] = coeff if prev is None else prev + coeff
    return f._new({k: v for k, v in acc.items() if v})


def _times_i_power(c: Surd, q: Fraction, k: int) -> Surd:
    """c * q * i^k."""
    k %= 4
    if k in (2, 3):
        q = -q
    if k % 2 == 0:
        return Surd._from_dict({m: v * q for m, v in c._t.items()})
    out: dict = {}
    for m, v in c._t.items():
        s, m2 = _sqrt_product(m, -1)
        out[m2] = v * q * s
    return Surd._from_dict(out)


def moyal_star(f: FormalSymbol, g: FormalSymbol) -> FormalSymbol:
    """Moyal product f * g truncated at the common maximal grade."""
    return _bidiff(f, g, "star")


def star_commutator(f: FormalSymbol, g: FormalSymbol) -> FormalSymbol:
    return moyal_star(f, g) - moyal_star(g, f)


def bracket_over_hbar(f: FormalSymbol, g: FormalSymbol) -> FormalSymbol:
    """(f*g - g*f)/hbar, computed without losing terms to truncation."""
    return _bidiff(f, g, "bracket")


def poisson(f: FormalSymbol, g: FormalSymbol) -> FormalSymbol:
    """Poisson bracket sum_j (f_x g_xi - f_xi g_x)."""
    if isinstance(f, ComplexSymbol) or isinstance(g, ComplexSymbol):
        return complex_poisson(f, g)
    return _bidiff(f, g, "poisson")


def complex_poisson(f: ComplexSymbol, g: ComplexSymbol) -> ComplexSymbol:
    """Poisson bracket in z = x + i xi coordinates: -2i sum_j (f_z g_zbar - f_zbar g_z)."""
    f._check(g)
    D = f.truncation
    acc: dict = {}
    minus_2i = Surd.gaussian(0, -2)
    for (j1, a1, b1), c1 in f.terms.items():
        g1 = 2 * j1 + sum(a1) + sum(b1)
        for (j2, a2, b2), c2 in g.terms.items():
            if g1 + 2 * j2 + sum(a2) + sum(b2) - 2 > D:
                continue
            base = c1 * c2 * minus_2i
            for m in range(f.dim):
                # f_z g_zbar - f_zbar g_z
                for n, da, db in ((a1[m] * b2[m], (m, None), (None, m)),
                                  (-b1[m] * a2[m], (None, m), (m, None))):
                    if not n:
                        continue
                    a = list(p + q for p, q in zip(a1, a2))
                    b = list(p + q for p, q in zip(b1, b2))
                    a[m] -= 1
                    b[m] -= 1
                    key = (j1 + j2, tuple(a), tuple(b))
                    acc[key] = acc.get(key, ZERO) + base * n
    return f._new({k: v for k, v in acc.items() if v})


# ---------------------------------------------------------------------------
# Complex coordinates


@lru_cache(maxsize=None)
def _real_to_complex_mode(p: int, q: int) -> tuple:
    """x^p xi^q as sum over z^a zbar^b, with x = (z+zbar)/2, xi = -i(z-zbar)/2."""
    acc: dict = {}
    scale = Surd(Fraction(1, 2 ** (p + q))) * Surd.gaussian(0, -1) ** q
    for r in range(p + 1):
        for s in range(q + 1):
            c = comb(p, r) * comb(q, s) * (-1) ** (q - s)
            key = (r + s, p - r + q - s)
            acc[key] = acc.get(key, 0) + c
    return tuple((k, scale * v) for k, v in acc.items() if v)


@lru_cache(maxsize=None)
def _complex_to_real_mode(a: int, b: int) -> tuple:
    """z^a zbar^b as sum over x^p xi^q, with z = x + i xi."""
    acc: dict = {}
    for r in range(a + 1):
        for s in range(b + 1):
            # (x + i xi)^a (x - i xi)^b
            c = Surd(comb(a, r) * comb(b, s) * (-1) ** (b - s)) * Surd.gaussian(0, 1) ** (a - r + b - s)
            key = (r + s, a - r + b - s)
            acc[key] = acc.get(key, ZERO) + c
    return tuple((k, v) for k, v in acc.items() if v)


def _change_coordinates(f, table, target_cls):
    acc: dict = {}
    for (j, a, b), c in f.terms.items():
        for combo in product(*(table(p, q) for p, q in zip(a, b))):
            coeff = c
            for _, v in combo:
                coeff = coeff * v
            key = (j, tuple(k[0] for k, _ in combo), tuple(k[1] for k, _ in combo))
            acc[key] = acc.get(key, ZERO) + coeff
    return target_cls(f.dim, f.truncation, {k: v for k, v in acc.items() if v}, _trusted=True)


def to_complex(f: FormalSymbol) -> ComplexSymbol:
    return _change_coordinates(f, _real_to_complex_mode, ComplexSymbol)


def from_complex(c: ComplexSymbol, require_real: bool = True) -> FormalSymbol:
    """Back to (x, xi). Raises NonRealResult if a real-valued result was required but not obtained."""
    f = _change_coordinates(c, _complex_to_real_mode, FormalSymbol)
    if require_real and not f.is_real():
        raise NonRealResult("complex symbol is not real-valued")
    return f


# ---------------------------------------------------------------------------
# Conjugation


def conjugate_by(S: FormalSymbol, H: FormalSymbol, allow_low_degree: bool = False,
                 max_terms: Optional[int] = None) -> FormalSymbol:
    """exp((i/hbar) ad_S)(H) with ad_S(f) = S*f - f*S, i.e. e^{iS/hbar} * H * e^{-iS/hbar}.

    When every term of S has grade >= 3 each application raises the grade,
    so the series stops at the truncation. Lower grades need
    ``allow_low_degree`` and are cut off after ``max_terms`` steps.
    """
    S._check(H)
    lowest = S.min_grade()
    if lowest is None:
        return H
    if lowest <= 2 and not allow_low_degree:
        raise NonTerminating(f"generator has a term of grade {lowest} <= 2")
    if max_terms is None:
        max_terms = H.truncation + 2 if lowest >= 3 else 4 * (H.truncation + 2)
    i = Surd.gaussian(0, 1)
    total, term = H, H
    for n in range(1, max_terms + 1):
        term = bracket_over_hbar(S, term).scale(i / n)
        if not term:
            return total
        total = total + term
    raise NonTerminating(f"conjugation series did not terminate within {max_terms} terms")
