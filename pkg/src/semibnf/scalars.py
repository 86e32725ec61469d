"""Exact real scalars.

Two number types live here:

``ExactReal``
    A rational coordinate vector over a declared ``RealBasis`` of reals that
    are linearly independent over Q (1, square roots of distinct square-free
    integers, and user-declared opaque constants). Equality is decidable from
    the coordinates; ordering is decided by refining interval enclosures.

``Surd``
    An element of the multiquadratic field Q(i, sqrt(2), sqrt(3), ...),
    closed under multiplication and inversion. Used wherever frequencies
    end up in denominators (normal form coefficients) and for the Gaussian
    coefficients of complex symbols; ``i`` is treated as ``sqrt(-1)``.
"""

from __future__ import annotations

import enum
import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, Iterable, Optional, Sequence

from . import _linalg
from .errors import BasisMismatch, DependentFrequencies, RefinementExhausted, ValidationError

DEFAULT_PRECISION_BITS = 256


def precision_ceiling() -> int:
    """Refinement ceiling in bits; ``BNF_PRECISION_BITS`` overrides the default."""
    value = os.environ.get("BNF_PRECISION_BITS")
    if value is None:
        return DEFAULT_PRECISION_BITS
    bits = int(value)
    if bits < 8:
        raise ValidationError(f"BNF_PRECISION_BITS must be >= 8, got {bits}")
    return bits


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@lru_cache(maxsize=None)
def _factor(n: int) -> tuple:
    """Prime factors of |n| (with multiplicity), plus -1 when n < 0."""
    out = [-1] if n < 0 else []
    n = abs(n)
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def is_squarefree(m: int) -> bool:
    f = [p for p in _factor(m) if p > 0]
    return m != 0 and len(f) == len(set(f))


@lru_cache(maxsize=None)
def split_square(n: int) -> tuple:
    """Write n = s**2 * m with m square-free (sign kept in m)."""
    if n == 0:
        return 0, 1
    s, m = 1, (-1 if n < 0 else 1)
    counts: dict = {}
    for p in _factor(n):
        if p > 0:
            counts[p] = counts.get(p, 0) + 1
    for p, c in counts.items():
        s *= p ** (c // 2)
        m *= p ** (c % 2)
    return s, m


@lru_cache(maxsize=4096)
def _isqrt_scaled(m: int, bits: int) -> int:
    return math.isqrt(m << (2 * bits))


# ---------------------------------------------------------------------------
# Basis


@dataclass(frozen=True)
class BasisElement:
    """One basis real: the number 1, sqrt(m), or an opaque constant.

    Opaque constants carry a decimal approximation, an error bound and an
    optional ``refine(bits) -> (lo, hi)`` callback. Without a callback the
    element is not refinable and comparisons involving it may give up.
    """

    kind: str
    radicand: int = 1
    decimal: Optional[str] = None
    error: Fraction = Fraction(0)
    label: Optional[str] = None
    refine: Optional[Callable[[int], tuple]] = field(default=None, compare=False, hash=False)

    @classmethod
    def one(cls) -> "BasisElement":
        return cls("one")

    @classmethod
    def sqrt(cls, m: int) -> "BasisElement":
        if m <= 1 or not is_squarefree(m):
            raise ValidationError(f"sqrt basis element needs a square-free integer > 1, got {m}")
        return cls("sqrt", radicand=m)

    @classmethod
    def opaque(cls, decimal: str, error, label: Optional[str] = None,
               refine: Optional[Callable[[int], tuple]] = None) -> "BasisElement":
        Fraction(decimal)
        return cls("opaque", decimal=decimal, error=Fraction(error),
                   label=label or decimal, refine=refine)

    @property
    def refinable(self) -> bool:
        return self.kind != "opaque" or self.refine is not None

    def enclosure(self, bits: int) -> tuple:
        if self.kind == "one":
            return Fraction(1), Fraction(1)
        if self.kind == "sqrt":
            r = _isqrt_scaled(self.radicand, bits)
            return Fraction(r, 1 << bits), Fraction(r + 1, 1 << bits)
        if self.refine is not None:
            lo, hi = self.refine(bits)
            return Fraction(lo), Fraction(hi)
        v = Fraction(self.decimal)
        return v - self.error, v + self.error

    def __str__(self):
        if self.kind == "one":
            return "1"
        if self.kind == "sqrt":
            return f"sqrt({self.radicand})"
        return f"opaque({self.label})"


ONE = BasisElement.one()


class RealBasis:
    """Ordered basis of Q-independent reals; the first element is always 1."""

    __slots__ = ("elements", "_index")

    def __init__(self, elements: Iterable[BasisElement] = ()):
        elements = tuple(elements)
        if not elements or elements[0] != ONE:
            elements = (ONE,) + tuple(e for e in elements if e != ONE)
        if len(set(elements)) != len(elements):
            raise ValidationError("basis elements must be pairwise distinct")
        if any(e.kind == "one" for e in elements[1:]):
            raise ValidationError("only the first basis element may be 1")
        self.elements = elements
        self._index = {e: i for i, e in enumerate(elements)}

    @classmethod
    def sqrt(cls, *radicands: int) -> "RealBasis":
        return cls([ONE] + [BasisElement.sqrt(m) for m in sorted(set(radicands))])

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        return isinstance(other, RealBasis) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"RealBasis({', '.join(map(str, self.elements))})"

    def index(self, element: BasisElement) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise BasisMismatch(f"{element} is not in {self!r}") from None

    def __contains__(self, element):
        return element in self._index

    @property
    def has_opaque(self) -> bool:
        return any(e.kind == "opaque" for e in self.elements)

    @property
    def radicands(self) -> tuple:
        return tuple(e.radicand for e in self.elements if e.kind == "sqrt")

    def union(self, other: "RealBasis") -> "RealBasis":
        if self == other:
            return self
        sqrt = sorted(set(self.radicands) | set(other.radicands))
        opaque = [e for e in self.elements if e.kind == "opaque"]
        opaque += [e for e in other.elements if e.kind == "opaque" and e not in self]
        return RealBasis([ONE] + [BasisElement.sqrt(m) for m in sqrt] + opaque)


RATIONALS = RealBasis()


def common_basis(values: Iterable["ExactReal"]) -> RealBasis:
    basis = RATIONALS
    for v in values:
        basis = basis.union(v.basis)
    return basis


def align(values: Sequence["ExactReal"], basis: Optional[RealBasis] = None) -> list:
    """Lift all values onto one basis (their union unless given)."""
    values = list(values)
    if basis is None:
        basis = common_basis(values)
    return [v.lift(basis) for v in values]


# ---------------------------------------------------------------------------
# ExactReal


def _is_rational_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool) or isinstance(x, Rational)


class ExactReal:
    """Rational coordinate vector over a ``RealBasis``. Immutable."""

    __slots__ = ("basis", "coords", "_hash")

    def __init__(self, basis: RealBasis, coords: Sequence):
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != len(basis):
            raise ValidationError(f"expected {len(basis)} coordinates, got {len(coords)}")
        self.basis = basis
        self.coords = coords
        self._hash = None

    # construction ---------------------------------------------------------
    @classmethod
    def rational(cls, q, basis: RealBasis = RATIONALS) -> "ExactReal":
        return cls(basis, [Fraction(q)] + [0] * (len(basis) - 1))

    @classmethod
    def zero(cls, basis: RealBasis = RATIONALS) -> "ExactReal":
        return cls(basis, [0] * len(basis))

    @classmethod
    def from_sqrt_terms(cls, terms: dict, basis: Optional[RealBasis] = None) -> "ExactReal":
        """Build from ``{radicand: coefficient}`` with radicand 1 meaning the rational part."""
        terms = {m: Fraction(q) for m, q in terms.items() if q != 0}
        if basis is None:
            basis = RealBasis.sqrt(*(m for m in terms if m != 1))
        coords = [Fraction(0)] * len(basis)
        for m, q in terms.items():
            el = ONE if m == 1 else BasisElement.sqrt(m)
            coords[basis.index(el)] += q
        return cls(basis, coords)

    @classmethod
    def coerce(cls, x, basis: Optional[RealBasis] = None) -> "ExactReal":
        if isinstance(x, ExactReal):
            return x if basis is None else x.lift(basis)
        if isinstance(x, Surd):
            return x.to_exact(basis)
        if _is_rational_scalar(x):
            return cls.rational(x, basis or RATIONALS)
        if isinstance(x, str):
            v = parse_exact(x)
            return v if basis is None else v.lift(basis)
        raise TypeError(f"cannot convert {type(x).__name__} to ExactReal")

    # structure ------------------------------------------------------------
    def lift(self, basis: RealBasis) -> "ExactReal":
        if basis == self.basis:
            return self
        coords = [Fraction(0)] * len(basis)
        for el, q in zip(self.basis.elements, self.coords):
            if q != 0:
                coords[basis.index(el)] = q
            elif el not in basis:
                continue
        return ExactReal(basis, coords)

    def terms(self):
        """Nonzero (element, coefficient) pairs."""
        return [(e, q) for e, q in zip(self.basis.elements, self.coords) if q != 0]

    @property
    def is_rational(self) -> bool:
        return all(q == 0 for q in self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return self.coords[0]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def to_surd(self) -> "Surd":
        t = {}
        for e, q in self.terms():
            if e.kind == "opaque":
                raise TypeError("opaque basis elements have no field arithmetic")
            t[e.radicand] = q
        return Surd._from_dict(t)

    # arithmetic -------------------------------------------------------------
    def _check(self, other: "ExactReal"):
        if other.basis != self.basis:
            raise BasisMismatch(f"{self.basis!r} vs {other.basis!r}")

    def __add__(self, other):
        if _is_rational_scalar(other):
            other = ExactReal.rational(other, self.basis)
        if not isinstance(other, ExactReal):
            return NotImplemented
        self._check(other)
        return ExactReal(self.basis, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return ExactReal(self.basis, [-a for a in self.coords])

    def __sub__(self, other):
        if _is_rational_scalar(other):
            other = ExactReal.rational(other, self.basis)
        if not isinstance(other, ExactReal):
            return NotImplemented
        self._check(other)
        return ExactReal(self.basis, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q) -> "ExactReal":
        q = Fraction(q)
        return ExactReal(self.basis, [a * q for a in self.coords])

    def __mul__(self, other):
        if _is_rational_scalar(other):
            return self.scale(other)
        if isinstance(other, ExactReal):
            if other.is_rational:
                return self.scale(other.coords[0])
            if self.is_rational:
                return other.scale(self.coords[0])
            raise TypeError("product of two irrational ExactReals leaves the basis; use Surd")
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_rational_scalar(other):
            return self.scale(1 / Fraction(other))
        if isinstance(other, ExactReal) and other.is_rational:
            return self.scale(1 / other.coords[0])
        return NotImplemented

    # comparison -------------------------------------------------------------
    def __eq__(self, other):
        if _is_rational_scalar(other):
            return self.is_rational and self.coords[0] == other
        if not isinstance(other, ExactReal):
            return NotImplemented
        if self.basis == other.basis:
            return self.coords == other.coords
        return sorted(map(_term_key, self.terms())) == sorted(map(_term_key, other.terms()))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms()))
        return self._hash

    def __lt__(self, other):
        return compare(self, ExactReal.coerce(other, self.basis)) is Ordering.LESS

    def __le__(self, other):
        return compare(self, ExactReal.coerce(other, self.basis)) is not Ordering.GREATER

    def __gt__(self, other):
        return compare(self, ExactReal.coerce(other, self.basis)) is Ordering.GREATER

    def __ge__(self, other):
        return compare(self, ExactReal.coerce(other, self.basis)) is not Ordering.LESS

    def sign(self) -> int:
        return compare(self, ExactReal.zero(self.basis)).value

    def enclosure(self, bits: int) -> tuple:
        """Rational interval containing the value, of width <= 2**-bits.

        Non-refinable opaque elements keep their declared error, so the
        width bound can fail for them.
        """
        terms = self.terms()
        total = sum(abs(q) for _, q in terms)
        extra = max(0, math.ceil(math.log2(total + 1))) + 1 if terms else 0
        work = bits + extra
        lo = hi = Fraction(0)
        for e, q in terms:
            a, b = e.enclosure(work)
            if q > 0:
                lo += q * a
                hi += q * b
            else:
                lo += q * b
                hi += q * a
        return lo, hi

    def __float__(self):
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    def __repr__(self):
        return f"ExactReal({format_exact(self)!r})"

    def __str__(self):
        return format_exact(self)


def _term_key(pair):
    e, q = pair
    return (e.kind, e.radicand, e.label or "", q)


def compare(a: ExactReal, b: ExactReal, ceiling: Optional[int] = None) -> Ordering:
    """Exact order of two ExactReals over a shared basis.

    Equal coordinate vectors are EQUAL; otherwise enclosures of the
    difference are refined until they exclude zero. With only square-root
    elements this always terminates (independence makes the difference
    nonzero); opaque elements are refined up to ``ceiling`` bits.
    """
    a._check(b)
    if a.coords == b.coords:
        return Ordering.EQUAL
    diff = a - b
    opaque = [e for e, _ in diff.terms() if e.kind == "opaque"]
    if ceiling is None:
        ceiling = precision_ceiling()
    bits = 32
    while True:
        lo, hi = diff.enclosure(bits)
        if lo > 0:
            return Ordering.GREATER
        if hi < 0:
            return Ordering.LESS
        if opaque and (bits >= ceiling or not all(e.refinable for e in opaque)):
            raise RefinementExhausted(
                f"cannot separate {a} and {b} within {ceiling} bits", a=a, b=b)
        bits = min(2 * bits, ceiling) if opaque else 2 * bits


def check_independent(omegas: Sequence[ExactReal]) -> None:
    """Raise DependentFrequencies unless the coordinate vectors are Q-independent."""
    if not omegas:
        return
    basis = omegas[0].basis
    for w in omegas:
        w._check(omegas[0])
    columns = [[w.coords[i] for w in omegas] for i in range(len(basis))]
    if _linalg.rank(columns) < len(omegas):
        raise DependentFrequencies(
            "frequency coordinate vectors are linearly dependent over Q",
            omegas=[str(w) for w in omegas])


class CombinationSolver:
    """Membership test ``nu = sum n_i omega_i`` with n_i >= 0 integers.

    Precomputes a left inverse of the coordinate matrix so each query is a
    matrix-vector product plus a consistency check.
    """

    def __init__(self, omegas: Sequence[ExactReal]):
        self.omegas = list(omegas)
        self.basis = self.omegas[0].basis if self.omegas else None
        if self.omegas:
            check_independent(self.omegas)
            self._rows = [[w.coords[i] for w in self.omegas] for i in range(len(self.basis))]
            self._left = _linalg.left_inverse(self._rows)

    def __call__(self, nu: ExactReal) -> Optional[tuple]:
        if not self.omegas:
            return () if nu.is_zero() else None
        nu._check(self.omegas[0])
        n = [sum((l * c for l, c in zip(row, nu.coords)), Fraction(0)) for row in self._left]
        for row, target in zip(self._rows, nu.coords):
            if sum((a * x for a, x in zip(row, n)), Fraction(0)) != target:
                return None
        if any(x.denominator != 1 or x < 0 for x in n):
            return None
        return tuple(int(x) for x in n)


def integer_combination(nu: ExactReal, omegas: Sequence[ExactReal]) -> Optional[tuple]:
    """Non-negative integer vector n with nu = <n, omegas>, or None."""
    return CombinationSolver(omegas)(nu)


def dot(k: Sequence, values: Sequence[ExactReal], basis: Optional[RealBasis] = None) -> ExactReal:
    """Rational combination sum k_i * values_i."""
    if basis is None:
        basis = values[0].basis if values else RATIONALS
    coords = [Fraction(0)] * len(basis)
    for ki, v in zip(k, values):
        if ki:
            for i, q in enumerate(v.coords):
                coords[i] += ki * q
    return ExactReal(basis, coords)


# ---------------------------------------------------------------------------
# Text form

_TERM = r"(?:(\d+)(?:/(\d+))?(?:\*sqrt\((\d+)\))?|sqrt\((\d+)\))"
_SIGNED = re.compile(r"([+-]*)" + _TERM)
_WHOLE = re.compile(r"(?:[+-]*" + _TERM + r")+")


def format_exact(x: ExactReal) -> str:
    """``"p/q"`` terms joined by ``" + "``, irrational terms as ``"p/q*sqrt(m)"``."""
    parts = []
    for e, q in x.terms():
        rat = f"{q.numerator}/{q.denominator}"
        parts.append(rat if e.kind == "one" else f"{rat}*{e}")
    return " + ".join(parts) if parts else "0/1"


def parse_exact(text: str, basis: Optional[RealBasis] = None) -> ExactReal:
    """Inverse of ``format_exact``; also accepts plain integers and ``sqrt(m)``.

    The result lives on the smallest square-root basis covering the terms
    unless ``basis`` is given.
    """
    if not isinstance(text, str) or not text.strip():
        raise ValidationError(f"not an exact real: {text!r}")
    compact = re.sub(r"\s+", "", text)
    if not _WHOLE.fullmatch(compact):
        raise ValidationError(f"malformed exact real {text!r}")
    terms: dict = {}
    for signs, num, den, rad, bare in _SIGNED.findall(compact):
        sign = -1 if signs.count("-") % 2 else 1
        if bare:
            q, r = Fraction(sign), int(bare)
        else:
            q, r = Fraction(sign * int(num), int(den) if den else 1), int(rad) if rad else 1
        if r == 0:
            continue
        s, r = split_square(r)
        terms[r] = terms.get(r, Fraction(0)) + q * s
    return ExactReal.from_sqrt_terms(terms, basis)


# ---------------------------------------------------------------------------
# Surd: the multiquadratic field Q(i, sqrt 2, sqrt 3, ...)


@lru_cache(maxsize=None)
def _sqrt_product(a: int, b: int) -> tuple:
    """sqrt(a)*sqrt(b) = coeff * sqrt(key) for square-free a, b (sqrt(-1) = i)."""
    if a == 1:
        return 1, b
    if b == 1:
        return 1, a
    g = math.gcd(a, b)
    coeff = -g if (a < 0 and b < 0) else g
    return coeff, (a * b) // (g * g)


class Surd:
    """Exact element of Q(i, sqrt 2, sqrt 3, ...).

    Stored as ``{squarefree key: Fraction}``; key 1 is the rational part,
    negative keys m stand for i*sqrt(|m|).
    """

    __slots__ = ("_t", "_h")

    def __init__(self, value=0):
        if isinstance(value, Surd):
            self._t = value._t
        elif isinstance(value, ExactReal):
            self._t = value.to_surd()._t
        elif isinstance(value, complex):
            raise TypeError("floats are not exact; build Surd from rationals")
        else:
            q = Fraction(value)
            self._t = {1: q} if q else {}
        self._h = None

    @classmethod
    def _from_dict(cls, t: dict) -> "Surd":
        s = cls.__new__(cls)
        s._t = t
        s._h = None
        return s

    @classmethod
    def sqrt(cls, n: int) -> "Surd":
        """Exact square root of an integer (negative gives an imaginary result)."""
        if n == 0:
            return ZERO
        s, m = split_square(n)
        return cls._from_dict({m: Fraction(s)})

    @classmethod
    def gaussian(cls, re, im) -> "Surd":
        t = {}
        if re:
            t[1] = Fraction(re)
        if im:
            t[-1] = Fraction(im)
        return cls._from_dict(t)

    @staticmethod
    def coerce(x) -> "Surd":
        return x if isinstance(x, Surd) else Surd(x)

    # predicates -------------------------------------------------------------
    def __bool__(self):
        return bool(self._t)

    def is_rational(self) -> bool:
        return not self._t or (len(self._t) == 1 and 1 in self._t)

    def is_real(self) -> bool:
        return all(k > 0 for k in self._t)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._t.get(1, Fraction(0))

    def items(self):
        return self._t.items()

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Surd):
            if isinstance(other, (int, Fraction)):
                other = Surd(other)
            else:
                return NotImplemented
        t = dict(self._t)
        for k, v in other._t.items():
            s = t.get(k)
            if s is None:
                t[k] = v
            else:
                s += v
                if s:
                    t[k] = s
                else:
                    del t[k]
        return Surd._from_dict(t)

    __radd__ = __add__

    def __neg__(self):
        return Surd._from_dict({k: -v for k, v in self._t.items()})

    def __sub__(self, other):
        if not isinstance(other, Surd):
            if isinstance(other, (int, Fraction)):
                other = Surd(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Surd):
            if isinstance(other, (int, Fraction)):
                if not other:
                    return ZERO
                return Surd._from_dict({k: v * other for k, v in self._t.items()})
            return NotImplemented
        a, b = self._t, other._t
        if len(a) == 1 and len(b) == 1:
            (ka, va), = a.items()
            (kb, vb), = b.items()
            c, k = _sqrt_product(ka, kb)
            return Surd._from_dict({k: va * vb * c})
        t: dict = {}
        for ka, va in a.items():
            for kb, vb in b.items():
                c, k = _sqrt_product(ka, kb)
                t[k] = t.get(k, 0) + va * vb * c
        return Surd._from_dict({k: v for k, v in t.items() if v})

    __rmul__ = __mul__

    def _sigma(self, p: int) -> "Surd":
        """Galois conjugation flipping the sign of sqrt(p) (p = -1 flips i)."""
        if p == -1:
            return Surd._from_dict({k: (-v if k < 0 else v) for k, v in self._t.items()})
        return Surd._from_dict({k: (-v if k % p == 0 else v) for k, v in self._t.items()})

    def inverse(self) -> "Surd":
        if not self._t:
            raise ZeroDivisionError("Surd division by zero")
        num = ONE_SURD
        x = self
        while not x.is_rational():
            key = next(k for k in x._t if k != 1)
            p = -1 if key < 0 else next(q for q in _factor(key) if q > 0)
            conj = x._sigma(p)
            num = num * conj
            x = x * conj
        return num * (1 / x._t[1])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if not isinstance(other, Surd):
            return NotImplemented
        if other.is_rational():
            return self * (1 / other.rational_value())
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Surd.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = ONE_SURD, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "Surd":
        return self._sigma(-1)

    @property
    def real(self) -> "Surd":
        return Surd._from_dict({k: v for k, v in self._t.items() if k > 0})

    @property
    def imag(self) -> "Surd":
        return Surd._from_dict({-k: v for k, v in self._t.items() if k < 0})

    def times_i_power(self, n: int) -> "Surd":
        n %= 4
        if n == 0:
            return self
        if n == 2:
            return -self
        out = self * I_SURD
        return out if n == 1 else -out

    # comparison / conversion ------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Surd):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == ({1: Fraction(other)} if other else {})
        if isinstance(other, ExactReal):
            return other == self.to_exact()
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def to_exact(self, basis: Optional[RealBasis] = None) -> ExactReal:
        if not self.is_real():
            raise ValidationError(f"{self} is not real")
        return ExactReal.from_sqrt_terms(dict(self._t), basis)

    def __complex__(self):
        re = sum(float(v) * math.sqrt(k) for k, v in self._t.items() if k > 0)
        im = sum(float(v) * math.sqrt(-k) for k, v in self._t.items() if k < 0)
        return complex(re, im)

    def __float__(self):
        if not self.is_real():
            raise TypeError(f"{self} is not real")
        return float(self.to_exact())

    def __repr__(self):
        return f"Surd({self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for k in sorted(self._t, key=lambda m: (m < 0, abs(m))):
            v = self._t[k]
            unit = "" if k == 1 else ("i" if k == -1 else (f"sqrt({k})" if k > 0 else f"i*sqrt({-k})"))
            parts.append(str(v) if not unit else f"{v}*{unit}")
        return " + ".join(parts)


ZERO = Surd._from_dict({})
ONE_SURD = Surd._from_dict({1: Fraction(1)})
I_SURD = Surd._from_dict({-1: Fraction(1)})
