"""Birkhoff normalization of a Weyl symbol near a non-resonant minimum.

The symbol is normalized grade by grade: at grade n the non-kernel part of
the grade-n component is removed by a conjugation ``g_S`` whose generator
solves the cohomological equation. What remains at every grade is a
polynomial in the actions ``I_j = z_j zbar_j / 2`` and hbar, which is then
rewritten in the operator basis ``hbar^l Omega^alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import NotActionPolynomial, ResonantDenominator, ValidationError
from .scalars import (ExactReal, Ordering, RealBasis, Surd, ZERO, align, check_independent,
                      common_basis, compare, dot)
from .weyl import (ComplexSymbol, FormalSymbol, conjugate_by, from_complex, grade_component,
                   moyal_star, to_complex)

CoeffKey = Tuple[int, Tuple[int, ...]]


def _validate_omegas(omegas: Sequence[ExactReal]) -> None:
    zero = ExactReal.zero(omegas[0].basis)
    if compare(omegas[0], zero) is not Ordering.GREATER:
        raise ValidationError("frequencies must be positive")
    for a, b in zip(omegas, omegas[1:]):
        if compare(a, b) is not Ordering.LESS:
            raise ValidationError(f"frequencies must be strictly increasing: {a} !< {b}")
    check_independent(omegas)


@dataclass
class HamiltonianInput:
    """Full Weyl symbol expanded at the minimum, with diagonal quadratic part.

    ``taylor`` must contain ``E0`` at grade 0, nothing at grade 1, and exactly
    ``sum_j omega_j (x_j^2 + xi_j^2)/2 + hbar E1`` at grade 2.
    """

    omegas: List[ExactReal]
    E0: ExactReal
    E1: ExactReal
    taylor: FormalSymbol

    def __post_init__(self):
        values = [ExactReal.coerce(w) for w in self.omegas]
        values += [ExactReal.coerce(self.E0), ExactReal.coerce(self.E1)]
        values = align(values)
        self.omegas, self.E0, self.E1 = values[:-2], values[-2], values[-1]
        if len(self.omegas) != self.taylor.dim:
            raise ValidationError(f"{len(self.omegas)} frequencies for a dim={self.taylor.dim} symbol")
        _validate_omegas(self.omegas)
        d, D = self.dim, self.truncation
        expected0 = FormalSymbol.constant(d, D, self.E0.to_surd())
        if grade_component(self.taylor, 0) != expected0:
            raise ValidationError("grade-0 part of the symbol differs from E0")
        if grade_component(self.taylor, 1):
            raise ValidationError("symbol has linear terms: the origin is not a critical point")
        expected2 = FormalSymbol.harmonic(self.omegas, D) + FormalSymbol.hbar(d, D).scale(self.E1.to_surd())
        if grade_component(self.taylor, 2) != expected2:
            raise ValidationError("grade-2 part must be sum omega_j (x_j^2+xi_j^2)/2 + hbar*E1")

    @property
    def dim(self) -> int:
        return self.taylor.dim

    @property
    def truncation(self) -> int:
        return self.taylor.truncation

    @property
    def basis(self) -> RealBasis:
        return self.E0.basis

    @classmethod
    def from_perturbation(cls, omegas, perturbation: FormalSymbol, E0=0, E1=0) -> "HamiltonianInput":
        """E0 + Sigma + hbar*E1 + perturbation (perturbation of grade >= 3)."""
        d, D = perturbation.dim, perturbation.truncation
        omegas = [ExactReal.coerce(w) for w in omegas]
        E0, E1 = ExactReal.coerce(E0), ExactReal.coerce(E1)
        taylor = (FormalSymbol.constant(d, D, E0.to_surd()) + FormalSymbol.harmonic(omegas, D)
                  + FormalSymbol.hbar(d, D).scale(E1.to_surd()) + perturbation)
        return cls(omegas, E0, E1, taylor)


@dataclass
class BNFData:
    """E0 + hbar E1 + sum omega_j Omega_j + sum c[l, alpha] hbar^l Omega^alpha."""

    omegas: List[ExactReal]
    E0: ExactReal
    E1: ExactReal
    coeffs: Dict[CoeffKey, ExactReal] = field(default_factory=dict)

    def __post_init__(self):
        coeffs = {(int(l), tuple(int(a) for a in alpha)): ExactReal.coerce(c)
                  for (l, alpha), c in self.coeffs.items()}
        keys = list(coeffs)
        values = align([ExactReal.coerce(w) for w in self.omegas]
                       + [ExactReal.coerce(self.E0), ExactReal.coerce(self.E1)]
                       + [coeffs[k] for k in keys])
        d = len(self.omegas)
        self.omegas = values[:d]
        self.E0, self.E1 = values[d], values[d + 1]
        self.coeffs = {}
        for k, v in zip(keys, values[d + 2:]):
            l, alpha = k
            if len(alpha) != d:
                raise ValidationError(f"exponent {alpha} does not match dim={d}")
            if l < 0 or min(alpha) < 0:
                raise ValidationError(f"negative index in {k}")
            if l + sum(alpha) < 2:
                raise ValidationError(f"coefficient {k} must have l + |alpha| >= 2")
            if not v.is_zero():
                self.coeffs[k] = v

    @property
    def dim(self) -> int:
        return len(self.omegas)

    @property
    def basis(self) -> RealBasis:
        return self.E0.basis

    @property
    def order(self) -> int:
        """Largest l + |alpha| among stored coefficients (at least 1)."""
        return max((l + sum(a) for l, a in self.coeffs), default=1)

    def lift(self, basis: RealBasis) -> "BNFData":
        return BNFData([w.lift(basis) for w in self.omegas], self.E0.lift(basis), self.E1.lift(basis),
                       {k: v.lift(basis) for k, v in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, BNFData):
            return NotImplemented
        return (self.omegas == other.omegas and self.E0 == other.E0 and self.E1 == other.E1
                and self.coeffs == other.coeffs)


# ---------------------------------------------------------------------------
# Cohomological equation


class _Divisors:
    """Cache of 1 / (i <omega, a - b>), guarded against resonances."""

    def __init__(self, omegas: Sequence[ExactReal]):
        self.omegas = list(omegas)
        self._zero = ExactReal.zero(self.omegas[0].basis)
        self._cache: dict = {}

    def __call__(self, delta: tuple) -> Surd:
        inv = self._cache.get(delta)
        if inv is None:
            value = dot(delta, self.omegas)
            if compare(value, self._zero) is Ordering.EQUAL:
                raise ResonantDenominator(f"<omega, {delta}> = 0", delta=delta)
            inv = (Surd.gaussian(0, 1) * value.to_surd()).inverse()
            self._cache[delta] = inv
        return inv


def cohomological_solve(K: ComplexSymbol, omegas: Sequence[ExactReal], _divisors=None):
    """Split a homogeneous K as ``{Sigma, S} + R`` with R in the kernel (a = b).

    S has coefficient ``K[j,a,b] / (i <omega, a-b>)`` on each a != b
    monomial, so it is real-valued whenever K is.
    """
    grades = K.grades()
    if len(grades) > 1:
        raise ValidationError(f"K is not homogeneous: grades {grades}")
    divisors = _divisors or _Divisors(omegas)
    S, R = {}, {}
    for (j, a, b), c in K.terms.items():
        if a == b:
            R[(j, a, b)] = c
        else:
            S[(j, a, b)] = c * divisors(tuple(p - q for p, q in zip(a, b)))
    return (ComplexSymbol(K.dim, K.truncation, S, _trusted=True),
            ComplexSymbol(K.dim, K.truncation, R, _trusted=True))


@dataclass
class NormalizationResult:
    symbol: ComplexSymbol
    generators: List[FormalSymbol]

    def __iter__(self):
        return iter((self.symbol, self.generators))


def normalize(H: HamiltonianInput, D: Optional[int] = None) -> NormalizationResult:
    """Run the grade-by-grade normalization up to grade D.

    Returns the normal symbol in complex coordinates (every term a
    polynomial in the actions and hbar) and the applied generators, one per
    grade 3..D, such that conjugating the input by them in order reproduces
    the normal symbol.
    """
    D = H.truncation if D is None else D
    if D > H.truncation:
        raise ValidationError(f"requested grade {D} exceeds the input truncation {H.truncation}")
    running = H.taylor.with_truncation(D)
    divisors = _Divisors(H.omegas)
    generators = []
    for n in range(3, D + 1):
        K = to_complex(grade_component(running, n))
        S, R = cohomological_solve(K, H.omegas, divisors)
        if n % 2 and R:
            raise AssertionError(f"odd grade {n} left a kernel remainder")
        gen = -from_complex(S)
        if gen:
            running = conjugate_by(gen, running)
        generators.append(gen)
        assert to_complex(grade_component(running, n)) == R
    return NormalizationResult(to_complex(running), generators)


def replay(generators: Sequence[FormalSymbol], symbol: FormalSymbol) -> FormalSymbol:
    """Apply the conjugations of a normalization run to ``symbol``, in order."""
    D = generators[0].truncation if generators else symbol.truncation
    out = symbol.with_truncation(D)
    for gen in generators:
        if gen:
            out = conjugate_by(gen, out)
    return out


# ---------------------------------------------------------------------------
# Operator basis


@lru_cache(maxsize=None)
def _star_power_actions(n: int) -> tuple:
    """I^{*n} for one mode as ``((hbar power, action power), coeff)`` pairs."""
    I = FormalSymbol.action(0, 1, max(2 * n, 2))
    P = FormalSymbol.constant(1, max(2 * n, 2), 1)
    for _ in range(n):
        P = moyal_star(P, I)
    out = []
    for (j, a, b), c in to_complex(P).terms.items():
        assert a == b
        out.append(((j, a[0]), c * 2 ** a[0]))
    return tuple(out)


def star_power_actions(alpha: Sequence[int]) -> dict:
    """Weyl symbol of Omega^alpha as ``{(l, beta): coeff}`` on hbar^l I^beta."""
    out = {(0, ()): Surd(1)}
    for n in alpha:
        nxt: dict = {}
        for (l, beta), c in out.items():
            for (m, p), v in _star_power_actions(n):
                key = (l + m, beta + (p,))
                nxt[key] = nxt.get(key, ZERO) + c * v
        out = {k: v for k, v in nxt.items() if v}
    return out


def action_coefficients(K: ComplexSymbol) -> dict:
    """Plain monomial coefficients ``{(l, beta): coeff}`` of K as a polynomial in hbar and I."""
    out = {}
    for (j, a, b), c in K.terms.items():
        if a != b:
            raise NotActionPolynomial(f"monomial z^{a} zbar^{b} is not a function of the actions")
        out[(j, a)] = c * 2 ** sum(a)
    return out


def omega_basis_convert(K: ComplexSymbol) -> dict:
    """Coefficients c[l, alpha] with Op^W(K) = sum c[l, alpha] hbar^l Omega^alpha."""
    remaining = action_coefficients(K)
    coeffs: dict = {}
    while remaining:
        key = max(remaining, key=lambda k: (sum(k[1]), k[1], k[0]))
        c = remaining[key]
        l, beta = key
        coeffs[key] = coeffs.get(key, ZERO) + c
        for (m, gamma), v in star_power_actions(beta).items():
            k2 = (l + m, gamma)
            new = remaining.get(k2, ZERO) - c * v
            if new:
                remaining[k2] = new
            else:
                remaining.pop(k2, None)
    return {k: v for k, v in coeffs.items() if v}


def bnf_of_hamiltonian(H: HamiltonianInput, D: Optional[int] = None) -> BNFData:
    """Normal form coefficients c[l, alpha] of H, up to grade D."""
    result = normalize(H, D)
    coeffs = omega_basis_convert(result.symbol)
    d = H.dim
    zero = (0,) * d
    expected = {(0, zero): H.E0.to_surd(), (1, zero): H.E1.to_surd()}
    for i, w in enumerate(H.omegas):
        expected[(0, tuple(int(k == i) for k in range(d)))] = w.to_surd()
    for key, value in expected.items():
        if coeffs.pop(key, ZERO) != value:
            raise AssertionError(f"low-order coefficient {key} changed during normalization")
    real = {}
    for key, c in coeffs.items():
        if not c.is_real():
            raise AssertionError(f"normal form coefficient {key} = {c} is not real")
        real[key] = c.to_exact()
    basis = common_basis(list(real.values()) + [H.E0])
    return BNFData([w.lift(basis) for w in H.omegas], H.E0.lift(basis), H.E1.lift(basis),
                   {k: v.lift(basis) for k, v in real.items()})
