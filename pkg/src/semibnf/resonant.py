"""Completely resonant case omega = (1, ..., 1): clusters of eigenvalues.

A Weyl symbol commuting with Sigma = sum (x_j^2 + xi_j^2)/2 acts on each
eigenspace span{|k> : |k| = N} of the harmonic oscillator. To get its
matrix there the symbol is converted to normal (Wick) order, substituting
z_j -> sqrt(2 hbar) a_j and zbar_j -> sqrt(2 hbar) a_j^dagger.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .errors import NotBlockDiagonal, NotCommuting, ValidationError
from .scalars import Surd, ZERO
from .weyl import ComplexSymbol, FormalSymbol, from_complex, poisson, to_complex

# Weyl -> normal order is exp(WICK_KAPPA * hbar * sum_j d_zj d_zbarj); fixed by
# requiring z zbar / 2 -> hbar a^dag a + hbar / 2 (see tests/test_resonant.py).
WICK_KAPPA = Fraction(1)

HalfPowers = Dict[int, Surd]  # power of hbar^(1/2) -> coefficient


@dataclass
class LadderPolynomial:
    """Normal-ordered operator sum coeff(hbar) (a^dag)^beta a^alpha.

    ``terms[(beta, alpha)]`` maps a power h of hbar^(1/2) to its coefficient.
    """

    dim: int
    terms: Dict[Tuple[tuple, tuple], HalfPowers] = field(default_factory=dict)

    def is_hermitian(self) -> bool:
        for (beta, alpha), poly in self.terms.items():
            other = self.terms.get((alpha, beta), {})
            if {h: c.conjugate() for h, c in poly.items()} != other:
                return False
        return True

    def is_number_conserving(self) -> bool:
        return all(sum(b) == sum(a) for b, a in self.terms)

    def evaluate(self, hbar: float) -> Dict[Tuple[tuple, tuple], complex]:
        return {key: sum(complex(c) * hbar ** (h / 2) for h, c in poly.items())
                for key, poly in self.terms.items()}


def _falling(n: int, k: int) -> int:
    out = 1
    for t in range(k):
        out *= n - t
    return out


def weyl_to_wick(c: ComplexSymbol) -> LadderPolynomial:
    """Normal-ordered ladder form of the Weyl quantization of ``c``."""
    acc: Dict[Tuple[tuple, tuple], HalfPowers] = {}
    for (j, a, b), coeff in c.terms.items():
        ranges = [range(min(p, q) + 1) for p, q in zip(a, b)]
        for n in itertools.product(*ranges):
            w = WICK_KAPPA ** sum(n)
            for p, q, m in zip(a, b, n):
                w *= Fraction(_falling(p, m) * _falling(q, m), math.factorial(m))
            a2 = tuple(p - m for p, m in zip(a, n))
            b2 = tuple(q - m for q, m in zip(b, n))
            degree = sum(a2) + sum(b2)
            # (sqrt(2 hbar))^degree
            value = coeff * w * Surd.sqrt(2 ** degree)
            h = 2 * j + 2 * sum(n) + degree
            key = (b2, a2)  # (a^dag)^zbar-power a^z-power
            poly = acc.setdefault(key, {})
            poly[h] = poly.get(h, ZERO) + value
    terms = {}
    for key, poly in acc.items():
        poly = {h: v for h, v in poly.items() if v}
        if poly:
            terms[key] = poly
    return LadderPolynomial(c.dim, terms)


def cluster_basis(d: int, N: int) -> List[tuple]:
    """Multi-indices with |k| = N in descending lexicographic order."""
    pts = [k for k in itertools.product(range(N + 1), repeat=d) if sum(k) == N]
    return sorted(pts, reverse=True)


def _ladder_element(k: tuple, beta: tuple, alpha: tuple) -> Optional[Tuple[tuple, Surd]]:
    """(a^dag)^beta a^alpha |k> = value |k'>, or None if it vanishes."""
    if any(kk < aa for kk, aa in zip(k, alpha)):
        return None
    inner = 1
    k2 = []
    for kk, bb, aa in zip(k, beta, alpha):
        mid = kk - aa
        inner *= _falling(kk, aa) * _falling(mid + bb, bb)
        k2.append(mid + bb)
    return tuple(k2), Surd.sqrt(inner)


@dataclass
class FockBlock:
    """Exact matrix of a ladder polynomial on a set of Fock states."""

    basis: List[tuple]
    entries: List[List[HalfPowers]]

    @property
    def size(self) -> int:
        return len(self.basis)

    def evaluate(self, hbar: float) -> np.ndarray:
        n = self.size
        out = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                for h, c in self.entries[i][j].items():
                    out[i, j] += complex(c) * hbar ** (h / 2)
        if not np.any(out.imag):
            return out.real
        return out

    def evaluate_exact(self, hbar: Fraction) -> List[List[Surd]]:
        """Entries at a rational hbar; needs integer hbar powers."""
        hbar = Fraction(hbar)
        out = []
        for row in self.entries:
            vals = []
            for poly in row:
                v = ZERO
                for h, c in poly.items():
                    if h % 2:
                        raise ValidationError("odd half-power of hbar: entry is not rational in hbar")
                    v = v + c * hbar ** (h // 2)
                vals.append(v)
            out.append(vals)
        return out

    def is_hermitian(self) -> bool:
        n = self.size
        return all({h: c.conjugate() for h, c in self.entries[i][j].items()} == self.entries[j][i]
                   for i in range(n) for j in range(n))


def _build_block(L: LadderPolynomial, basis: List[tuple], strict: bool) -> FockBlock:
    pos = {k: i for i, k in enumerate(basis)}
    n = len(basis)
    entries: List[List[HalfPowers]] = [[{} for _ in range(n)] for _ in range(n)]
    for (beta, alpha), poly in L.terms.items():
        for col, k in enumerate(basis):
            hit = _ladder_element(k, beta, alpha)
            if hit is None:
                continue
            k2, amp = hit
            row = pos.get(k2)
            if row is None:
                if strict:
                    raise NotBlockDiagonal(f"term (a^dag)^{beta} a^{alpha} leaves the block")
                continue
            cell = entries[row][col]
            for h, c in poly.items():
                v = cell.get(h, ZERO) + c * amp
                if v:
                    cell[h] = v
                else:
                    cell.pop(h, None)
    return FockBlock(list(basis), entries)


def fock_matrix(L: LadderPolynomial, N: int) -> FockBlock:
    """Matrix of L on span{|k> : |k| = N} in descending lexicographic order."""
    bad = [key for key in L.terms if sum(key[0]) != sum(key[1])]
    if bad:
        raise NotBlockDiagonal(f"terms change the excitation number: {bad[:3]}", terms=bad)
    return _build_block(L, cluster_basis(L.dim, N), strict=True)


def fock_matrix_full(L: LadderPolynomial, n_max: int) -> FockBlock:
    """Matrix of L on span{|k> : |k| <= n_max}, ordered by |k| then as in ``fock_matrix``."""
    basis = [k for n in range(n_max + 1) for k in cluster_basis(L.dim, n)]
    return _build_block(L, basis, strict=False)


@dataclass
class ClusterSpectrum:
    N: int
    hbar: float
    eigenvalues: List[float]
    center: float

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    @property
    def width(self) -> float:
        return max(self.eigenvalues) - min(self.eigenvalues)


def resonant_harmonic(d: int, truncation: int) -> FormalSymbol:
    return FormalSymbol.harmonic([1] * d, truncation)


def resonant_average(f: FormalSymbol) -> FormalSymbol:
    """Average of f along the flow of Sigma: keep the |a| = |b| monomials."""
    c = to_complex(f)
    kept = {k: v for k, v in c.terms.items() if sum(k[1]) == sum(k[2])}
    return from_complex(ComplexSymbol(c.dim, c.truncation, kept, _trusted=True))


def cluster_spectrum(B: FormalSymbol, N: int, hbar: float, digits: Optional[int] = None) -> ClusterSpectrum:
    """Eigenvalues of Op^W(B) on the N-th eigenspace of Sigma, sorted ascending.

    ``digits`` switches the diagonalization to mpmath at that precision.
    """
    sigma = resonant_harmonic(B.dim, B.truncation)
    if poisson(sigma, B):
        raise NotCommuting("symbol does not Poisson-commute with Sigma")
    L = weyl_to_wick(to_complex(B))
    block = fock_matrix(L, N)
    if digits is None:
        M = block.evaluate(hbar)
        eig = np.linalg.eigvalsh(M)
        values = sorted(float(v) for v in eig)
    else:
        with mpmath.workdps(digits):
            h = mpmath.mpf(hbar)
            n = block.size
            A = mpmath.matrix(n, n)
            for i in range(n):
                for j in range(n):
                    for p, c in block.entries[i][j].items():
                        A[i, j] += mpmath.mpc(complex(c)) * h ** (mpmath.mpf(p) / 2)
            E = mpmath.eighe(A, eigvals_only=True)
            values = sorted(float(mpmath.re(v)) for v in E)
    zero = (0,) * B.dim
    p01 = complex(B.coefficient(1, zero, zero)).real
    center = hbar * (N + B.dim / 2 + p01)
    return ClusterSpectrum(N, hbar, values, center)


def cluster_charpoly(B: FormalSymbol, N: int, hbar) -> List[Surd]:
    """Exact characteristic polynomial of a cluster block (size <= 4) at rational hbar.

    Returns coefficients c_0..c_n of det(t I - A) = sum c_i t^i, via the
    Faddeev-LeVerrier recursion.
    """
    L = weyl_to_wick(to_complex(B))
    block = fock_matrix(L, N)
    if block.size > 4:
        raise ValidationError("exact characteristic polynomials are limited to blocks of size <= 4")
    A = block.evaluate_exact(Fraction(hbar))
    n = block.size
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = Surd(1)
    Mk = [[ZERO] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        prev = Mk
        Mk = [[sum((A[i][t] * prev[t][j] for t in range(n)), ZERO) + (coeffs[n - k + 1] if i == j else ZERO)
               for j in range(n)] for i in range(n)]
        AM = [[sum((A[i][t] * Mk[t][j] for t in range(n)), ZERO) for j in range(n)] for i in range(n)]
        trace = sum((AM[i][i] for i in range(n)), ZERO)
        coeffs[n - k] = -trace / k
    return coeffs
