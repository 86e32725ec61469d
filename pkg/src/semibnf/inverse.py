"""Inverse map: eigenvalue expansions back to the normal form.

Pipeline: E0 from the constant terms, the frequencies by sieving the
first-order terms, the labelling psi by enumeration, each P_j by exact
interpolation on the simplex lattice {|k| <= j}, and finally the
coefficients c[l, alpha] by re-expanding P_j around k + 1/2.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _linalg
from .bnf import BNFData
from .errors import (AmbiguousTail, EmptyInput, InconsistentE0, InsufficientLevels,
                     MultisetMismatch, OverdeterminedMismatch, ValidationError)
from .scalars import CombinationSolver, ExactReal, Ordering, compare, dot
from .spectrum import PsiEntry, PsiTable, SpectralDataset, psi_enumerate

DEFAULT_TOLERANCE = 1e-9

Number = Union[ExactReal, float]


def simplex_lattice(d: int, j: int) -> List[Tuple[int, ...]]:
    """All k in Z_+^d with |k| <= j, graded then lexicographic."""
    out = []
    for total in range(j + 1):
        for k in itertools.product(range(total + 1), repeat=d):
            if sum(k) == total:
                out.append(k)
    return out


def _monomial(k: Sequence, beta: Sequence) -> Fraction:
    out = Fraction(1)
    for kk, b in zip(k, beta):
        out *= Fraction(kk) ** b
    return out


@dataclass
class ClusterPolynomial:
    """Polynomial of total degree <= ``degree`` in d variables."""

    degree: int
    dim: int
    coeffs: Dict[Tuple[int, ...], Number] = field(default_factory=dict)
    max_residual: float = 0.0
    exact: bool = True

    def __post_init__(self):
        for beta in self.coeffs:
            if len(beta) != self.dim or sum(beta) > self.degree:
                raise ValidationError(f"monomial {beta} does not fit degree {self.degree}, dim {self.dim}")

    def __call__(self, k: Sequence) -> Number:
        terms = [(c, _monomial(k, beta)) for beta, c in self.coeffs.items()]
        if not self.exact:
            return float(sum(c * float(m) for c, m in terms))
        acc = ExactReal.zero(terms[0][0].basis) if terms else ExactReal.zero()
        for c, m in terms:
            acc = acc + c.scale(m)
        return acc


# ---------------------------------------------------------------------------


@dataclass
class FirstOrderData:
    E0: Number
    mu1: Number
    mu: List[Number]


def extract_E0_E1(dataset: SpectralDataset, tolerance: float = DEFAULT_TOLERANCE) -> FirstOrderData:
    """E0 from a_0(1), checked against every level; mu_N = a_1(N).

    mu_1 = E1 + sum(omega)/2 is kept whole; ``isolate_E1`` splits it once the
    frequencies are known.
    """
    if dataset.order < 1:
        raise ValidationError("dataset order must be >= 1")
    if not len(dataset):
        raise EmptyInput("dataset has no levels")
    E0 = dataset.coefficient(1, 0)
    bad = []
    for N in range(2, len(dataset) + 1):
        a0 = dataset.coefficient(N, 0)
        same = a0 == E0 if dataset.exact else abs(a0 - E0) <= tolerance * max(1.0, abs(E0))
        if not same:
            bad.append(N)
    if bad:
        raise InconsistentE0(f"a_0 differs from E0 = {E0} at levels {bad}", levels=bad)
    mu = dataset.column(1)
    return FirstOrderData(E0, mu[0], mu)


def isolate_E1(mu1: Number, omegas: Sequence[Number]) -> Number:
    if isinstance(mu1, ExactReal):
        return mu1 - dot([Fraction(1, 2)] * len(omegas), list(omegas), mu1.basis)
    return mu1 - 0.5 * sum(float(w) for w in omegas)


@dataclass
class SieveState:
    """Frequencies found so far, values not yet explained, and coverage."""

    discovered: List[Number]
    survivors: List[Number]
    generated: int
    coverage: Number

    @property
    def dim(self) -> int:
        return len(self.discovered)


def sieve_omegas(mu: Sequence[Number], d: Optional[int] = None,
                 tolerance: float = DEFAULT_TOLERANCE, check_tail: bool = True) -> SieveState:
    """Recover the frequencies from the sorted first-order terms mu_N.

    With nu_N = mu_N - mu_1, the smallest nu that is not a non-negative
    integer combination of the frequencies found so far is the next
    frequency. Frequencies are certified only below ``coverage = nu_M``.
    ``AMBIGUOUS_TAIL`` is raised when the window does not even contain twice
    the largest frequency found, or when ``d`` is given and disagrees with
    the number found.
    """
    mu = list(mu)
    if not mu:
        raise EmptyInput("no levels to sieve")
    exact = isinstance(mu[0], ExactReal)
    for a, b in zip(mu, mu[1:]):
        increasing = compare(a, b) is Ordering.LESS if exact else b - a > tolerance
        if not increasing:
            raise ValidationError(f"first-order terms must be strictly increasing: {a}, {b}")
    nu = [m - mu[0] for m in mu]
    discovered: List[Number] = []
    if exact:
        solver = CombinationSolver([])
        for v in nu[1:]:
            if solver(v) is None:
                discovered.append(v)
                solver = CombinationSolver(discovered)
        survivors = [v for v in nu if solver(v) is None]
    else:
        generated = _FloatCombinations(nu[-1], tolerance)
        for v in nu[1:]:
            if not generated.contains(v):
                discovered.append(v)
                generated.add_generator(v)
        survivors = [v for v in nu if not generated.contains(v)]
    state = SieveState(discovered, survivors, len(nu) - len(survivors), nu[-1])
    if d is not None and len(discovered) != d:
        raise AmbiguousTail(f"found {len(discovered)} frequencies, expected d = {d}",
                            found=len(discovered), expected=d)
    if check_tail and discovered:
        top = discovered[-1]
        beyond = compare(top.scale(2), nu[-1]) is Ordering.GREATER if exact else 2 * top > nu[-1]
        if beyond:
            raise AmbiguousTail(f"coverage window nu_M = {nu[-1]} is shorter than twice the largest "
                                f"frequency {top}; more levels are needed", coverage=nu[-1])
    return state


class _FloatCombinations:
    """Approximate-mode membership: all combinations below a ceiling, sorted."""

    def __init__(self, ceiling: float, tolerance: float):
        self.ceiling = ceiling
        self.tol = tolerance
        self.values = np.array([0.0])

    def contains(self, v: float) -> bool:
        i = np.searchsorted(self.values, v)
        near = self.values[max(i - 1, 0):i + 1]
        return bool(np.any(np.abs(near - v) <= self.tol * max(1.0, abs(v))))

    def add_generator(self, w: float) -> None:
        vals = self.values
        shifts = [vals + n * w for n in range(1, int(self.ceiling / w) + 2)]
        merged = np.concatenate([vals] + shifts)
        self.values = np.sort(merged[merged <= self.ceiling * (1 + self.tol) + self.tol])


def recover_Pj(dataset: SpectralDataset, psi: PsiTable, j: int,
               tolerance: float = DEFAULT_TOLERANCE) -> ClusterPolynomial:
    """Interpolate P_j on the simplex lattice {|k| <= j} and check all other levels."""
    if not 2 <= j <= dataset.order:
        raise ValidationError(f"j must lie in [2, {dataset.order}]")
    d = psi.dim
    nodes = simplex_lattice(d, j)
    usable = min(len(dataset), len(psi))
    missing = [k for k in nodes if psi.N_of(k) is None or psi.N_of(k) > usable]
    if missing:
        raise InsufficientLevels(f"levels missing for lattice points {missing}", missing=missing)
    monomials = nodes  # same index set: exponents beta with |beta| <= j
    V = [[_monomial(k, beta) for beta in monomials] for k in nodes]
    values = [dataset.coefficient(psi.N_of(k), j) for k in nodes]
    if dataset.exact:
        Vinv = _linalg.inverse(V)
        basis = values[0].basis
        coeffs = {}
        for beta, row in zip(monomials, Vinv):
            c = ExactReal.zero(basis)
            for w, y in zip(row, values):
                if w:
                    c = c + y.scale(w)
            if not c.is_zero():
                coeffs[beta] = c
        P = ClusterPolynomial(j, d, coeffs)
        bad = [N for N in range(1, usable + 1) if P(psi.k_of(N)) != dataset.coefficient(N, j)]
        if bad:
            raise OverdeterminedMismatch(f"levels {bad} contradict the degree-{j} interpolant",
                                         levels=bad)
        return P
    A = np.array([[float(v) for v in row] for row in V])
    sol = np.linalg.solve(A, np.array(values, dtype=float))
    P = ClusterPolynomial(j, d, {beta: float(c) for beta, c in zip(monomials, sol)
                                 if abs(c) > 0.0}, exact=False)
    residuals = [abs(P(psi.k_of(N)) - dataset.coefficient(N, j)) for N in range(1, usable + 1)]
    P.max_residual = max(residuals, default=0.0)
    scale = max(1.0, max(abs(v) for v in values))
    if P.max_residual > tolerance * scale * 1e3:
        bad = [N for N, r in enumerate(residuals, start=1) if r > tolerance * scale * 1e3]
        raise OverdeterminedMismatch(f"levels {bad} contradict the degree-{j} interpolant",
                                     levels=bad, max_residual=P.max_residual)
    return P


def _shift_half(P: ClusterPolynomial) -> dict:
    """Coefficients of P in the basis (Z + 1/2)^alpha."""
    out: dict = {}
    for beta, c in P.coeffs.items():
        # Z^beta = prod (W - 1/2)^beta_i with W = Z + 1/2
        ranges = [range(b + 1) for b in beta]
        for alpha in itertools.product(*ranges):
            w = Fraction(1)
            for a, b in zip(alpha, beta):
                w *= math.comb(b, a) * Fraction(-1, 2) ** (b - a)
            term = c.scale(w) if isinstance(c, ExactReal) else c * float(w)
            out[alpha] = term if alpha not in out else out[alpha] + term
    return out


def recover_c(polynomials: Sequence[ClusterPolynomial], omegas, E0, E1) -> BNFData:
    """c[j - |alpha|, alpha] from P_j = sum c (Z + 1/2)^alpha."""
    coeffs = {}
    for P in polynomials:
        for alpha, c in _shift_half(P).items():
            zero = c.is_zero() if isinstance(c, ExactReal) else c == 0.0
            if not zero:
                coeffs[(P.degree - sum(alpha), alpha)] = c
    if any(isinstance(c, float) for c in coeffs.values()) or isinstance(E0, float):
        return ApproximateBNF(list(map(float, omegas)), float(E0), float(E1),
                              {k: float(v) for k, v in coeffs.items()})
    return BNFData(list(omegas), E0, E1, coeffs)


@dataclass
class ApproximateBNF:
    """Floating-point counterpart of BNFData returned in approximate mode."""

    omegas: List[float]
    E0: float
    E1: float
    coeffs: Dict[tuple, float]

    @property
    def dim(self) -> int:
        return len(self.omegas)


def invert_spectrum(dataset: SpectralDataset, d: Optional[int] = None,
                    tolerance: float = DEFAULT_TOLERANCE, check_tail: bool = True):
    """Normal form data determined by the eigenvalue expansions."""
    if dataset.order < 2:
        raise ValidationError("dataset order must be >= 2")
    first = extract_E0_E1(dataset, tolerance)
    sieve = sieve_omegas(first.mu, d=d if d is not None else dataset.dim,
                         tolerance=tolerance, check_tail=check_tail)
    omegas = sieve.discovered
    E1 = isolate_E1(first.mu1, omegas)
    M = len(dataset)
    if dataset.exact:
        psi = psi_enumerate(omegas, M)
        for e, m in zip(psi.entries, first.mu):
            if m - first.mu1 != e.value:
                raise MultisetMismatch(f"first-order term of level {e.N} is not mu_1 + <omega|psi(N)>",
                                       N=e.N)
    else:
        psi = _float_psi(omegas, M, tolerance)
    polys = [recover_Pj(dataset, psi, j, tolerance) for j in range(2, dataset.order + 1)]
    return recover_c(polys, omegas, first.E0, E1)


def _float_psi(omegas: Sequence[float], M: int, tolerance: float) -> PsiTable:
    """Approximate-mode labelling: best-first walk on float values."""
    om = [float(w) for w in omegas]
    d = len(om)
    origin = (0,) * d
    heap = [(0.0, origin)]
    seen = {origin}
    entries: List[PsiEntry] = []
    while len(entries) < M:
        v, k = heapq.heappop(heap)
        if entries and v - entries[-1].value <= tolerance * max(1.0, v):
            raise ValidationError("harmonic values closer than the tolerance; labelling is ambiguous")
        entries.append(PsiEntry(len(entries) + 1, k, v))
        for j in range(d):
            nxt = k[:j] + (k[j] + 1,) + k[j + 1:]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (v + om[j], nxt))
    return PsiTable(list(omegas), entries)
