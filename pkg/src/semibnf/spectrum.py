"""Forward map: normal form coefficients to eigenvalue expansions.

Levels are labelled by N = 1, 2, ... in the order of the harmonic values
<omega|k>; the labelling ``psi`` is produced by an exact best-first walk over
the lattice Z_+^d.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath

from .bnf import BNFData
from .errors import DependentFrequencies, MultisetMismatch, ValidationError
from .scalars import ExactReal, Ordering, align, compare, dot

Number = Union[ExactReal, float]


@dataclass(frozen=True)
class PsiEntry:
    N: int
    k: Tuple[int, ...]
    value: ExactReal


@dataclass
class PsiTable:
    """First M lattice points ordered by <omega|k>; entry N=1 is the origin."""

    omegas: List[ExactReal]
    entries: List[PsiEntry]
    index: Dict[Tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {e.k: e.N for e in self.entries}

    @property
    def dim(self) -> int:
        return len(self.omegas)

    def __len__(self):
        return len(self.entries)

    def k_of(self, N: int) -> Tuple[int, ...]:
        return self.entries[N - 1].k

    def N_of(self, k) -> Optional[int]:
        return self.index.get(tuple(k))

    @property
    def values(self) -> List[ExactReal]:
        return [e.value for e in self.entries]


class _Item:
    __slots__ = ("value", "k")

    def __init__(self, value: ExactReal, k: tuple):
        self.value = value
        self.k = k

    def __lt__(self, other: "_Item") -> bool:
        return compare(self.value, other.value) is Ordering.LESS


def psi_enumerate(omegas: Sequence[ExactReal], M: int) -> PsiTable:
    """The first M points of Z_+^d in increasing order of <omega|k>."""
    omegas = align([ExactReal.coerce(w) for w in omegas])
    d = len(omegas)
    if d == 0:
        raise ValidationError("need at least one frequency")
    zero = ExactReal.zero(omegas[0].basis)
    for w in omegas:
        if compare(w, zero) is not Ordering.GREATER:
            raise ValidationError("frequencies must be positive")
    origin = (0,) * d
    heap = [_Item(zero, origin)]
    seen = {origin}
    entries: List[PsiEntry] = []
    while len(entries) < M:
        item = heapq.heappop(heap)
        if entries and compare(item.value, entries[-1].value) is Ordering.EQUAL:
            raise DependentFrequencies(
                f"<omega|k> coincides for k={entries[-1].k} and k={item.k}",
                k1=entries[-1].k, k2=item.k)
        entries.append(PsiEntry(len(entries) + 1, item.k, item.value))
        for j in range(d):
            nxt = item.k[:j] + (item.k[j] + 1,) + item.k[j + 1:]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, _Item(item.value + omegas[j], nxt))
    # a tie with the next candidate would make the last label ambiguous
    if heap and entries and compare(heap[0].value, entries[-1].value) is Ordering.EQUAL:
        raise DependentFrequencies(
            f"<omega|k> coincides for k={entries[-1].k} and k={heap[0].k}",
            k1=entries[-1].k, k2=heap[0].k)
    return PsiTable(list(omegas), entries)


def _shifted_power(k: Sequence[int], alpha: Sequence[int]) -> Fraction:
    out = Fraction(1)
    for kj, aj in zip(k, alpha):
        if aj:
            out *= (kj + Fraction(1, 2)) ** aj
    return out


def eigenvalue_expansion(bnf: BNFData, k: Sequence[int], J: int) -> List[ExactReal]:
    """Coefficients a_0..a_J of the eigenvalue attached to the lattice point k.

    a_0 = E0, a_1 = E1 + <omega, k + 1/2>, and for j >= 2
    a_j = P_j(k) = sum_{l+|alpha|=j} c[l, alpha] (k + 1/2)^alpha.
    """
    if J < 1:
        raise ValidationError("order J must be >= 1")
    k = tuple(k)
    if len(k) != bnf.dim:
        raise ValidationError(f"lattice point {k} does not match dim={bnf.dim}")
    half = [kj + Fraction(1, 2) for kj in k]
    out = [bnf.E0, bnf.E1 + dot(half, bnf.omegas, bnf.basis)]
    by_order: Dict[int, List] = {}
    for (l, alpha), c in bnf.coeffs.items():
        by_order.setdefault(l + sum(alpha), []).append((alpha, c))
    for j in range(2, J + 1):
        acc = ExactReal.zero(bnf.basis)
        for alpha, c in by_order.get(j, ()):
            acc = acc + c.scale(_shifted_power(k, alpha))
        out.append(acc)
    return out


@dataclass
class SpectralDataset:
    """Truncated hbar-expansions a_0(N) + a_1(N) hbar + ... + a_J(N) hbar^J.

    ``levels[N-1]`` holds the coefficients of level N. Values are either all
    ExactReal (exact mode, lifted to one basis) or all floats (approximate
    mode).
    """

    order: int
    levels: List[List[Number]]
    dim: Optional[int] = None

    def __post_init__(self):
        for n, row in enumerate(self.levels, start=1):
            if len(row) != self.order + 1:
                raise ValidationError(f"level {n} has {len(row)} coefficients, expected {self.order + 1}")
        flat = [v for row in self.levels for v in row]
        if any(isinstance(v, float) for v in flat):
            if not all(isinstance(v, (float, int)) for v in flat):
                raise ValidationError("levels mix exact and floating-point values")
            self.levels = [[float(v) for v in row] for row in self.levels]
            self.exact = False
        else:
            flat = align([ExactReal.coerce(v) for v in flat])
            w = self.order + 1
            self.levels = [flat[i:i + w] for i in range(0, len(flat), w)]
            self.exact = True

    def __len__(self):
        return len(self.levels)

    def coefficient(self, N: int, j: int) -> Number:
        return self.levels[N - 1][j]

    def column(self, j: int) -> List[Number]:
        return [row[j] for row in self.levels]

    def evaluate(self, N: int, hbar: float, J: Optional[int] = None) -> float:
        """Order-J truncation of level N at a numeric hbar."""
        J = self.order if J is None else J
        return sum(float(a) * hbar ** j for j, a in enumerate(self.levels[N - 1][:J + 1]))


def spectrum_forward(bnf: BNFData, M: int, J: int) -> SpectralDataset:
    """Eigenvalue expansions of the first M levels up to order J."""
    table = psi_enumerate(bnf.omegas, M)
    levels = [eigenvalue_expansion(bnf, e.k, J) for e in table.entries]
    return SpectralDataset(J, levels, dim=bnf.dim)


# ---------------------------------------------------------------------------
# Partition function


@dataclass
class PartitionSample:
    z: complex
    truncated: mpmath.mpc
    closed_form: mpmath.mpc
    difference: mpmath.mpf
    tail_bound: mpmath.mpf
    geometric_estimate: mpmath.mpf

    @property
    def ok(self) -> bool:
        return self.difference <= self.tail_bound


@dataclass
class PartitionReport:
    M: int
    multiset_ok: bool
    samples: List[PartitionSample]

    @property
    def ok(self) -> bool:
        return self.multiset_ok and all(s.ok for s in self.samples)


def partition_identity_check(omegas: Sequence, M: int, dataset: Optional[SpectralDataset] = None,
                             E1=0, z_values: Sequence = (0.5, 1, 2), digits: int = 50) -> PartitionReport:
    """Check the product formula for Z(z) = sum_N exp(-z mu_N) on M levels.

    The exact part compares the multiset {mu_N - mu_1 : N <= M} with the first
    M harmonic values from a fresh enumeration (raising MultisetMismatch at
    the first difference). The numeric part compares the truncated sum with
    exp(-z mu_1) prod_j (1 - exp(-z omega_j))^-1 and checks the difference
    against the bound

        sum_{N>M} |exp(-z mu_N)| <= exp(-Re z (mu_1 + nu_{M+1}/2)) prod_j (1 - exp(-Re z omega_j/2))^-1,

    which holds because exp(-t v) <= exp(-t V/2) exp(-t v/2) whenever v >= V.
    """
    table = psi_enumerate(omegas, M + 1)
    omegas = table.omegas
    half_sum = dot([Fraction(1, 2)] * len(omegas), omegas)
    if dataset is None:
        mu = [ExactReal.coerce(E1, half_sum.basis) + half_sum + e.value for e in table.entries[:M]]
    else:
        if len(dataset) < M:
            raise ValidationError(f"dataset has {len(dataset)} levels, {M} requested")
        mu = dataset.column(1)[:M]
    if dataset is None or dataset.exact:
        basis = table.values[0].basis
        mu = align([ExactReal.coerce(m) for m in mu])
        basis = mu[0].basis.union(basis)
        mu = [m.lift(basis) for m in mu]
        for N, (m, e) in enumerate(zip(mu, table.entries), start=1):
            nu = m - mu[0]
            if nu != e.value.lift(basis):
                raise MultisetMismatch(f"nu_{N} = {nu} but the enumeration gives {e.value}",
                                       N=N, value=nu)
    else:
        for N, (m, e) in enumerate(zip(mu, table.entries), start=1):
            if abs((m - mu[0]) - float(e.value)) > 1e-9 * max(1.0, abs(float(e.value))):
                raise MultisetMismatch(f"nu_{N} = {m - mu[0]} but the enumeration gives {e.value}",
                                       N=N, value=m - mu[0])

    samples = []
    with mpmath.workdps(digits):
        mu_f = [_to_mp(m) for m in mu]
        om_f = [_to_mp(w) for w in omegas]
        nu_next = _to_mp(table.entries[M].value)
        gap = min((_to_mp(b.value) - _to_mp(a.value) for a, b in zip(table.entries, table.entries[1:])),
                  default=om_f[0])
        for z in z_values:
            z = mpmath.mpmathify(z)
            re = mpmath.re(z)
            if re < mpmath.mpf("0.1"):
                raise ValidationError(f"Re z must be >= 0.1, got {z}")
            truncated = mpmath.fsum(mpmath.exp(-z * m) for m in mu_f)
            closed = mpmath.exp(-z * mu_f[0])
            for w in om_f:
                closed /= 1 - mpmath.exp(-z * w)
            bound = mpmath.exp(-re * (mu_f[0] + nu_next / 2))
            for w in om_f:
                bound /= 1 - mpmath.exp(-re * w / 2)
            estimate = mpmath.exp(-re * (mu_f[0] + nu_next)) / (1 - mpmath.exp(-re * gap))
            samples.append(PartitionSample(complex(z), truncated, closed, abs(closed - truncated),
                                           bound, estimate))
    return PartitionReport(M, True, samples)


def _to_mp(v) -> mpmath.mpf:
    if isinstance(v, float):
        return mpmath.mpf(v)
    bits = int(mpmath.mp.prec) + 16
    lo, hi = ExactReal.coerce(v).enclosure(bits)
    mid = (lo + hi) / 2
    return mpmath.mpf(mid.numerator) / mid.denominator
