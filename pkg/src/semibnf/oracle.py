"""Independent numerical check: Hermite-basis eigensolvers for -hbar^2/2 Laplacian + V.

Matrix elements of polynomial potentials are exact in the oscillator basis
(x is tridiagonal in a, a^dagger), so the only error is basis truncation,
which each solver controls by a doubling test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import sparse

from .errors import ConfinementError, NotConverged, ValidationError
from .spectrum import eigenvalue_expansion, psi_enumerate

CONVERGENCE_RTOL = 1e-10
NOISE_FLOOR = 1e-11


@dataclass
class PolynomialPotential:
    """V(x) = sum_alpha coeffs[alpha] x^alpha in one or two dimensions."""

    dim: int
    coeffs: Dict[Tuple[int, ...], float]

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValidationError("potentials are supported in dimension 1 or 2")
        clean = {}
        for alpha, c in self.coeffs.items():
            alpha = (alpha,) if isinstance(alpha, int) else tuple(alpha)
            if len(alpha) != self.dim:
                raise ValidationError(f"exponent {alpha} does not match dim={self.dim}")
            if c:
                clean[alpha] = float(c)
        self.coeffs = clean
        self._check_confinement()

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.coeffs), default=0)

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros(x.shape[:-1])
        for alpha, c in self.coeffs.items():
            out = out + c * np.prod(x ** np.array(alpha), axis=-1)
        return out

    def _check_confinement(self):
        # V must exceed V(0) far from the origin in every sampled direction
        if self.dim == 1:
            dirs = np.array([[1.0], [-1.0]])
        else:
            t = np.linspace(0, 2 * np.pi, 72, endpoint=False)
            dirs = np.stack([np.cos(t), np.sin(t)], axis=1)
        radii = np.geomspace(10.0, 1e3, 12)
        pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, self.dim)
        v0 = float(self(np.zeros(self.dim))[0])
        outer = radii[-1] * dirs
        if np.min(self(pts)) <= v0 or np.min(self(outer)) <= v0 + 1.0:
            raise ConfinementError("potential is not confining: V does not exceed V(0) at large |x|")

    def mode_frequencies(self) -> List[float]:
        """Per-mode frequencies of the quadratic part (1 where it is absent)."""
        out = []
        for j in range(self.dim):
            unit = tuple(2 if i == j else 0 for i in range(self.dim))
            c = self.coeffs.get(unit, 0.0)
            out.append(math.sqrt(2 * c) if c > 0 else 1.0)
        return out


def _ladder(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


def _mode_matrices(n: int, hbar: float, omega: float, max_power: int):
    """x^p (p <= max_power) and p^2 on n oscillator states, exact in the top-left block."""
    a = _ladder(n)
    x = math.sqrt(hbar / (2 * omega)) * (a + a.T)
    d = a.T - a
    p2 = -(hbar * omega / 2) * (d @ d)
    powers = [np.eye(n)]
    for _ in range(max_power):
        powers.append(powers[-1] @ x)
    return powers, p2


def _hamiltonian_1d(V: PolynomialPotential, hbar: float, n: int) -> np.ndarray:
    omega = V.mode_frequencies()[0]
    m = n + V.degree + 2
    powers, p2 = _mode_matrices(m, hbar, omega, V.degree)
    H = 0.5 * p2
    for (k,), c in V.coeffs.items():
        H = H + c * powers[k]
    H = H[:n, :n]
    return (H + H.T) / 2


def _eig(H: np.ndarray, dps: Optional[int]) -> np.ndarray:
    if dps is None:
        return np.linalg.eigvalsh(H)
    with mpmath.workdps(dps):
        E = mpmath.eigsy(mpmath.matrix(H.tolist()), eigvals_only=True)
        return np.array(sorted(float(v) for v in E))


def _check_converged(small: np.ndarray, large: np.ndarray, n_levels: int, what: str):
    a, b = small[:n_levels], large[:n_levels]
    scale = np.maximum(np.abs(b), NOISE_FLOOR)
    worst = float(np.max(np.abs(a - b) / scale)) if n_levels else 0.0
    if worst >= CONVERGENCE_RTOL:
        raise NotConverged(f"{what}: doubling the basis moved the lowest {n_levels} levels by "
                           f"{worst:.2e} (relative)", worst=worst)


def eigenvalues_1d(V: PolynomialPotential, hbar: float, basis_size: int = 64,
                   n_levels: Optional[int] = None, dps: Optional[int] = None,
                   check: bool = True) -> np.ndarray:
    """Lowest eigenvalues of -hbar^2/2 d^2/dx^2 + V(x), sorted."""
    if V.dim != 1:
        raise ValidationError("eigenvalues_1d needs a one-dimensional potential")
    if basis_size < 16:
        raise ValidationError("basis_size must be >= 16")
    n_levels = basis_size // 4 if n_levels is None else n_levels
    E = _eig(_hamiltonian_1d(V, hbar, basis_size), dps)
    if check:
        E2 = _eig(_hamiltonian_1d(V, hbar, 2 * basis_size), dps)
        _check_converged(E, E2, n_levels, f"1d hbar={hbar}")
    return E[:n_levels]


def _hamiltonian_2d(V: PolynomialPotential, hbar: float, K: int) -> np.ndarray:
    om = V.mode_frequencies()
    m = K + V.degree + 2
    modes = [_mode_matrices(m, hbar, w, V.degree) for w in om]
    keep = [i * m + j for i in range(m) for j in range(m) if i + j <= K]
    eye = sparse.identity(m, format="csr")
    H = 0.5 * (sparse.kron(sparse.csr_matrix(modes[0][1]), eye)
               + sparse.kron(eye, sparse.csr_matrix(modes[1][1])))
    for (a, b), c in V.coeffs.items():
        H = H + c * sparse.kron(sparse.csr_matrix(modes[0][0][a]), sparse.csr_matrix(modes[1][0][b]))
    H = H.tocsr()[keep][:, keep].toarray()
    return (H + H.T) / 2


def eigenvalues_2d(V: PolynomialPotential, hbar: float, K: int = 20,
                   n_levels: Optional[int] = None, check: bool = True) -> np.ndarray:
    """Lowest eigenvalues in the tensor Hermite basis {|k| <= K}, sorted."""
    if V.dim != 2:
        raise ValidationError("eigenvalues_2d needs a two-dimensional potential")
    if n_levels is None:
        r = K // 3
        n_levels = (r + 1) * (r + 2) // 2
    E = np.linalg.eigvalsh(_hamiltonian_2d(V, hbar, K))
    if check:
        E2 = np.linalg.eigvalsh(_hamiltonian_2d(V, hbar, 2 * K))
        _check_converged(E, E2, n_levels, f"2d hbar={hbar}")
    return E[:n_levels]


@dataclass
class ScanReport:
    level: Tuple[int, ...]
    order: int
    hbar_grid: List[float]
    residuals: List[float]
    slope: float
    intercept: float
    status: str = field(default="FAIL")

    @property
    def passed(self) -> bool:
        return self.status in ("PASS", "NOISE_FLOOR")


def fit_slope(hbar_grid: Sequence[float], residuals: Sequence[float]) -> Tuple[float, float]:
    """Least-squares slope and intercept of log(residual) against log(hbar)."""
    if len(hbar_grid) < 3:
        raise ValidationError("need at least 3 grid points")
    x = np.log(np.asarray(hbar_grid, dtype=float))
    y = np.log(np.maximum(np.asarray(residuals, dtype=float), np.finfo(float).tiny))
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def hbar_scan(V: PolynomialPotential, prediction, k, J: int, hbar_grid: Sequence[float],
              basis_size: int = 64, K: int = 20, dps: Optional[int] = None) -> ScanReport:
    """Residuals between numeric eigenvalues and the order-J expansion for level k.

    ``prediction`` is a BNFData written in the same coordinates as V (kinetic
    energy p^2/2). The numeric level is matched by rank through psi.
    PASS requires a fitted slope >= J + 0.7; residuals all below the noise
    floor report NOISE_FLOOR, which also passes.
    """
    k = (k,) if isinstance(k, int) else tuple(k)
    grid = sorted((float(h) for h in hbar_grid), reverse=True)
    coeffs = [float(a) for a in eigenvalue_expansion(prediction, k, J)]
    table = psi_enumerate(prediction.omegas, _levels_needed(prediction, k))
    N = table.N_of(k)
    residuals = []
    for h in grid:
        if V.dim == 1:
            E = eigenvalues_1d(V, h, basis_size, n_levels=max(N, basis_size // 4), dps=dps)
        else:
            E = eigenvalues_2d(V, h, K, n_levels=max(N, 1))
        predicted = sum(a * h ** j for j, a in enumerate(coeffs))
        residuals.append(abs(float(E[N - 1]) - predicted))
    slope, intercept = fit_slope(grid, residuals)
    scale = max(1.0, max(abs(c) for c in coeffs))
    if max(residuals) < NOISE_FLOOR * scale:
        status = "NOISE_FLOOR"
    else:
        status = "PASS" if slope >= J + 0.7 else "FAIL"
    return ScanReport(k, J, grid, residuals, slope, intercept, status)


def _levels_needed(prediction, k) -> int:
    # grow the table until k shows up
    M = 1
    for kj in k:
        M *= kj + 1
    M = max(M, 1)
    while True:
        table = psi_enumerate(prediction.omegas, M)
        if table.N_of(k) is not None:
            return M
        M *= 2
