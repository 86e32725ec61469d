from fractions import Fraction

import numpy as np
import pytest

from semibnf.bnf import BNFData, HamiltonianInput, bnf_of_hamiltonian
from semibnf.errors import ConfinementError, NotConverged, ValidationError
from semibnf.oracle import PolynomialPotential, eigenvalues_1d, eigenvalues_2d, fit_slope, hbar_scan
from semibnf.scalars import align, parse_exact
from semibnf.spectrum import psi_enumerate
from semibnf.weyl import FormalSymbol


def test_harmonic_exact():
    for omega in (1.0, 2.0):
        V = PolynomialPotential(1, {(2,): omega ** 2 / 2})
        E = eigenvalues_1d(V, 0.1, 64)
        assert np.allclose(E, 0.1 * omega * (np.arange(16) + 0.5), rtol=1e-12, atol=0)


def test_quartic_ground_state():
    V = PolynomialPotential(1, {(2,): 0.5, (4,): 0.1})
    E0 = eigenvalues_1d(V, 0.1)[0]
    assert abs(E0 - (0.05 + 0.01 * 0.15 / 2)) < 1e-4


def test_confinement():
    with pytest.raises(ConfinementError):
        PolynomialPotential(1, {(4,): -1.0})
    with pytest.raises(ConfinementError):
        PolynomialPotential(2, {(2, 0): 0.5})
    with pytest.raises(ValidationError):
        eigenvalues_1d(PolynomialPotential(1, {(2,): 0.5}), 0.1, basis_size=8)


def test_variational_monotonicity():
    V = PolynomialPotential(1, {(2,): 0.5, (4,): 0.3, (3,): 0.1})
    small = eigenvalues_1d(V, 0.2, 24, n_levels=6, check=False)
    large = eigenvalues_1d(V, 0.2, 48, n_levels=6, check=False)
    assert np.all(large <= small + 1e-12)


def test_not_converged():
    V = PolynomialPotential(1, {(2,): 0.5, (4,): 5.0})
    with pytest.raises(NotConverged):
        eigenvalues_1d(V, 1.0, 16, n_levels=8)


def test_2d_resonant_and_separable():
    V = PolynomialPotential(2, {(2, 0): 0.5, (0, 2): 0.5})
    E = eigenvalues_2d(V, 0.1, K=12)
    expected = sorted(0.1 * (N + 1) for N in range(5) for _ in range(N + 1))
    assert np.allclose(E, expected, rtol=1e-12)
    V = PolynomialPotential(2, {(2, 0): 0.5, (0, 2): 1.0})
    E = eigenvalues_2d(V, 0.1, K=12, n_levels=10)
    psi = psi_enumerate(align([parse_exact("1"), parse_exact("sqrt(2)")]), 10)
    pred = [0.1 * (k[0] + 0.5) + 0.1 * 2 ** 0.5 * (k[1] + 0.5) for k in (e.k for e in psi.entries)]
    assert np.allclose(E, pred, rtol=1e-12)


def test_2d_coupled_against_normal_form():
    lam = Fraction(1, 20)
    D = 4
    x1, x2 = FormalSymbol.x(0, 2, D), FormalSymbol.x(1, 2, D)
    # V = x1^2/2 + x2^2 + lam x1^2 x2^2; rescale x2 -> x2 / 2^(1/4) for unit mass
    # unit-mass coordinates: x2 -> x2 / 2^(1/4) turns lam x1^2 x2^2 into (lam/sqrt(2)) x1^2 x2^2
    pert = (x1 * x1 * x2 * x2).scale(parse_exact(f"{lam}*sqrt(2)").to_surd() / 2)
    H = HamiltonianInput.from_perturbation(["1", "sqrt(2)"], pert)
    b = bnf_of_hamiltonian(H)
    V = PolynomialPotential(2, {(2, 0): 0.5, (0, 2): 1.0, (2, 2): float(lam)})
    report = hbar_scan(V, b, (1, 0), 2, [0.1, 0.05, 0.025])
    assert report.passed and report.slope >= 2.7


def test_noise_floor():
    V = PolynomialPotential(1, {(2,): 0.5})
    b = BNFData([1], 0, 0)
    r = hbar_scan(V, b, 2, 2, [0.2, 0.1, 0.05])
    assert r.status == "NOISE_FLOOR" and r.passed


def test_fit_slope():
    h = [0.2, 0.1, 0.05]
    s, c = fit_slope(h, [3 * x ** 3 for x in h])
    assert s == pytest.approx(3) and np.exp(c) == pytest.approx(3)
    with pytest.raises(ValidationError):
        fit_slope([0.1, 0.05], [1, 2])


def test_extended_precision_path():
    V = PolynomialPotential(1, {(2,): 0.5, (4,): 0.1})
    a = eigenvalues_1d(V, 0.05, 16, n_levels=3, check=False)
    b = eigenvalues_1d(V, 0.05, 16, n_levels=3, dps=30, check=False)
    assert np.allclose(a, b, rtol=1e-13)
