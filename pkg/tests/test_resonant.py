import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_real_symbol
from oracles import weyl_operator
from semibnf.errors import NotBlockDiagonal, NotCommuting
from semibnf.resonant import (WICK_KAPPA, cluster_basis, cluster_charpoly, cluster_spectrum, fock_matrix,
                              fock_matrix_full, resonant_average, resonant_harmonic, weyl_to_wick)
from semibnf.scalars import Surd
from semibnf.weyl import ComplexSymbol, FormalSymbol, poisson, to_complex

HALF = Fraction(1, 2)


def wick_terms(c):
    return weyl_to_wick(c).terms


def test_kappa_calibration():
    # Op(z zbar / 2) = hbar a^dag a + hbar/2 pins the ordering constant
    assert WICK_KAPPA == 1
    L = wick_terms(ComplexSymbol(1, 4, {(0, (1,), (1,)): HALF}))
    assert L == {((1,), (1,)): {2: Surd(1)}, ((0,), (0,)): {2: Surd(HALF)}}


def test_wick_examples():
    L = wick_terms(ComplexSymbol(1, 4, {(0, (1,), (0,)): 1}))
    assert L == {((0,), (1,)): {1: Surd.sqrt(2)}}
    L = wick_terms(ComplexSymbol(1, 4, {(0, (2,), (2,)): Fraction(1, 4)}))
    assert L == {((2,), (2,)): {4: Surd(1)}, ((1,), (1,)): {4: Surd(2)}, ((0,), (0,)): {4: Surd(HALF)}}


@pytest.mark.parametrize("seed,d", [(0, 1), (1, 1), (2, 2), (3, 2)])
def test_fock_matrix_against_symmetric_ordering(seed, d):
    rng = random.Random(seed)
    f = random_real_symbol(rng, d, 6, n_terms=5)
    hbar = 0.3
    n = 6
    n_max = n - 1 if d == 1 else 4
    block = fock_matrix_full(weyl_to_wick(to_complex(f)), n_max)
    got = block.evaluate(hbar)
    ref = weyl_operator(f, n, hbar)
    idx = [sum(kk * n ** (d - 1 - i) for i, kk in enumerate(k)) for k in block.basis]
    assert np.allclose(got, ref[np.ix_(idx, idx)], atol=1e-12)


def test_hermitian_and_number_conserving():
    rng = random.Random(5)
    f = resonant_average(random_real_symbol(rng, 2, 6, n_terms=6))
    L = weyl_to_wick(to_complex(f))
    assert L.is_hermitian() and L.is_number_conserving()
    block = fock_matrix(L, 3)
    assert block.is_hermitian()


def test_block_diagonal_guard():
    x = FormalSymbol.x(0, 1, 4)
    with pytest.raises(NotBlockDiagonal):
        fock_matrix(weyl_to_wick(to_complex(x)), 1)
    with pytest.raises(NotCommuting):
        cluster_spectrum(resonant_harmonic(2, 4) + FormalSymbol.x(0, 2, 4) ** 4, 1, 0.1)


def test_fock_examples():
    sigma = weyl_to_wick(to_complex(resonant_harmonic(2, 4)))
    for N in range(4):
        M = fock_matrix(sigma, N).evaluate(0.1)
        assert np.allclose(M, 0.1 * (N + 1) * np.eye(N + 1))
    I = weyl_to_wick(to_complex(FormalSymbol.action(0, 1, 4)))
    assert fock_matrix(I, 3).evaluate_exact(Fraction(1)) == [[Surd(Fraction(7, 2))]]
    I1 = FormalSymbol.action(0, 2, 4)
    block = fock_matrix(weyl_to_wick(to_complex(I1 * I1)), 1)
    assert cluster_basis(2, 1) == [(1, 0), (0, 1)]
    assert block.evaluate_exact(Fraction(1)) == [[Surd(Fraction(10, 4)), Surd(0)], [Surd(0), Surd(HALF)]]


def test_cluster_examples():
    B = resonant_harmonic(2, 4)
    cs = cluster_spectrum(B, 4, 0.1)
    assert np.allclose(cs.eigenvalues, [0.5] * 5)
    I1 = FormalSymbol.action(0, 2, 4)
    B = resonant_harmonic(2, 4) + I1 * I1
    cs = cluster_spectrum(B, 1, 0.1)
    assert cs.eigenvalues == pytest.approx([0.205, 0.225], abs=1e-15)
    assert cluster_charpoly(B, 1, Fraction(1, 10)) == [Surd(Fraction(41, 200) * Fraction(45, 200)),
                                                      Surd(-Fraction(43, 100)), Surd(1)]
    for N in range(7):
        assert cluster_spectrum(B, N, 0.1).dimension == N + 1


def test_width_scaling():
    I1 = FormalSymbol.action(0, 2, 4)
    B = resonant_harmonic(2, 4) + I1 * I1
    widths = [cluster_spectrum(B, 3, h).width for h in (0.1, 0.05, 0.025)]
    assert widths[0] / widths[1] == pytest.approx(4, rel=1e-9)
    assert widths[1] / widths[2] == pytest.approx(4, rel=1e-9)


def test_extended_precision_agrees():
    rng = random.Random(8)
    B = resonant_harmonic(2, 6) + resonant_average(random_real_symbol(rng, 2, 6, n_terms=5, min_grade=4))
    a = cluster_spectrum(B, 3, 0.05).eigenvalues
    b = cluster_spectrum(B, 3, 0.05, digits=40).eigenvalues
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


def test_average_commutes_with_sigma():
    rng = random.Random(2)
    f = random_real_symbol(rng, 2, 6, n_terms=8)
    avg = resonant_average(f)
    assert not poisson(resonant_harmonic(2, 6), avg)
    assert resonant_average(avg) == avg
