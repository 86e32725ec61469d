import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from semibnf.bnf import BNFData, bnf_of_hamiltonian, HamiltonianInput
from semibnf.cli import random_bnf
from semibnf.errors import (AmbiguousTail, EmptyInput, InconsistentE0, InsufficientLevels, MultisetMismatch,
                            ValidationError)
from semibnf.inverse import (ApproximateBNF, ClusterPolynomial, extract_E0_E1, invert_spectrum, recover_c,
                             recover_Pj, sieve_omegas, simplex_lattice)
from semibnf.scalars import ExactReal, align, parse_exact
from semibnf.spectrum import SpectralDataset, psi_enumerate, spectrum_forward
from semibnf.weyl import FormalSymbol


def ex(*texts):
    return align([parse_exact(t) for t in texts])


def mu_list(omegas, M, E1=0):
    b = BNFData(ex(*omegas), 0, E1)
    return spectrum_forward(b, M, 1).column(1)


def test_sieve_examples():
    state = sieve_omegas(mu_list(["1", "sqrt(2)"], 20))
    assert state.discovered == ex("1", "sqrt(2)") and state.dim == 2
    state = sieve_omegas(mu_list(["sqrt(5)"], 10), d=1)
    assert state.discovered == ex("sqrt(5)")
    state = sieve_omegas(mu_list(["1", "sqrt(2)", "sqrt(3)"], 300, E1=Fraction(1, 3)))
    assert state.discovered == ex("1", "sqrt(2)", "sqrt(3)")


def test_sieve_errors():
    with pytest.raises(EmptyInput):
        sieve_omegas([])
    with pytest.raises(ValidationError):
        sieve_omegas(ex("1", "1/2"))
    # too few levels to certify that no third frequency hides past nu_M
    with pytest.raises(AmbiguousTail):
        sieve_omegas(mu_list(["1", "sqrt(2)"], 4))
    with pytest.raises(AmbiguousTail):
        sieve_omegas(mu_list(["1", "sqrt(2)"], 30), d=3)


def test_sieve_float_mode():
    mu = [float(m) for m in mu_list(["1", "sqrt(2)"], 40)]
    state = sieve_omegas(mu)
    assert state.dim == 2 and state.discovered[1] == pytest.approx(2 ** 0.5)


@st.composite
def frequency_tuples(draw):
    d = draw(st.integers(1, 3))
    radicands = draw(st.permutations([1, 2, 3, 5, 6, 7]))[:d]
    scales = [draw(st.fractions(min_value=Fraction(1, 2), max_value=3, max_denominator=4)) for _ in range(d)]
    values = [parse_exact(f"{s.numerator}/{s.denominator}*sqrt({r})") for s, r in zip(scales, radicands)]
    values = align(values)
    return sorted(values)


@settings(max_examples=15, deadline=None)
@given(frequency_tuples())
def test_sieve_recovers_generators(omegas):
    b = BNFData(omegas, 0, 0)
    mu = spectrum_forward(b, 150, 1).column(1)
    try:
        state = sieve_omegas(mu)
    except AmbiguousTail:
        return  # honest refusal: 150 levels do not cover 2*omega_max
    assert state.discovered == list(omegas)


@pytest.mark.parametrize("d,j", [(1, 4), (2, 3), (2, 6), (3, 4)])
def test_simplex_interpolation_unisolvent(d, j):
    rng = random.Random(d * 10 + j)
    omegas = ex(*["1", "sqrt(2)", "sqrt(3)"][:d])
    psi = psi_enumerate(omegas, 400)
    target = {beta: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for beta in simplex_lattice(d, j)}

    def value(k):
        total = Fraction(0)
        for beta, c in target.items():
            term = c
            for kk, b in zip(k, beta):
                term *= kk ** b
            total += term
        return total

    zero = ExactReal.zero(omegas[0].basis)
    levels = []
    for e in psi.entries:
        row = [zero] * (j + 1)
        row[1] = e.value
        row[j] = ExactReal.rational(value(e.k)).lift(zero.basis)
        levels.append(row)
    P = recover_Pj(SpectralDataset(j, levels), psi, j)
    assert {b: c.rational_value() for b, c in P.coeffs.items()} == {b: c for b, c in target.items() if c}


def test_recover_examples():
    levels = [[0, Fraction(2 * n + 1, 2), v] for n, v in enumerate([1, 2, 5])]
    ds = SpectralDataset(2, levels)
    P = recover_Pj(ds, psi_enumerate(ex("1"), 3), 2)
    assert [P((z,)) for z in range(5)] == [Fraction(z * z + 1) for z in range(5)]
    b = recover_c([P], ex("1"), ExactReal.zero(), ExactReal.zero())
    assert b.coeffs == {(0, (2,)): ExactReal.rational(1), (1, (1,)): ExactReal.rational(-1),
                        (2, (0,)): ExactReal.rational(Fraction(5, 4))}
    with pytest.raises(InsufficientLevels):
        recover_Pj(SpectralDataset(2, levels[:2]), psi_enumerate(ex("1"), 2), 2)


def test_extract_first_order():
    b = BNFData(ex("1"), 2, 0)
    ds = spectrum_forward(b, 5, 2)
    first = extract_E0_E1(ds)
    assert first.E0 == ExactReal.rational(2)
    levels = [list(r) for r in ds.levels]
    levels[4][0] = ExactReal.rational(3)
    with pytest.raises(InconsistentE0):
        extract_E0_E1(SpectralDataset(2, levels))


def test_quartic_round_trip():
    x = FormalSymbol.x(0, 1, 4)
    b = bnf_of_hamiltonian(HamiltonianInput.from_perturbation([1], (x ** 4).scale(Fraction(1, 10))))
    back = invert_spectrum(spectrum_forward(b, 10, 2))
    assert back.coeffs == {(0, (2,)): ExactReal.rational(Fraction(3, 20)),
                           (2, (0,)): ExactReal.rational(Fraction(3, 80))}
    assert back.E1.is_zero()


def test_pure_oscillator_inverse():
    b = BNFData(ex("1", "sqrt(3)"), 0, 0)
    back = invert_spectrum(spectrum_forward(b, 40, 2))
    assert back.coeffs == {} and back.omegas == ex("1", "sqrt(3)")


@pytest.mark.parametrize("seed", range(3))
def test_random_round_trip(seed):
    b = random_bnf(random.Random(seed))
    ds = spectrum_forward(b, 60, 4)
    back = invert_spectrum(ds)
    assert back == b
    assert spectrum_forward(back, 60, 4).levels == ds.levels


def test_approximate_mode():
    b = BNFData(ex("1", "sqrt(2)"), 0, Fraction(1, 4), {(0, (2, 0)): Fraction(1, 5), (1, (0, 1)): Fraction(-1, 3)})
    ds = spectrum_forward(b, 40, 2)
    approx = SpectralDataset(2, [[float(v) for v in row] for row in ds.levels])
    back = invert_spectrum(approx)
    assert isinstance(back, ApproximateBNF)
    assert back.coeffs[(0, (2, 0))] == pytest.approx(0.2, abs=1e-9)
    assert back.coeffs[(1, (0, 1))] == pytest.approx(-1 / 3, abs=1e-9)
    assert back.E1 == pytest.approx(0.25, abs=1e-9)


def test_inconsistent_first_order():
    b = BNFData(ex("1", "sqrt(2)"), 0, 0)
    ds = spectrum_forward(b, 40, 2)
    levels = [list(r) for r in ds.levels]
    levels[30][1] = levels[30][1] + ExactReal.rational(Fraction(1, 7)).lift(levels[30][1].basis)
    with pytest.raises((MultisetMismatch, ValidationError)):
        invert_spectrum(SpectralDataset(2, levels))
