from fractions import Fraction

import pytest

from oracles import brute_force_psi
from semibnf.bnf import BNFData
from semibnf.errors import DependentFrequencies, MultisetMismatch, ValidationError
from semibnf.scalars import ExactReal, align, parse_exact
from semibnf.spectrum import (SpectralDataset, eigenvalue_expansion, partition_identity_check, psi_enumerate,
                              spectrum_forward)

W2 = ["1", "sqrt(2)"]


def ex(*texts):
    return align([parse_exact(t) for t in texts])


def test_psi_d1():
    table = psi_enumerate(ex("1"), 100)
    assert [e.k for e in table.entries] == [(n,) for n in range(100)]


def test_psi_d2_example():
    table = psi_enumerate(ex(*W2), 7)
    assert [e.k for e in table.entries] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)]
    assert table.values == ex("0", "1", "sqrt(2)", "2", "1 + sqrt(2)", "2*sqrt(2)", "3")
    assert table.N_of((1, 1)) == 5 and table.k_of(6) == (0, 2)


@pytest.mark.parametrize("omegas", [W2, ["1", "sqrt(3)"], ["sqrt(2)", "sqrt(3)", "sqrt(5)"],
                                    ["1/2", "1/3*sqrt(7)"]])
def test_psi_against_box_sort(omegas):
    values = ex(*omegas)
    M = 60
    table = psi_enumerate(values, M)
    expected = brute_force_psi([float(w) for w in values], M, box=40)
    assert [e.k for e in table.entries] == expected


def test_psi_resonant_probe():
    with pytest.raises(DependentFrequencies):
        psi_enumerate(ex("1", "1"), 3)


def test_expansion_examples():
    b = BNFData(ex(*W2), 0, 0)
    a = eigenvalue_expansion(b, (0, 0), 3)
    assert a[1] == parse_exact("1/2 + 1/2*sqrt(2)")
    assert all(v.is_zero() for v in a[2:])
    q = BNFData([1], 0, 0, {(0, (2,)): Fraction(3, 20), (2, (0,)): Fraction(3, 80)})
    assert eigenvalue_expansion(q, (0,), 2)[2] == ExactReal.rational(Fraction(3, 40))
    shifted = BNFData([1], Fraction(7, 3), 0, q.coeffs)
    a0, a1 = eigenvalue_expansion(q, (2,), 2), eigenvalue_expansion(shifted, (2,), 2)
    assert a1[0] - a0[0] == ExactReal.rational(Fraction(7, 3)) and a1[1:] == a0[1:]


def test_forward_examples():
    ds = spectrum_forward(BNFData([1], 0, 0), 3, 2)
    assert ds.column(1) == [ExactReal.rational(Fraction(2 * n + 1, 2)) for n in range(3)]
    b = BNFData(ex(*W2), 0, 0, {(0, (1, 1)): 1})
    ds = spectrum_forward(b, 7, 2)
    mu1 = ds.column(1)[0]
    nus = [m - mu1 for m in ds.column(1)]
    assert nus == ex("0", "1", "sqrt(2)", "2", "1 + sqrt(2)", "2*sqrt(2)", "3")
    assert all(x < y for x, y in zip(ds.column(1), ds.column(1)[1:]))


def test_dataset_modes():
    ds = SpectralDataset(1, [[0.0, 0.5], [0.0, 1.5]])
    assert not ds.exact and ds.evaluate(2, 0.1) == pytest.approx(0.15)
    with pytest.raises(ValidationError):
        SpectralDataset(1, [[0.0, "1/2"]])
    with pytest.raises(ValidationError):
        SpectralDataset(2, [[0, 1]])


def test_partition_d1():
    report = partition_identity_check(ex("1"), 40, z_values=(1,))
    assert report.ok
    s = report.samples[0]
    assert s.difference <= s.tail_bound


def test_partition_d2_multiset():
    report = partition_identity_check(ex(*W2), 50)
    assert report.multiset_ok and report.ok


def test_partition_corrupted():
    b = BNFData(ex(*W2), 0, 0)
    ds = spectrum_forward(b, 20, 1)
    levels = [list(row) for row in ds.levels]
    levels[7][1] = levels[7][1] + ExactReal.rational(Fraction(1, 1000)).lift(levels[7][1].basis)
    bad = SpectralDataset(1, levels)
    with pytest.raises(MultisetMismatch):
        partition_identity_check(ex(*W2), 20, dataset=bad)


def test_partition_rejects_small_real_part():
    with pytest.raises(ValidationError):
        partition_identity_check(ex("1"), 10, z_values=(0.01,))
