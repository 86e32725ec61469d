"""Exact Birkhoff normal forms of Weyl symbols and the maps to and from eigenvalue expansions."""

from .bnf import BNFData, HamiltonianInput, bnf_of_hamiltonian, normalize, replay
from .errors import BNFError, NumericError, ValidationError
from .inverse import invert_spectrum, sieve_omegas
from .oracle import PolynomialPotential, eigenvalues_1d, eigenvalues_2d, hbar_scan
from .resonant import cluster_spectrum, resonant_average
from .scalars import ExactReal, Surd, compare, format_exact, parse_exact
from .spectrum import SpectralDataset, partition_identity_check, psi_enumerate, spectrum_forward
from .weyl import ComplexSymbol, FormalSymbol, moyal_star, poisson

__all__ = [
    "BNFData", "BNFError", "ComplexSymbol", "ExactReal", "FormalSymbol", "HamiltonianInput",
    "NumericError", "PolynomialPotential", "SpectralDataset", "Surd", "ValidationError",
    "bnf_of_hamiltonian", "cluster_spectrum", "compare", "eigenvalues_1d", "eigenvalues_2d",
    "format_exact", "hbar_scan", "invert_spectrum", "moyal_star", "normalize", "parse_exact",
    "partition_identity_check", "poisson", "psi_enumerate", "replay", "resonant_average",
    "sieve_omegas", "spectrum_forward",
]
