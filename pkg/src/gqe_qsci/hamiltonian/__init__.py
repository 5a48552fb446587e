"""Integrals, determinants, Pauli Hamiltonians and exact references."""

from .determinants import Determinant, hf_determinant, sector_determinants
from .fci import SectorTooLargeError, fci_ground_state, hf_energy, lowest_eigenpair
from .integrals import (
    FCIDumpError,
    MolecularIntegrals,
    format_fcidump,
    load_fcidump,
    parse_fcidump,
    random_integrals,
)
from .jordan_wigner import jordan_wigner
from .pauli import PauliHamiltonian, PauliString
from .slater_condon import SectorMismatchError, hamiltonian_matrix, slater_condon

__all__ = [
    "Determinant",
    "FCIDumpError",
    "MolecularIntegrals",
    "PauliHamiltonian",
    "PauliString",
    "SectorMismatchError",
    "SectorTooLargeError",
    "fci_ground_state",
    "format_fcidump",
    "hamiltonian_matrix",
    "hf_determinant",
    "hf_energy",
    "jordan_wigner",
    "load_fcidump",
    "lowest_eigenpair",
    "parse_fcidump",
    "random_integrals",
    "sector_determinants",
    "slater_condon",
]
