"""Generative circuit design for quantum-selected configuration interaction."""

from .estimators import GQEOptimizer, QSCISolver, RandomCircuitSearch
from .hamiltonian import fci_ground_state, jordan_wigner, load_fcidump
from .pool import OperatorPool, build_pool, mp2_amplitudes, parse_amplitudes
from .qsci import qsci_from_histogram
from .refine import refine

__all__ = [
    "GQEOptimizer",
    "OperatorPool",
    "QSCISolver",
    "RandomCircuitSearch",
    "build_pool",
    "fci_ground_state",
    "jordan_wigner",
    "load_fcidump",
    "mp2_amplitudes",
    "parse_amplitudes",
    "qsci_from_histogram",
    "refine",
]
