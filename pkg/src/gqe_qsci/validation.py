"""Argument checks shared by the estimator layer and the harness."""

from __future__ import annotations

import numbers

import numpy as np

from .hamiltonian.integrals import MolecularIntegrals
from .rng import as_generator


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_integrals(ints) -> MolecularIntegrals:
    if not isinstance(ints, MolecularIntegrals):
        raise TypeError(f"expected MolecularIntegrals, got {type(ints).__name__}")
    if not (0 <= ints.n_alpha <= ints.n_orb and 0 <= ints.n_beta <= ints.n_orb):
        raise ValueError("electron counts exceed the orbital count")
    return ints


def check_random_state(seed) -> np.random.Generator:
    """``None``, an integer seed or a ``Generator`` mapped to a ``Generator``."""
    if seed is not None and not isinstance(seed, (numbers.Integral, np.random.Generator)):
        raise TypeError(f"cannot build a random stream from {type(seed).__name__}")
    return as_generator(seed)


def check_is_fitted(estimator, attribute: str) -> None:
    if not hasattr(estimator, attribute):
        raise RuntimeError(f"{type(estimator).__name__} is not fitted; call fit first")
