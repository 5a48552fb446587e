"""Exact ground state within a fixed (n_alpha, n_beta) sector."""

from __future__ import annotations

from math import comb

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh

from ..wavefunction import SampledWavefunction
from .determinants import Determinant, hf_determinant, sector_determinants
from .integrals import MolecularIntegrals
from .slater_condon import hamiltonian_matrix, slater_condon

DENSE_LIMIT = 2000
DEFAULT_SECTOR_CAP = 1_000_000
DEGENERACY_TOL = 1e-10


class SectorTooLargeError(ValueError):
    """The requested sector exceeds the configured determinant cap."""


def lowest_eigenpair(matrix, reference: int | None = None) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a real symmetric matrix with a deterministic vector.

    Dense ``eigh`` is used up to :data:`DENSE_LIMIT`; beyond that ARPACK
    Lanczos. If the lowest level is degenerate the returned vector is the
    normalized projection of basis vector ``reference`` onto that eigenspace
    (falling back to the first eigenvector). The sign is fixed so that the
    reference component, or else the largest component, is non-negative.
    """
    dim = matrix.shape[0]
    if dim == 0:
        raise ValueError("empty matrix")
    if dim <= DENSE_LIMIT:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
        if dim == 1:
            return float(dense[0, 0]), np.ones(1)
        n_ev = min(dim, 8)
        vals, vecs = eigh(dense, subset_by_index=[0, n_ev - 1])
    else:
        k = 6
        vals, vecs = eigsh(sp.csr_matrix(matrix), k=k, which="SA", tol=1e-12)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    e0 = float(vals[0])
    block = vecs[:, np.abs(vals - e0) < DEGENERACY_TOL * max(1.0, abs(e0))]
    vec = block[:, 0]
    if block.shape[1] > 1 and reference is not None:
        proj = block @ block[reference]
        norm = np.linalg.norm(proj)
        if norm > 1e-8:
            vec = proj / norm
    vec = vec / np.linalg.norm(vec)
    pivot = reference if reference is not None and abs(vec[reference]) > 1e-12 else int(np.argmax(np.abs(vec)))
    if vec[pivot] < 0:
        vec = -vec
    return e0, vec


def fci_ground_state(
    ints: MolecularIntegrals, max_determinants: int = DEFAULT_SECTOR_CAP
) -> tuple[float, SampledWavefunction]:
    dim_a = comb(ints.n_orb, ints.n_alpha)
    dim_b = comb(ints.n_orb, ints.n_beta)
    if dim_a * dim_b > max_determinants:
        raise SectorTooLargeError(f"sector has {dim_a * dim_b} determinants (cap {max_determinants})")
    dets = sector_determinants(ints.n_orb, ints.n_alpha, ints.n_beta)
    h = hamiltonian_matrix(dets, ints)
    hf = hf_determinant(ints)
    e0, vec = lowest_eigenpair(h, reference=dets.index(hf))
    return e0, SampledWavefunction(tuple(dets), vec, e0)


def hf_energy(ints: MolecularIntegrals) -> float:
    hf = hf_determinant(ints)
    return slater_condon(hf, hf, ints)


__all__ = [
    "Determinant",
    "SectorTooLargeError",
    "fci_ground_state",
    "hf_energy",
    "lowest_eigenpair",
]
