"""Merging sparse wavefunctions by a small generalized eigenproblem.

Given states ``|psi_j>`` on determinant supports, the lowest Ritz vector of
``H c = E S c`` in their span defines a mixed expansion; its ``d_max``
heaviest determinants are then rediagonalized exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hamiltonian.determinants import Determinant
from .hamiltonian.integrals import MolecularIntegrals
from .hamiltonian.slater_condon import SectorMismatchError, hamiltonian_matrix
from .qsci import diagonalize_subspace
from .wavefunction import SampledWavefunction

OVERLAP_TOL = 1e-10


def _union_coefficients(inputs: Sequence[SampledWavefunction]) -> tuple[list[Determinant], np.ndarray]:
    support = sorted(set().union(*(w.determinants for w in inputs)))
    pos = {d: i for i, d in enumerate(support)}
    coeffs = np.zeros((len(support), len(inputs)))
    for j, w in enumerate(inputs):
        idx = [pos[d] for d in w.determinants]
        coeffs[idx, j] = w.coefficients / np.linalg.norm(w.coefficients)
    return support, coeffs


def mixed_state(
    inputs: Sequence[SampledWavefunction], ints: MolecularIntegrals
) -> tuple[float, list[Determinant], np.ndarray]:
    """Lowest Ritz pair in the span of ``inputs``: energy, union support, mixed coefficients."""
    if not inputs:
        raise ValueError("refinement needs at least one wavefunction")
    sectors = {w.sector() for w in inputs}
    if len(sectors) != 1 or None in sectors:
        raise SectorMismatchError("refinement inputs must be non-empty and share one sector")
    support, a = _union_coefficients(inputs)
    h_union = hamiltonian_matrix(support, ints)
    ha = h_union @ a
    h = a.T @ ha
    s = a.T @ a
    h = 0.5 * (h + h.T)
    s = 0.5 * (s + s.T)
    # canonical orthogonalization: project onto the well-conditioned part of S
    s_vals, s_vecs = np.linalg.eigh(s)
    keep = s_vals > OVERLAP_TOL
    if not np.any(keep):
        raise FloatingPointError("overlap matrix has numerical rank zero")
    x = s_vecs[:, keep] / np.sqrt(s_vals[keep])
    e_vals, e_vecs = np.linalg.eigh(x.T @ h @ x)
    c = x @ e_vecs[:, 0]
    return float(e_vals[0]), support, a @ c


def refine(inputs: Sequence[SampledWavefunction], d_max: int, ints: MolecularIntegrals) -> SampledWavefunction:
    """Mix ``inputs``, keep the ``d_max`` largest ``|A_x|^2`` and rediagonalize on that set.

    Weight ties at the cut go to the smaller ``(alpha, beta)`` determinant.
    """
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    _, support, mixed = mixed_state(inputs, ints)
    weight = mixed**2
    order = sorted(range(len(support)), key=lambda i: (-weight[i], support[i]))[:d_max]
    kept = sorted(support[i] for i in order)
    return diagonalize_subspace(kept, ints)


def local_refine(batch: Sequence[SampledWavefunction], d_max: int, ints: MolecularIntegrals) -> SampledWavefunction:
    """Combine the states of one batch into a single local estimate."""
    return refine(list(batch), d_max, ints)


@dataclass
class RefinementState:
    """Running global wavefunction and the per-iteration ``(E_local, E_global)`` history."""

    current: SampledWavefunction | None = None
    iteration: int = 0
    history: list[tuple[float, float, int, int]] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iter", "E_local", "E_global", "support_local", "support_global"])
        for i, (el, eg, sl, sg) in enumerate(self.history, start=1):
            writer.writerow([i, repr(el), repr(eg), sl, sg])
        return buf.getvalue()


def global_refine(
    state: RefinementState, local: SampledWavefunction, d_max: int, ints: MolecularIntegrals
) -> RefinementState:
    """Fold a new local estimate into the running global one (first call adopts it)."""
    if state.current is None:
        merged = local
    else:
        if state.current.sector() != local.sector():
            raise SectorMismatchError("global and local wavefunctions lie in different sectors")
        merged = refine([state.current, local], d_max, ints)
    history = state.history + [(local.energy, merged.energy, len(local), len(merged))]
    return RefinementState(merged, state.iteration + 1, history)
