"""Determinant selection, symmetry completion and subspace diagonalization."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .hamiltonian.determinants import Determinant, deinterleave_array, hf_determinant
from .hamiltonian.fci import lowest_eigenpair
from .hamiltonian.integrals import MolecularIntegrals
from .hamiltonian.slater_condon import hamiltonian_matrix
from .simulator import ShotHistogram, Statevector, sample
from .wavefunction import SampledWavefunction

__all__ = [
    "DeterminantSet",
    "EmptySubspaceError",
    "SampledWavefunction",
    "diagonalize_subspace",
    "qsci_energy",
    "qsci_from_histogram",
    "select_determinants",
    "symmetry_complete",
    "truncate",
]


class EmptySubspaceError(ValueError):
    """No determinant of the target sector is available to diagonalize."""


@dataclass(frozen=True)
class DeterminantSet:
    """Unique determinants of one sector, each with a selection weight (shot count)."""

    determinants: tuple[Determinant, ...] = ()
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        dets = tuple(Determinant(*d) for d in self.determinants)
        if len(dets) != len(self.weights):
            raise ValueError("one weight per determinant required")
        if len(set(dets)) != len(dets):
            raise ValueError("duplicate determinants")
        if len({d.counts() for d in dets}) > 1:
            raise ValueError("determinants span more than one sector")
        object.__setattr__(self, "determinants", dets)
        object.__setattr__(self, "weights", tuple(self.weights))

    @classmethod
    def from_mapping(cls, weights: Mapping[Determinant, float]) -> "DeterminantSet":
        ordered = sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls(tuple(d for d, _ in ordered), tuple(w for _, w in ordered))

    def as_dict(self) -> dict[Determinant, float]:
        return dict(zip(self.determinants, self.weights))

    def __len__(self) -> int:
        return len(self.determinants)

    def __iter__(self):
        return iter(self.determinants)

    def __contains__(self, det) -> bool:
        return Determinant(*det) in set(self.determinants)


def select_determinants(hist: ShotHistogram, sector: tuple[int, int], n_orb: int) -> DeterminantSet:
    """Keep outcomes in the ``(n_alpha, n_beta)`` sector, ordered by descending count."""
    if not hist.counts:
        return DeterminantSet()
    idx = np.fromiter(hist.counts.keys(), dtype=np.int64, count=len(hist.counts))
    alpha, beta = deinterleave_array(idx, n_orb)
    keep = (np.bitwise_count(alpha) == sector[0]) & (np.bitwise_count(beta) == sector[1])
    counts = {
        Determinant(int(a), int(b)): hist.counts[int(i)]
        for i, a, b in zip(idx[keep], alpha[keep], beta[keep])
    }
    return DeterminantSet.from_mapping(counts)


def completion_class(det: Determinant) -> list[Determinant]:
    """All determinants sharing ``det``'s doubly occupied, open-shell and empty orbitals
    and its number of open-shell alpha electrons."""
    doubly = det.alpha & det.beta
    open_shell = det.alpha ^ det.beta
    n_open_alpha = (det.alpha & open_shell).bit_count()
    orbitals = [p for p in range(open_shell.bit_length()) if (open_shell >> p) & 1]
    out = []
    for chosen in combinations(orbitals, n_open_alpha):
        up = sum(1 << p for p in chosen)
        out.append(Determinant(doubly | up, doubly | (open_shell & ~up)))
    return out


def symmetry_complete(dets: DeterminantSet) -> DeterminantSet:
    """Close the set under alpha/beta permutations on open-shell orbitals.

    Sampled determinants keep their own weight; a partner that was not sampled
    takes the largest weight among the sampled members of its class.
    """
    weights = dets.as_dict()
    added: dict[Determinant, float] = {}
    for det, w in weights.items():
        for partner in completion_class(det):
            if partner in weights:
                continue
            if w > added.get(partner, -np.inf):
                added[partner] = w
    weights.update(added)
    return DeterminantSet.from_mapping(weights)


def truncate(dets: DeterminantSet, d_max: int) -> DeterminantSet:
    """Top ``d_max`` by weight; ties go to the smaller ``(alpha, beta)``."""
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    ordered = sorted(dets.as_dict().items(), key=lambda kv: (-kv[1], kv[0]))[:d_max]
    return DeterminantSet(tuple(d for d, _ in ordered), tuple(w for _, w in ordered))


def diagonalize_subspace(
    dets: DeterminantSet | Iterable[Determinant], ints: MolecularIntegrals
) -> SampledWavefunction:
    """Lowest eigenpair of the Hamiltonian projected onto the determinant span."""
    dets = tuple(dets.determinants if isinstance(dets, DeterminantSet) else (Determinant(*d) for d in dets))
    if not dets:
        raise EmptySubspaceError("cannot diagonalize an empty determinant set")
    h = hamiltonian_matrix(dets, ints)
    hf = hf_determinant(ints)
    reference = dets.index(hf) if hf in dets else None
    energy, vec = lowest_eigenpair(h, reference=reference)
    return SampledWavefunction(dets, vec, energy)


def qsci_from_histogram(hist: ShotHistogram, d_max: int, ints: MolecularIntegrals) -> SampledWavefunction:
    """Select -> symmetry-complete -> truncate -> diagonalize for a measured histogram."""
    selected = select_determinants(hist, ints.sector, ints.n_orb)
    if not len(selected):
        raise EmptySubspaceError("no sampled bitstring lies in the target sector")
    return diagonalize_subspace(truncate(symmetry_complete(selected), d_max), ints)


def qsci_energy(
    state: Statevector,
    n_shots: int,
    d_max: int,
    ints: MolecularIntegrals,
    rng: np.random.Generator,
) -> SampledWavefunction:
    return qsci_from_histogram(sample(state, n_shots, rng), d_max, ints)
