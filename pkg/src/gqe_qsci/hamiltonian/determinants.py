"""Slater determinants as alpha/beta occupation bitmasks.

Qubit map (fixed): qubit ``2p`` holds spin-up of spatial orbital ``p`` and
qubit ``2p + 1`` holds spin-down. A computational-basis index therefore
interleaves the two spin bitmasks.
"""

from __future__ import annotations

from itertools import combinations
from typing import NamedTuple

import numpy as np


class Determinant(NamedTuple):
    """Occupation bitmasks over spatial orbitals; bit ``p`` set = orbital ``p`` occupied."""

    alpha: int
    beta: int

    def spin_orbital_mask(self, n_orb: int) -> int:
        return interleave(self.alpha, self.beta, n_orb)

    @classmethod
    def from_index(cls, index: int, n_orb: int) -> "Determinant":
        return cls(*deinterleave(index, n_orb))

    def counts(self) -> tuple[int, int]:
        return (self.alpha.bit_count(), self.beta.bit_count())

    def hex(self) -> str:
        return f"{self.alpha:x} {self.beta:x}"


def interleave(alpha: int, beta: int, n_orb: int) -> int:
    mask = 0
    for p in range(n_orb):
        mask |= ((alpha >> p) & 1) << (2 * p)
        mask |= ((beta >> p) & 1) << (2 * p + 1)
    return mask


def deinterleave(mask: int, n_orb: int) -> tuple[int, int]:
    alpha = beta = 0
    for p in range(n_orb):
        alpha |= ((mask >> (2 * p)) & 1) << p
        beta |= ((mask >> (2 * p + 1)) & 1) << p
    return alpha, beta


def interleave_array(alpha: np.ndarray, beta: np.ndarray, n_orb: int) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=np.int64)
    beta = np.asarray(beta, dtype=np.int64)
    out = np.zeros(np.broadcast(alpha, beta).shape, dtype=np.int64)
    for p in range(n_orb):
        out |= ((alpha >> p) & 1) << (2 * p)
        out |= ((beta >> p) & 1) << (2 * p + 1)
    return out


def deinterleave_array(mask: np.ndarray, n_orb: int) -> tuple[np.ndarray, np.ndarray]:
    mask = np.asarray(mask, dtype=np.int64)
    alpha = np.zeros_like(mask)
    beta = np.zeros_like(mask)
    for p in range(n_orb):
        alpha |= ((mask >> (2 * p)) & 1) << p
        beta |= ((mask >> (2 * p + 1)) & 1) << p
    return alpha, beta


def in_sector_array(index: np.ndarray, n_orb: int, sector: tuple[int, int]) -> np.ndarray:
    """Boolean mask of computational-basis indices with the given (n_alpha, n_beta)."""
    alpha, beta = deinterleave_array(index, n_orb)
    return (np.bitwise_count(alpha) == sector[0]) & (np.bitwise_count(beta) == sector[1])


def strings(n_orb: int, n_elec: int) -> list[int]:
    """All single-spin occupation bitmasks with ``n_elec`` bits set, ascending."""
    out = [sum(1 << p for p in occ) for occ in combinations(range(n_orb), n_elec)]
    return sorted(out)


def sector_determinants(n_orb: int, n_alpha: int, n_beta: int) -> list[Determinant]:
    """Every determinant of the sector in canonical (alpha, beta) ascending order."""
    alphas = strings(n_orb, n_alpha)
    betas = strings(n_orb, n_beta)
    return [Determinant(a, b) for a in alphas for b in betas]


def hf_determinant(ints) -> Determinant:
    """Lowest ``n_alpha`` alpha and ``n_beta`` beta orbitals occupied."""
    return Determinant((1 << ints.n_alpha) - 1, (1 << ints.n_beta) - 1)


def occupation_label(det: Determinant, n_orb: int) -> str:
    """Spatial occupation pattern, e.g. ``'2ud0'`` for orbitals 0..3 (orbital 0 first)."""
    chars = []
    for p in range(n_orb):
        a, b = (det.alpha >> p) & 1, (det.beta >> p) & 1
        chars.append("2" if a and b else "u" if a else "d" if b else "0")
    return "".join(chars)
