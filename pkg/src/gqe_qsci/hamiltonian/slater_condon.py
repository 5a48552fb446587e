"""Slater-Condon matrix elements between determinants.

Fermionic signs use ascending spin-orbital order on the interleaved qubit map,
which is the ordering implied by the Jordan-Wigner parity strings.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .determinants import Determinant, interleave, interleave_array
from .integrals import MolecularIntegrals


class SectorMismatchError(ValueError):
    """Determinants belong to different (n_alpha, n_beta) sectors."""


def spin_orbital_tensors(ints: MolecularIntegrals) -> tuple[np.ndarray, np.ndarray]:
    """Spin-orbital one-body matrix and antisymmetrized ``<PQ||RS>`` tensor."""
    cached = getattr(ints, "_so_cache", None)
    if cached is not None:
        return cached
    n = ints.n_orb
    nso = 2 * n
    spin = np.arange(nso) % 2
    spatial = np.arange(nso) // 2
    same = spin[:, None] == spin[None, :]
    h1s = np.where(same, ints.h1[np.ix_(spatial, spatial)], 0.0)
    # <PQ|RS> = (pr|qs) delta(sP, sR) delta(sQ, sS)
    g = ints.h2[np.ix_(spatial, spatial, spatial, spatial)].transpose(0, 2, 1, 3)
    g = g * same[:, None, :, None] * same[None, :, None, :]
    anti = g - g.transpose(0, 1, 3, 2)
    h1s.setflags(write=False)
    anti.setflags(write=False)
    object.__setattr__(ints, "_so_cache", (h1s, anti))
    return h1s, anti


def _ladder_sign(mask: int, k: int) -> int:
    return -1 if (mask & ((1 << k) - 1)).bit_count() & 1 else 1


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def slater_condon(x: Determinant, y: Determinant, ints: MolecularIntegrals) -> float:
    """Matrix element ``<x|H|y>`` including the core energy on the diagonal."""
    if x.counts() != y.counts():
        raise SectorMismatchError(f"{x} and {y} lie in different sectors")
    n = ints.n_orb
    h1s, anti = spin_orbital_tensors(ints)
    mx, my = interleave(x.alpha, x.beta, n), interleave(y.alpha, y.beta, n)
    holes = _bits(my & ~mx)
    parts = _bits(mx & ~my)
    degree = len(holes)
    if degree == 0:
        occ = _bits(mx)
        e = ints.e_core + sum(h1s[i, i] for i in occ)
        e += 0.5 * sum(anti[i, j, i, j] for i in occ for j in occ)
        return float(e)
    if degree > 2:
        return 0.0
    sign = 1
    state = my
    for m in holes:
        sign *= _ladder_sign(state, m)
        state ^= 1 << m
    for p in reversed(parts):
        sign *= _ladder_sign(state, p)
        state ^= 1 << p
    if degree == 1:
        (m,), (p,) = holes, parts
        common = _bits(mx & my)
        val = h1s[p, m] + sum(anti[p, i, m, i] for i in common)
        return float(sign * val)
    m, n_ = holes
    p, q = parts
    return float(sign * anti[p, q, m, n_])


def _bit_index(single_bit: np.ndarray) -> np.ndarray:
    return np.bitwise_count(single_bit - 1).astype(np.int64)


def _low_bit(mask: np.ndarray) -> np.ndarray:
    return mask & -mask


def _signs(mask: np.ndarray, k: np.ndarray) -> np.ndarray:
    below = mask & ((np.int64(1) << k) - 1)
    return 1 - 2 * (np.bitwise_count(below).astype(np.int64) & 1)


def _pair_elements(mx: np.ndarray, my: np.ndarray, ints: MolecularIntegrals, nso: int) -> np.ndarray:
    """Off-diagonal elements for pairs already known to differ by one or two spin orbitals."""
    h1s, anti = spin_orbital_tensors(ints)
    hole_mask = my & ~mx
    part_mask = mx & ~my
    degree = np.bitwise_count(hole_mask).astype(np.int64)
    out = np.zeros(len(mx))

    m1 = _low_bit(hole_mask)
    p1 = _low_bit(part_mask)
    m = _bit_index(m1)
    p = _bit_index(p1)

    single = degree == 1
    if np.any(single):
        ys, ms, ps = my[single], m[single], p[single]
        sign = _signs(ys, ms)
        sign = sign * _signs(ys ^ (np.int64(1) << ms), ps)
        common = (mx[single] & ys)
        occ = ((common[:, None] >> np.arange(nso)) & 1).astype(float)
        # G[p, m, i] = <pi||mi>
        g_single = np.einsum("piqi->pqi", anti)
        two_body = np.einsum("ki,ki->k", occ, g_single[ps, ms])
        out[single] = sign * (h1s[ps, ms] + two_body)

    double = degree == 2
    if np.any(double):
        ys = my[double]
        hm = hole_mask[double]
        pm = part_mask[double]
        m_lo = _bit_index(_low_bit(hm))
        m_hi = _bit_index(_low_bit(hm ^ _low_bit(hm)))
        p_lo = _bit_index(_low_bit(pm))
        p_hi = _bit_index(_low_bit(pm ^ _low_bit(pm)))
        one = np.int64(1)
        state = ys
        sign = _signs(state, m_lo)
        state = state ^ (one << m_lo)
        sign = sign * _signs(state, m_hi)
        state = state ^ (one << m_hi)
        sign = sign * _signs(state, p_hi)
        state = state ^ (one << p_hi)
        sign = sign * _signs(state, p_lo)
        out[double] = sign * anti[p_lo, p_hi, m_lo, m_hi]
    return out


def _diagonal(masks: np.ndarray, ints: MolecularIntegrals, nso: int) -> np.ndarray:
    h1s, anti = spin_orbital_tensors(ints)
    occ = ((masks[:, None] >> np.arange(nso)) & 1).astype(float)
    coulomb_exchange = np.einsum("pqpq->pq", anti)
    return ints.e_core + occ @ np.diag(h1s) + 0.5 * np.einsum("ip,iq,pq->i", occ, occ, coulomb_exchange)


def determinant_masks(dets, n_orb: int) -> np.ndarray:
    alpha = np.fromiter((d.alpha for d in dets), dtype=np.int64, count=len(dets))
    beta = np.fromiter((d.beta for d in dets), dtype=np.int64, count=len(dets))
    return interleave_array(alpha, beta, n_orb)


def hamiltonian_matrix(dets, ints: MolecularIntegrals, sparse: bool | None = None, chunk: int = 1024):
    """Subspace Hamiltonian ``H_xy = <x|H|y>`` over a list of determinants.

    Returns a dense ``ndarray`` for small sets and a CSR matrix otherwise
    (``sparse=None`` switches at 2000 determinants). Pairs are screened by
    excitation degree before any integral lookup.
    """
    dets = list(dets)
    d = len(dets)
    nso = 2 * ints.n_orb
    if sparse is None:
        sparse = d > 2000
    masks = determinant_masks(dets, ints.n_orb)
    counts = np.stack([np.bitwise_count(masks & np.int64(0x5555555555555555)),
                       np.bitwise_count(masks & np.int64(0x2AAAAAAAAAAAAAAA))], axis=1)
    if d and np.any(counts != counts[0]):
        raise SectorMismatchError("determinants span more than one sector")
    diag = _diagonal(masks, ints, nso) if d else np.zeros(0)

    rows, cols, vals = [], [], []
    for start in range(0, d, chunk):
        block = masks[start:start + chunk]
        xor = block[:, None] ^ masks[None, :]
        deg = np.bitwise_count(xor)
        i_loc, j = np.nonzero((deg > 0) & (deg <= 4))
        i = i_loc + start
        keep = i < j
        i, j = i[keep], j[keep]
        if len(i) == 0:
            continue
        v = _pair_elements(masks[i], masks[j], ints, nso)
        nz = v != 0.0
        rows.append(i[nz])
        cols.append(j[nz])
        vals.append(v[nz])
    if rows:
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        v = np.concatenate(vals)
    else:
        r = c = np.zeros(0, dtype=np.int64)
        v = np.zeros(0)
    if sparse:
        idx = np.arange(d)
        mat = sp.csr_matrix(
            (np.concatenate([diag, v, v]), (np.concatenate([idx, r, c]), np.concatenate([idx, c, r]))),
            shape=(d, d),
        )
        return mat
    mat = np.zeros((d, d))
    mat[np.arange(d), np.arange(d)] = diag
    mat[r, c] = v
    mat[c, r] = v
    return mat
