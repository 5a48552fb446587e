"""Pauli strings in symplectic form and real-coefficient Pauli sums.

A string is stored as two bitmasks ``(x, z)``: qubit ``q`` carries X when only
bit ``q`` of ``x`` is set, Z when only ``z`` is set and Y when both are. The
represented operator is ``i**popcount(x & z) * X**x Z**z`` so that each letter
is the usual Hermitian Pauli matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


@dataclass(frozen=True, order=False)
class PauliString:
    x: int
    z: int
    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        limit = 1 << self.n_qubits
        if self.x >= limit or self.z >= limit or self.x < 0 or self.z < 0:
            raise ValueError(f"masks exceed {self.n_qubits} qubits")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse letters with qubit 0 rightmost, e.g. ``'IXYZ'``."""
        x = z = 0
        n = len(label)
        for pos, ch in enumerate(label.upper()):
            try:
                bx, bz = _LETTER_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r} in {label!r}") from None
            q = n - 1 - pos
            x |= bx << q
            z |= bz << q
        return cls(x, z, n)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(0, 0, n_qubits)

    def letter(self, q: int) -> str:
        bx, bz = (self.x >> q) & 1, (self.z >> q) & 1
        return "IZXY"[bx * 2 + bz]

    @property
    def label(self) -> str:
        return "".join(self.letter(q) for q in reversed(range(self.n_qubits)))

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> list[int]:
        m = self.x | self.z
        return [q for q in range(self.n_qubits) if (m >> q) & 1]

    def count(self, letter: str) -> int:
        if letter == "X":
            return (self.x & ~self.z).bit_count()
        if letter == "Y":
            return (self.x & self.z).bit_count()
        if letter == "Z":
            return (self.z & ~self.x).bit_count()
        return self.n_qubits - self.weight

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def sort_key(self) -> str:
        return self.label

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"

    def to_matrix(self) -> sp.csr_matrix:
        dim = 1 << self.n_qubits
        idx = np.arange(dim, dtype=np.int64)
        return sp.csr_matrix((self.phases(idx), (idx ^ self.x, idx)), shape=(dim, dim))

    def phases(self, idx: np.ndarray) -> np.ndarray:
        """Amplitude factors of ``P|b> = phase(b) |b ^ x>`` for basis indices ``idx``."""
        ipow = (self.x & self.z).bit_count() % 4
        sign = 1 - 2 * (np.bitwise_count(idx & self.z).astype(np.int64) & 1)
        return (1j**ipow) * sign


def multiply(x1: int, z1: int, x2: int, z2: int) -> tuple[complex, int, int]:
    """Product of two symplectic Paulis: returns ``(phase, x, z)``."""
    x3, z3 = x1 ^ x2, z1 ^ z2
    exponent = (x1 & z1).bit_count() + (x2 & z2).bit_count() - (x3 & z3).bit_count()
    exponent += 2 * (z1 & x2).bit_count()
    return 1j ** (exponent % 4), x3, z3


PauliDict = dict[tuple[int, int], complex]


def dict_product(a: PauliDict, b: PauliDict) -> PauliDict:
    out: PauliDict = {}
    for (x1, z1), c1 in a.items():
        for (x2, z2), c2 in b.items():
            phase, x3, z3 = multiply(x1, z1, x2, z2)
            key = (x3, z3)
            out[key] = out.get(key, 0.0) + phase * c1 * c2
    return out


def dict_axpy(out: PauliDict, alpha: complex, a: PauliDict) -> None:
    for key, c in a.items():
        out[key] = out.get(key, 0.0) + alpha * c


def ladder(q: int, dagger: bool) -> PauliDict:
    """Jordan-Wigner image of ``a_q`` or ``a_q^dagger`` with the parity string on qubits < q."""
    zs = (1 << q) - 1
    bit = 1 << q
    # X_q Z_<q  and  Y_q Z_<q  (Y carries an explicit i in the symplectic phase)
    sign = -1 if dagger else 1
    return {(bit, zs): 0.5, (bit, zs | bit): sign * 0.5j}


@dataclass(frozen=True)
class PauliHamiltonian:
    """Real linear combination of Pauli strings with no repeated strings."""

    terms: tuple[tuple[float, PauliString], ...]
    n_qubits: int

    def __post_init__(self):
        seen = set()
        for coeff, p in self.terms:
            if p.n_qubits != self.n_qubits:
                raise ValueError("term qubit count mismatch")
            if (p.x, p.z) in seen:
                raise ValueError(f"duplicate Pauli string {p.label}")
            seen.add((p.x, p.z))
            if not np.isfinite(coeff):
                raise ValueError("non-finite coefficient")

    @classmethod
    def from_dict(cls, terms: PauliDict, n_qubits: int, tol: float = 1e-14, imag_tol: float = 1e-10):
        out = []
        for (x, z), c in terms.items():
            c = complex(c)
            if abs(c.imag) > imag_tol:
                raise ValueError(f"non-Hermitian term with coefficient {c}")
            if abs(c.real) > tol or (x == 0 and z == 0):
                out.append((float(c.real), PauliString(x, z, n_qubits)))
        if not any(p.is_identity() for _, p in out):
            out.append((0.0, PauliString.identity(n_qubits)))
        out.sort(key=lambda t: t[1].label)
        return cls(tuple(out), n_qubits)

    @classmethod
    def from_labels(cls, items: Iterable[tuple[float, str]]) -> "PauliHamiltonian":
        terms = [(float(c), PauliString.from_label(lbl)) for c, lbl in items]
        n = terms[0][1].n_qubits if terms else 0
        return cls(tuple(terms), n)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def identity_coefficient(self) -> float:
        return sum(c for c, p in self.terms if p.is_identity())

    def non_identity_terms(self) -> list[tuple[float, PauliString]]:
        return [(c, p) for c, p in self.terms if not p.is_identity()]

    def one_norm(self) -> float:
        return sum(abs(c) for c, _ in self.non_identity_terms())

    def to_sparse(self) -> sp.csr_matrix:
        dim = 1 << self.n_qubits
        idx = np.arange(dim, dtype=np.int64)
        rows, cols, vals = [], [], []
        for coeff, p in self.terms:
            rows.append(idx ^ p.x)
            cols.append(idx)
            vals.append(coeff * p.phases(idx))
        mat = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        )
        mat.sum_duplicates()
        return mat

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def matrix_in_basis(self, indices: np.ndarray) -> np.ndarray:
        """Dense real matrix of the operator restricted to the given basis indices."""
        indices = np.asarray(indices, dtype=np.int64)
        out = np.zeros((len(indices), len(indices)), dtype=complex)
        lookup = np.full(1 << self.n_qubits, -1, dtype=np.int64)
        lookup[indices] = np.arange(len(indices))
        for coeff, p in self.terms:
            target = lookup[indices ^ p.x]
            keep = target >= 0
            np.add.at(out, (target[keep], np.nonzero(keep)[0]), coeff * p.phases(indices[keep]))
        if np.max(np.abs(out.imag), initial=0.0) > 1e-10:
            raise ValueError("restricted matrix is not real")
        return out.real

    def apply(self, state: np.ndarray) -> np.ndarray:
        idx = np.arange(state.shape[0], dtype=np.int64)
        out = np.zeros_like(state, dtype=complex)
        for coeff, p in self.terms:
            out[idx ^ p.x] += coeff * p.phases(idx) * state
        return out
