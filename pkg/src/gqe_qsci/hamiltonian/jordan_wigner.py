"""Second-quantized electronic Hamiltonian mapped to qubits."""

from __future__ import annotations

from functools import lru_cache

from .integrals import MolecularIntegrals
from .pauli import PauliDict, PauliHamiltonian, dict_axpy, dict_product, ladder


@lru_cache(maxsize=64)
def _hopping(p: int, q: int) -> tuple[tuple[tuple[int, int], complex], ...]:
    return tuple(dict_product(ladder(p, True), ladder(q, False)).items())


def hopping(p: int, q: int) -> PauliDict:
    """Pauli expansion of ``a_p^dagger a_q`` on spin orbitals (= qubits) ``p`` and ``q``."""
    return dict(_hopping(p, q))


def jordan_wigner(ints: MolecularIntegrals, tol: float = 1e-14) -> PauliHamiltonian:
    """Map ``H = E_core + sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q`` to Pauli strings.

    Spatial orbital ``p`` with spin ``s`` (0 = up, 1 = down) sits on qubit ``2p + s``.
    The two-body operator is rewritten as ``E_pq E_rs - delta_qr E_ps`` with
    ``E_pq = a+_p a_q`` so only hopping products are needed.
    """
    n = ints.n_orb
    h1, h2 = ints.h1, ints.h2
    acc: PauliDict = {(0, 0): complex(ints.e_core)}

    # one-body part plus the -1/2 sum_q (pq|qs) E_ps contraction
    k_contract = h1 - 0.5 * h2.trace(axis1=1, axis2=2)
    for s in (0, 1):
        for p in range(n):
            for q in range(n):
                if abs(k_contract[p, q]) > tol:
                    dict_axpy(acc, k_contract[p, q], hopping(2 * p + s, 2 * q + s))

    for s in (0, 1):
        for p in range(n):
            for q in range(n):
                left = hopping(2 * p + s, 2 * q + s)
                for t in (0, 1):
                    for r in range(n):
                        for u in range(n):
                            v = h2[p, q, r, u]
                            if abs(v) <= tol:
                                continue
                            dict_axpy(acc, 0.5 * v, dict_product(left, hopping(2 * r + t, 2 * u + t)))

    return PauliHamiltonian.from_dict(acc, 2 * n, tol=tol)
