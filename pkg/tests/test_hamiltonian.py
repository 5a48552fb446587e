import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqe_qsci.hamiltonian import (
    Determinant,
    FCIDumpError,
    PauliHamiltonian,
    PauliString,
    SectorMismatchError,
    fci_ground_state,
    format_fcidump,
    hamiltonian_matrix,
    hf_determinant,
    hf_energy,
    jordan_wigner,
    parse_fcidump,
    random_integrals,
    sector_determinants,
    slater_condon,
)
from gqe_qsci.hamiltonian.determinants import interleave
from gqe_qsci.hamiltonian.pauli import multiply

from conftest import H4_FCI, H4_HF

SINGLE = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, -1j], [1j, 0]]),
          "Z": np.diag([1.0, -1.0])}


def kron_label(label):
    out = np.ones((1, 1))
    for ch in label:  # leftmost letter is the highest qubit
        out = np.kron(out, SINGLE[ch])
    return out


def test_fcidump_roundtrip(toy):
    again = parse_fcidump(format_fcidump(toy))
    assert again.n_orb == toy.n_orb and again.sector == toy.sector
    np.testing.assert_allclose(again.h1, toy.h1, atol=1e-14)
    np.testing.assert_allclose(again.h2, toy.h2, atol=1e-14)
    np.testing.assert_allclose(again.orb_energies, toy.orb_energies, atol=1e-14)
    assert again.e_core == pytest.approx(toy.e_core, abs=1e-14)


def test_fcidump_fortran_exponent_and_default_ms2():
    text = """ &FCI NORB=1,NELEC=2,
 &END
 0.5D+00 1 1 1 1
 -1.25D0 1 1 0 0
 0.75 0 0 0 0
"""
    ints = parse_fcidump(text)
    assert ints.sector == (1, 1)
    assert ints.h2[0, 0, 0, 0] == 0.5 and ints.h1[0, 0] == -1.25 and ints.e_core == 0.75
    assert hf_energy(ints) == pytest.approx(0.75 - 2.5 + 0.5)


@pytest.mark.parametrize("body", [
    " 0.1 3 1 1 1\n",  # index out of range
    " abc 1 1 1 1\n",  # non-numeric value
    " 0.1 1 0 1 0\n",  # unsupported pattern
])
def test_fcidump_rejects_malformed(body):
    with pytest.raises(FCIDumpError):
        parse_fcidump(" &FCI NORB=2,NELEC=2,MS2=0,\n &END\n" + body)


def test_pauli_product_matches_dense():
    labels = ["".join(p) for p in itertools.product("IXYZ", repeat=2)]
    for a, b in itertools.product(labels, repeat=2):
        pa, pb = PauliString.from_label(a), PauliString.from_label(b)
        phase, x, z = multiply(pa.x, pa.z, pb.x, pb.z)
        expected = kron_label(a) @ kron_label(b)
        got = phase * PauliString(x, z, 2).to_matrix().toarray()
        np.testing.assert_allclose(got, expected, atol=1e-14)


@given(st.text(alphabet="IXYZ", min_size=1, max_size=5))
def test_pauli_matrix_matches_kronecker(label):
    np.testing.assert_allclose(PauliString.from_label(label).to_matrix().toarray(), kron_label(label), atol=1e-14)


def test_pauli_hamiltonian_rejects_complex_coefficient():
    with pytest.raises(ValueError):
        PauliHamiltonian.from_dict({(1, 1): 0.3j}, 1)


def _sector_indices(n_orb, na, nb):
    return [interleave(d.alpha, d.beta, n_orb) for d in sector_determinants(n_orb, na, nb)]


@pytest.mark.parametrize("n_orb,na,nb", [(2, 1, 1), (3, 2, 1), (3, 1, 1), (4, 2, 2)])
def test_slater_condon_matches_jordan_wigner(n_orb, na, nb):
    ints = random_integrals(n_orb, na, nb, np.random.default_rng(n_orb * 10 + na))
    dense = jordan_wigner(ints).to_dense()
    np.testing.assert_allclose(dense, dense.conj().T, atol=1e-12)
    dets = sector_determinants(n_orb, na, nb)
    idx = _sector_indices(n_orb, na, nb)
    sc = hamiltonian_matrix(dets, ints)
    np.testing.assert_allclose(sc, dense[np.ix_(idx, idx)].real, atol=1e-10)
    for x, y in itertools.islice(itertools.product(dets, repeat=2), 200):
        assert slater_condon(x, y, ints) == pytest.approx(sc[dets.index(x), dets.index(y)], abs=1e-12)


def test_jordan_wigner_conserves_particle_number():
    ints = random_integrals(3, 1, 1, np.random.default_rng(0))
    dense = jordan_wigner(ints).to_dense()
    n_op = np.diag([bin(i).count("1") for i in range(dense.shape[0])])
    np.testing.assert_allclose(dense @ n_op - n_op @ dense, 0, atol=1e-12)


def test_sparse_and_dense_paths_agree(toy):
    dets = sector_determinants(3, 2, 1)
    dense = hamiltonian_matrix(dets, toy, sparse=False)
    sparse = hamiltonian_matrix(dets, toy, sparse=True, chunk=2).toarray()
    np.testing.assert_allclose(dense, sparse, atol=1e-14)


def test_sector_mismatch_raises(toy):
    with pytest.raises(SectorMismatchError):
        slater_condon(Determinant(0b011, 0b001), Determinant(0b001, 0b001), toy)
    with pytest.raises(SectorMismatchError):
        hamiltonian_matrix([Determinant(0b011, 0b001), Determinant(0b001, 0b011)], toy)


def test_h4_reference_energies(h4):
    e0, wf = fci_ground_state(h4)
    assert e0 == pytest.approx(H4_FCI, abs=1e-9)
    assert hf_energy(h4) == pytest.approx(H4_HF, abs=1e-10)
    assert wf.norm == pytest.approx(1.0)
    assert wf.as_dict()[hf_determinant(h4)] > 0


def test_fci_matches_dense_jordan_wigner(toy):
    dense = jordan_wigner(toy).to_dense()
    idx = _sector_indices(3, 2, 1)
    expected = np.linalg.eigvalsh(dense[np.ix_(idx, idx)])[0]
    assert fci_ground_state(toy)[0] == pytest.approx(expected, abs=1e-10)


def test_eigsh_path_matches_dense():
    from gqe_qsci.hamiltonian import lowest_eigenpair

    rng = np.random.default_rng(1)
    a = rng.normal(size=(2100, 2100)) * 0.01
    a = a + a.T + np.diag(np.arange(2100.0))
    e, v = lowest_eigenpair(a)
    assert e == pytest.approx(np.linalg.eigvalsh(a)[0], abs=1e-9)
    assert np.linalg.norm(a @ v - e * v) < 1e-8


def test_stream_fcidump_input(toy):
    assert parse_fcidump(io.StringIO(format_fcidump(toy))).n_orb == 3
