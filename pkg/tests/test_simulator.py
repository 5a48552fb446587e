import numpy as np
import pytest
from scipy.linalg import expm

from gqe_qsci.hamiltonian import Determinant, PauliHamiltonian, PauliString, random_integrals, jordan_wigner
from gqe_qsci.simulator import (
    Circuit,
    GateCost,
    ShotHistogram,
    Statevector,
    apply_pauli_rotation,
    gate_cost,
    qdrift_circuit,
    run_circuit,
    sample,
    trotter_circuit,
    trotter_order,
)


def random_state(n, rng):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return Statevector(v / np.linalg.norm(v), n)


@pytest.mark.parametrize("label", ["X", "ZY", "XIZY", "YYXZ"])
def test_rotation_matches_matrix_exponential(label):
    rng = np.random.default_rng(0)
    p = PauliString.from_label(label)
    psi = random_state(p.n_qubits, rng)
    got = apply_pauli_rotation(psi, p, 0.37).amplitudes
    expected = expm(1j * 0.37 * p.to_matrix().toarray()) @ psi.amplitudes
    np.testing.assert_allclose(got, expected, atol=1e-12)


def test_identity_rotation_is_global_phase():
    psi = random_state(3, np.random.default_rng(1))
    out = apply_pauli_rotation(psi, PauliString.identity(3), 0.4)
    np.testing.assert_allclose(out.amplitudes, np.exp(0.4j) * psi.amplitudes, atol=1e-14)


def test_determinant_state_uses_interleaved_qubits():
    state = Statevector.from_determinant(Determinant(0b01, 0b10), 2)
    # alpha of orbital 0 -> qubit 0, beta of orbital 1 -> qubit 3
    assert state.probabilities()[0b1001] == 1.0


def test_sampling_conserves_shots_and_is_reproducible():
    psi = random_state(4, np.random.default_rng(2))
    h1 = sample(psi, 5000, np.random.default_rng(3))
    h2 = sample(psi, 5000, np.random.default_rng(3))
    assert h1.n_shots == 5000 and h1.counts == h2.counts
    freq = np.zeros(16)
    for k, v in h1.counts.items():
        freq[k] = v / 5000
    assert np.abs(freq - psi.probabilities()).max() < 0.03


def test_sampling_rejects_unnormalized_state():
    with pytest.raises(ValueError):
        sample(Statevector(np.array([1.0, 1.0]), 1), 10, np.random.default_rng(0))


def test_histogram_merge_sums_counts():
    a = ShotHistogram({1: 2, 3: 1}, 2)
    b = ShotHistogram({3: 4}, 2)
    assert ShotHistogram.merged([a, b]).counts == {1: 2, 3: 5}
    assert a.bitstrings() == {"01": 2, "11": 1}


def test_trotter_first_order_error_slope():
    ints = random_integrals(2, 1, 1, np.random.default_rng(4))
    h = jordan_wigner(ints)
    dense = h.to_dense()
    psi0 = Statevector.from_determinant(Determinant(1, 1), 2)
    errs = []
    for t in (0.2, 0.1, 0.05):
        exact = expm(-1j * t * dense) @ psi0.amplitudes
        approx = run_circuit(trotter_circuit(h, t, 1, Determinant(1, 1))).amplitudes
        # global phase from the dropped identity term
        approx = approx * np.exp(-1j * t * h.identity_coefficient)
        errs.append(np.linalg.norm(exact - approx))
    slope = np.polyfit(np.log([0.2, 0.1, 0.05]), np.log(errs), 1)[0]
    assert abs(slope - 2) < 0.3


def test_trotter_order_and_identity_dropped():
    h = PauliHamiltonian.from_labels([(3.0, "II"), (-0.5, "ZI"), (0.5, "IX"), (0.1, "XX")])
    order = [(c, p.label) for c, p in trotter_order(h)]
    assert order == [(0.5, "IX"), (-0.5, "ZI"), (0.1, "XX")]
    circ = trotter_circuit(h, 2.0, steps=2)
    assert [a for _, a in circ.gates] == pytest.approx([-0.5, 0.5, -0.1] * 2)


def test_qdrift_angles_and_term_frequencies():
    h = PauliHamiltonian.from_labels([(-0.75, "ZI"), (0.25, "IX")])
    circ = qdrift_circuit(h, 1.0, 4000, np.random.default_rng(0))
    labels = [p.label for p, _ in circ.gates]
    assert labels.count("ZI") / 4000 == pytest.approx(0.75, abs=0.03)
    tau = 1.0 / 4000
    for p, a in circ.gates:
        assert a == pytest.approx(tau if p.label == "ZI" else -tau)


def test_gate_cost_formula():
    gates = [(PauliString.from_label("XIZY"), 0.1), (PauliString.from_label("IIII"), 0.3),
             (PauliString.from_label("IZII"), 0.2)]
    # XIZY: weight 3 -> 4 CX, 1 Rz, 2 basis letters -> 4 Cliffords
    assert gate_cost(gates) == GateCost(4, 2, 4 + 1 + 4 + 1)


def test_gate_cost_is_additive():
    a = Circuit(((PauliString.from_label("XY"), 0.1),), Determinant(0, 0), 2)
    b = Circuit(((PauliString.from_label("ZZ"), 0.2),), Determinant(0, 0), 2)
    assert gate_cost(a + b) == gate_cost(a) + gate_cost(b)


def test_circuit_text_roundtrip():
    circ = Circuit(((PauliString.from_label("XIZY"), 0.125), (PauliString.from_label("IIII"), 0.0)),
                   Determinant(0b11, 0b01), 4)
    again = Circuit.from_text(circ.to_text())
    assert again.gates == circ.gates and again.initial == circ.initial
