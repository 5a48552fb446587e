import numpy as np
import pytest
from scipy.linalg import expm

from gqe_qsci.baselines import (
    GSPGSSchedule,
    SqDriftConfig,
    TimeEvolvedConfig,
    baseline_csv,
    exact_state_qsci,
    exact_state_run,
    gspgs_gradient,
    gspgs_optimize,
    sample_circuits,
    split_shots,
    sqdrift_circuits,
    sqdrift_run,
    time_evolved_circuits,
    time_evolved_qsci,
    time_evolved_run,
)
from gqe_qsci.hamiltonian import (
    Determinant,
    PauliHamiltonian,
    fci_ground_state,
    hf_determinant,
    hf_energy,
    jordan_wigner,
    sector_determinants,
)
from gqe_qsci.hamiltonian.determinants import interleave
from gqe_qsci.pool import build_pool, mp2_amplitudes
from gqe_qsci.qsci import completion_class
from gqe_qsci.simulator import ShotHistogram, Statevector, qdrift_circuit, run_circuit


def rng(seed=0):
    return np.random.default_rng(seed)


def test_split_shots_conserves_budget():
    assert split_shots(10, 3) == [4, 3, 3]
    assert sum(split_shots(100_003, 1500)) == 100_003


def test_time_evolved_modes(toy):
    single = time_evolved_qsci(TimeEvolvedConfig("single", 0.7, 3000), toy, 9, rng(1))
    multi_one = time_evolved_qsci(TimeEvolvedConfig("multiple", 0.7, 3000, k_list=(1,)), toy, 9, rng(1))
    assert single.energy == multi_one.energy
    np.testing.assert_array_equal(single.coefficients, multi_one.coefficients)
    assert TimeEvolvedConfig("multiple").k_list == (1, 2, 3, 4, 5)
    with pytest.raises(ValueError):
        TimeEvolvedConfig("single", dt=0.0)


def test_time_evolved_small_dt_is_hf(toy):
    wf = time_evolved_qsci(TimeEvolvedConfig("single", 1e-6, 1000), toy, 9, rng())
    assert wf.energy == pytest.approx(hf_energy(toy), abs=1e-8)


def test_time_evolved_matches_sampled_support_oracle(toy):
    h = jordan_wigner(toy)
    cfg = TimeEvolvedConfig("single", 0.8, 1_000_000)
    probs = run_circuit(time_evolved_circuits(cfg, h, toy)[0]).probabilities()
    res = time_evolved_run(cfg, toy, 9, rng(2), h)
    sampled = {Determinant.from_index(i, 3) for i in range(64) if probs[i] > 1e-4}
    sampled = {d for d in sampled if d.counts() == (2, 1)}
    support = set().union(*(completion_class(d) for d in sampled))
    assert support <= set(res.wavefunction.determinants)
    idx = [interleave(d.alpha, d.beta, 3) for d in res.wavefunction.determinants]
    dense = h.to_dense().real
    assert res.wavefunction.energy == pytest.approx(np.linalg.eigvalsh(dense[np.ix_(idx, idx)])[0], abs=1e-6)


def test_sqdrift_single_term_is_exact_evolution():
    h = PauliHamiltonian.from_labels([(0.4, "XY")])
    circ = qdrift_circuit(h, 1.3, 7, rng(), Determinant(0b1, 0b0))
    psi0 = Statevector.from_determinant(Determinant(0b1, 0b0), 1)
    expected = expm(-1j * 1.3 * h.to_dense()) @ psi0.amplitudes
    np.testing.assert_allclose(run_circuit(circ).amplitudes, expected, atol=1e-12)


def test_sqdrift_accounting_and_union(toy):
    h = jordan_wigner(toy)
    cfg = SqDriftConfig(n_excitations=8, randomizations=5, k_list=(1, 2), n_shots=1001)
    circuits = sqdrift_circuits(cfg, h, toy, rng(3))
    assert len(circuits) == 10
    merged = sample_circuits(circuits, cfg.n_shots, rng(4))
    assert merged.n_shots == 1001
    singles = [sample_circuits([c], 100, rng(5 + i)) for i, c in enumerate(circuits)]
    union = ShotHistogram.merged(singles)
    assert len(union.counts) >= max(len(s.counts) for s in singles)
    res = sqdrift_run(cfg, toy, 9, rng(6), h)
    assert res.wavefunction.energy >= fci_ground_state(toy)[0] - 1e-10


def test_exact_state_sampling(toy):
    e0, ground = fci_ground_state(toy)
    wf = exact_state_qsci(toy, 200_000, 9, rng(7), ground)
    assert wf.energy == pytest.approx(e0, abs=1e-8)
    top = ground.determinants[int(np.argmax(ground.coefficients**2))]
    one = exact_state_qsci(toy, 200_000, 1, rng(7), ground)
    assert one.determinants == (top,)
    again = exact_state_qsci(toy, 5000, 4, rng(8), ground)
    assert again.energy == exact_state_qsci(toy, 5000, 4, rng(8), ground).energy


def test_gspgs_schedules():
    s = GSPGSSchedule()
    assert s.eta(0) == pytest.approx(0.1 / 11**0.602)
    assert s.c(0) == pytest.approx(0.05)
    assert s.eta(5) < s.eta(0) and s.c(5) < s.c(0)


def test_gspgs_constant_objective_gives_zero():
    g, values = gspgs_gradient(lambda th: 4.2, np.ones(6), 0.05, 5, rng())
    assert not np.any(g) and len(values) == 10


def test_gspgs_unbiased_on_quadratic():
    theta = np.array([0.3, -1.0, 0.5, 2.0])
    r = rng(9)
    draws = [gspgs_gradient(lambda th: float(th @ th), theta, 1e-3, 5, r)[0] for _ in range(1000)]
    mean = np.mean(draws, axis=0)
    assert np.linalg.norm(mean - 2 * theta) / np.linalg.norm(2 * theta) < 0.05


def test_gspgs_gradient_collapse_under_tight_dmax(toy):
    pool = build_pool(mp2_amplitudes(toy), 6)
    tokens = list(range(1, len(pool)))
    sched = GSPGSSchedule(iterations=6)
    _, tight = gspgs_optimize(pool, tokens, None, sched, toy, 1, 2000, rng(10))
    _, loose = gspgs_optimize(pool, tokens, None, sched, toy, 9, 2000, rng(10))
    assert tight.evaluations == loose.evaluations == 6 * 10
    frac = lambda tr: np.mean(np.array(tr.grad_norms) < 1e-10)
    assert frac(tight) > frac(loose)
    assert all(b <= a for a, b in zip(loose.best_energy, loose.best_energy[1:]))


def test_baseline_csv_header(toy):
    res = exact_state_run(toy, 100, 4, rng())
    lines = baseline_csv([res], -1.0).splitlines()
    assert lines[0] == "method,param,shots,gate_2q,gate_rot,gate_total,n_dets,energy,error"
    assert lines[1].startswith("exact,fci,100,0,0,0,")
