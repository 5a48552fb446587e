import csv

import numpy as np
import pytest
from sklearn.base import clone

from gqe_qsci.estimators import GQEOptimizer, QSCISolver, RandomCircuitSearch
from gqe_qsci.hamiltonian import hf_energy
from gqe_qsci.harness import (
    CHEMICAL_PRECISION,
    ExperimentConfig,
    RunRecord,
    emit_reports,
    load_config,
    load_problem,
    parse_config,
    run_baseline,
    run_gqe,
    run_random_baseline,
)
from gqe_qsci.harness.cli import main
from gqe_qsci.pool import build_pool
from gqe_qsci.simulator import ShotHistogram

from conftest import DATA, H4_FCI

TINY = dict(n_circuits=3, n_shots=500, n_iters=3, length=4, d_model=8, n_heads=2, n_layers=1, d_ff=16,
            updates_per_batch=2, shot_sweep=(100, 400))


@pytest.fixture(scope="module")
def tiny_cfg():
    return ExperimentConfig(fcidump=str(DATA / "h4_chain_sto3g.fcidump"),
                            amps=str(DATA / "h4_chain_sto3g_ccsd.amps"), **TINY)


@pytest.fixture(scope="module")
def problem(tiny_cfg):
    return load_problem(tiny_cfg)


def test_config_parsing_and_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nn_circuits = 4\nshot_sweep = 10, 1e3\nlearning-rate = 1e-4\n")
    cfg = load_config(path, {"seed": 9, "n_iters": None})
    assert cfg.n_circuits == 4 and cfg.shot_sweep == (10, 1000) and cfg.learning_rate == 1e-4
    assert cfg.seed == 9 and cfg.n_iters == 100
    assert parse_config(cfg.to_text()) == cfg


@pytest.mark.parametrize("text", ["nonsense\n", "unknown_key = 1\n", "n_circuits = 1\n", "length = 2.5\n"])
def test_config_errors(text):
    with pytest.raises(ValueError):
        parse_config(text)


def test_identity_pool_gives_hf(tiny_cfg, h4):
    prob = load_problem(tiny_cfg.replace(n_iters=1), h4, build_pool([], 8))
    record, _ = run_gqe(tiny_cfg.replace(n_iters=1), prob)
    e_hf = hf_energy(h4)
    it = record.iterations[0]
    assert it.best_so_far == pytest.approx(e_hf, abs=1e-12)
    assert it.e_local == pytest.approx(e_hf, abs=1e-12) and it.e_global == pytest.approx(e_hf, abs=1e-12)
    rand = run_random_baseline(tiny_cfg.replace(n_iters=1), prob)
    assert rand.iterations[0].best_so_far == pytest.approx(e_hf, abs=1e-12)


def test_gqe_is_deterministic_and_accounts_shots(tiny_cfg, problem):
    a, _ = run_gqe(tiny_cfg, problem)
    b, _ = run_gqe(tiny_cfg, problem)
    strip = lambda r: [(it.tokens, it.energies, it.e_global) for it in r.iterations]
    assert strip(a) == strip(b)
    assert a.shots_consumed == tiny_cfg.n_circuits * tiny_cfg.n_shots * tiny_cfg.n_iters
    best = a.best_so_far
    assert all(y <= x for x, y in zip(best, best[1:]))
    assert all(max(it.n_dets) <= problem.d_max for it in a.iterations)
    assert min(best) >= H4_FCI - 1e-10


def test_random_baseline_reproducible(tiny_cfg, problem):
    a = run_random_baseline(tiny_cfg, problem)
    b = run_random_baseline(tiny_cfg, problem)
    assert [it.tokens for it in a.iterations] == [it.tokens for it in b.iterations]
    for prev, cur in zip(a.iterations, a.iterations[1:]):
        if cur.support_global <= problem.d_max:
            assert cur.e_global <= prev.e_global + 1e-10
            assert cur.e_global <= cur.e_local + 1e-10


@pytest.mark.parametrize("which", ["time_evolved", "sqdrift", "exact"])
def test_run_baseline_passthrough(tiny_cfg, problem, which):
    cfg = tiny_cfg.replace(sqdrift_randomizations=3, baseline_shots=600)
    record = run_baseline(cfg, which, problem)
    shots = [r["shots"] for r in record.baseline_results]
    assert shots == [100, 400, 600]
    assert all(r["energy"] >= H4_FCI - 1e-10 for r in record.baseline_results)


def test_reports(tmp_path, tiny_cfg, problem):
    record = run_random_baseline(tiny_cfg.replace(n_iters=1), problem)
    paths = emit_reports(RunRecord.from_json(record.to_json()), tmp_path)
    with open(paths["history"]) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert float(rows[0]["best_error"]) == float(rows[0]["best_so_far"]) - record.e_fci
    assert float(rows[0]["chem_precision"]) == CHEMICAL_PRECISION == 1.5936e-3
    for key in ("sampling", "gates", "compactness"):
        with open(paths[key]) as fh:
            assert len(list(csv.DictReader(fh))) == 1


def test_cli_end_to_end(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("".join(f"{k} = {','.join(map(str, v)) if isinstance(v, tuple) else v}\n"
                           for k, v in TINY.items()))
    common = ["--fcidump", str(DATA / "h4_chain_sto3g.fcidump"), "--config", str(cfg), "--out", str(tmp_path)]
    assert main(["fci", "--fcidump", str(DATA / "h4_chain_sto3g.fcidump")]) == 0
    assert "E_FCI = -2.1026084809" in capsys.readouterr().out
    assert main(["pool-build", *common, "--amps", str(DATA / "h4_chain_sto3g_ccsd.amps")]) == 0
    assert (tmp_path / "pool.csv").read_text().startswith("token_id,pauli,angle,source")
    assert main(["qsci-once", *common, "--shots", "50"]) == 0
    assert main(["run-gqe", *common, "--seed", "1", "--iters", "2"]) == 0
    assert main(["run-random", *common, "--iters", "2"]) == 0
    assert main(["run-baseline", *common, "--which", "exact"]) == 0
    assert main(["run-baseline", *common, "--which", "gspgs", "--tokens", "1,2", "--iters", "2"]) == 0
    assert main(["report", "--out", str(tmp_path)]) == 0
    for name in ("optimization_history", "sampling_efficiency", "gate_efficiency", "compactness"):
        assert (tmp_path / f"{name}.csv").exists()
    assert (tmp_path / "policy_seed1.bin").exists() and (tmp_path / "best_circuit_seed1.txt").exists()


def test_estimators(h4):
    est = GQEOptimizer(n_circuits=2, n_shots=200, n_iters=2, length=3, random_state=4)
    assert clone(est).get_params() == est.get_params()
    with pytest.raises(RuntimeError):
        est.predict()
    est.set_params(n_iters=1).fit(h4)
    assert est.energy_ >= H4_FCI - 1e-10 and est.score() == -est.energy_
    assert est.predict(4, rng=0).shape == (4, 3)
    rnd = RandomCircuitSearch(n_circuits=2, n_shots=200, n_iters=1, length=3).fit(h4)
    assert rnd.energy_ >= H4_FCI - 1e-10
    hist = ShotHistogram({0b00001111: 10}, 8)
    solver = QSCISolver(d_max=4).fit(hist, h4)
    assert solver.energy_ == pytest.approx(hf_energy(h4))
    with pytest.raises(ValueError):
        GQEOptimizer(n_circuits=1).fit(h4)
