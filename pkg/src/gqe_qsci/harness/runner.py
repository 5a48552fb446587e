"""The generative optimization loop, its random-sequence control and baseline runs."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from math import comb
from pathlib import Path
from typing import Callable

import numpy as np

from ..baselines import (
    BaselineResult,
    GSPGSSchedule,
    SqDriftConfig,
    TimeEvolvedConfig,
    exact_state_run,
    gspgs_optimize,
    sqdrift_run,
    time_evolved_run,
)
from ..hamiltonian import (
    MolecularIntegrals,
    fci_ground_state,
    hf_determinant,
    jordan_wigner,
    load_fcidump,
)
from ..hamiltonian.pauli import PauliHamiltonian
from ..policy import (
    AdamState,
    GRPOConfig,
    PolicyConfig,
    SampledBatch,
    TransformerPolicy,
    compute_advantages,
    grpo_update,
    sample_sequences,
)
from ..pool import OperatorPool, build_pool, mp2_amplitudes, parse_amplitudes
from ..qsci import EmptySubspaceError, qsci_from_histogram
from ..refine import RefinementState, global_refine, local_refine
from ..rng import make_rng
from ..simulator import Circuit, gate_cost, run_circuit, sample
from ..wavefunction import SampledWavefunction
from .config import ExperimentConfig

log = logging.getLogger(__name__)

# extra key that separates the policy's token stream from the M circuit streams
POLICY_STREAM = 1_000_003
REEVAL_STREAM = 1_000_033


@dataclass
class Problem:
    ints: MolecularIntegrals
    pool: OperatorPool
    e_fci: float
    sector_size: int
    d_max: int
    hamiltonian: PauliHamiltonian | None = None
    ground: SampledWavefunction | None = None

    @property
    def hf(self):
        return hf_determinant(self.ints)

    def pauli_hamiltonian(self) -> PauliHamiltonian:
        if self.hamiltonian is None:
            self.hamiltonian = jordan_wigner(self.ints)
        return self.hamiltonian

    def circuit(self, pool_indices) -> Circuit:
        return Circuit(self.pool.gates(int(k) for k in pool_indices), self.hf, self.pool.n_qubits)


def load_problem(cfg: ExperimentConfig, ints: MolecularIntegrals | None = None,
                 pool: OperatorPool | None = None) -> Problem:
    """Integrals, operator pool and FCI reference for ``cfg``.

    Without an amplitude file the pool is built from MP2 doubles.
    """
    if ints is None:
        if not cfg.fcidump:
            raise ValueError("no FCIDUMP given")
        ints = load_fcidump(cfg.fcidump)
    if pool is None:
        if cfg.amps:
            amps = parse_amplitudes(Path(cfg.amps).read_text(encoding="utf-8"), ints.n_qubits)
        else:
            amps = mp2_amplitudes(ints)
        pool = build_pool(amps, ints.n_qubits, cfg.amp_threshold)
    e_fci, ground = fci_ground_state(ints)
    size = comb(ints.n_orb, ints.n_alpha) * comb(ints.n_orb, ints.n_beta)
    return Problem(ints, pool, e_fci, size, cfg.resolved_d_max(size), ground=ground)


@dataclass
class IterationRecord:
    iteration: int
    tokens: list[list[int]]
    energies: list[float | None]
    best_so_far: float
    e_local: float
    e_global: float
    support_local: int
    support_global: int
    gate_2q: list[int]
    gate_rot: list[int]
    gate_total: list[int]
    n_dets: list[int]
    wall_time: float


@dataclass
class RunRecord:
    """Everything a run produced; serializes to JSON for the ``report`` step."""

    method: str
    seed: int
    e_fci: float
    d_max: int
    n_shots: int
    iterations: list[IterationRecord] = field(default_factory=list)
    best_tokens: list[int] | None = None
    best_energy: float = float("inf")
    baseline_results: list[dict] = field(default_factory=list)
    sweep: list[dict] = field(default_factory=list)
    refinement_trace: str = ""

    @property
    def best_so_far(self) -> list[float]:
        return [it.best_so_far for it in self.iterations]

    @property
    def shots_consumed(self) -> int:
        return sum(self.n_shots for it in self.iterations for _ in it.tokens)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, allow_nan=True)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        data = json.loads(text)
        data["iterations"] = [IterationRecord(**it) for it in data["iterations"]]
        return cls(**data)


def baseline_entry(res: BaselineResult) -> dict:
    return {
        "method": res.method, "param": res.param, "shots": res.n_shots,
        "gate_2q": res.cost.two_qubit_gates, "gate_rot": res.cost.rotation_gates,
        "gate_total": res.cost.total_gates, "n_dets": len(res.wavefunction),
        "energy": res.wavefunction.energy, "unique_sampled": res.unique_sampled,
    }


def evaluate_sequence(problem: Problem, pool_indices, n_shots: int, rng: np.random.Generator):
    """QSCI wavefunction (``None`` if nothing lands in the sector), gate cost and sampled support."""
    circ = problem.circuit(pool_indices)
    hist = sample(run_circuit(circ), n_shots, rng)
    try:
        wf = qsci_from_histogram(hist, problem.d_max, problem.ints)
    except EmptySubspaceError:
        wf = None
    return wf, gate_cost(circ), len(hist.counts)


def _rewards(energies: list[float | None]) -> np.ndarray:
    finite = [e for e in energies if e is not None]
    if not finite:
        return np.zeros(len(energies))
    worst = max(finite)
    return -np.array([worst if e is None else e for e in energies])


def _optimize(
    cfg: ExperimentConfig,
    problem: Problem,
    method: str,
    propose: Callable[[int], np.ndarray],
    learn: Callable[[np.ndarray, np.ndarray], None] | None,
) -> RunRecord:
    m_circ = cfg.n_circuits
    record = RunRecord(method, cfg.seed, problem.e_fci, problem.d_max, cfg.n_shots)
    refinement = RefinementState()
    best = np.inf
    for it in range(cfg.n_iters):
        t0 = time.perf_counter()
        indices = propose(it)
        wfs, costs, energies = [], [], []
        try:
            for m in range(m_circ):
                wf, cost, _ = evaluate_sequence(problem, indices[m], cfg.n_shots, make_rng(cfg.seed, it, m))
                wfs.append(wf)
                costs.append(cost)
                energies.append(None if wf is None else wf.energy)
                if wf is not None and wf.energy < best:
                    best = wf.energy
                    record.best_tokens = [int(k) for k in indices[m]]
                    record.best_energy = wf.energy
            rewards = _rewards(energies)
            if learn is not None:
                learn(indices, rewards)
            valid = [w for w in wfs if w is not None]
            if valid:
                local = local_refine(valid, problem.d_max, problem.ints)
                refinement = global_refine(refinement, local, problem.d_max, problem.ints)
        except Exception as exc:
            raise RuntimeError(f"{method} failed at iteration {it}: {exc}") from exc
        if valid:
            e_loc, e_glob, s_loc, s_glob = refinement.history[-1]
        elif refinement.current is not None:
            e_loc, s_loc = float("inf"), 0
            e_glob, s_glob = refinement.current.energy, len(refinement.current)
        else:
            e_loc = e_glob = float("inf")
            s_loc = s_glob = 0
        record.iterations.append(IterationRecord(
            iteration=it + 1,
            tokens=[[int(k) for k in row] for row in indices],
            energies=energies,
            best_so_far=float(best),
            e_local=e_loc, e_global=e_glob, support_local=s_loc, support_global=s_glob,
            gate_2q=[c.two_qubit_gates for c in costs],
            gate_rot=[c.rotation_gates for c in costs],
            gate_total=[c.total_gates for c in costs],
            n_dets=[0 if w is None else len(w) for w in wfs],
            wall_time=time.perf_counter() - t0,
        ))
        log.info("%s iter %d best %.8f global %.8f", method, it + 1, best, e_glob)
    record.refinement_trace = refinement.to_csv()
    return record


def make_policy(cfg: ExperimentConfig, pool_size: int) -> TransformerPolicy:
    pcfg = PolicyConfig.for_pool(
        pool_size, cfg.length, d_model=cfg.d_model, n_heads=cfg.n_heads, n_layers=cfg.n_layers,
        d_ff=cfg.d_ff, repetition_penalty=cfg.repetition_penalty, seed=cfg.seed,
    )
    return TransformerPolicy(pcfg)


def run_gqe(cfg: ExperimentConfig, problem: Problem | None = None,
            policy: TransformerPolicy | None = None) -> tuple[RunRecord, TransformerPolicy]:
    """Sample M sequences, score them by QSCI, update the policy by GRPO, refine; repeat."""
    problem = problem or load_problem(cfg)
    policy = policy or make_policy(cfg, len(problem.pool))
    gcfg = GRPOConfig(clip=cfg.clip, updates_per_batch=cfg.updates_per_batch,
                      learning_rate=cfg.learning_rate, weight_decay=cfg.weight_decay)
    adam = AdamState()
    pending: dict[str, SampledBatch] = {}

    def propose(it: int) -> np.ndarray:
        batch = sample_sequences(policy, cfg.n_circuits, cfg.length, cfg.repetition_penalty,
                                 make_rng(cfg.seed, it, POLICY_STREAM))
        pending["batch"] = batch
        return batch.pool_indices()

    def learn(_indices: np.ndarray, rewards: np.ndarray) -> None:
        batch = pending.pop("batch")
        batch.rewards = rewards
        batch.advantages = compute_advantages(rewards, gcfg.sigma_floor)
        grpo_update(policy, batch, gcfg, adam)

    record = _optimize(cfg, problem, "gqe", propose, learn)
    return record, policy


def run_random_baseline(cfg: ExperimentConfig, problem: Problem | None = None) -> RunRecord:
    """Same loop with uniformly drawn pool indices and no learning."""
    problem = problem or load_problem(cfg)
    size = len(problem.pool)

    def propose(it: int) -> np.ndarray:
        rng = make_rng(cfg.seed, it, POLICY_STREAM)
        return rng.integers(0, size, size=(cfg.n_circuits, cfg.length))

    return _optimize(cfg, problem, "random", propose, None)


def shot_sweep(cfg: ExperimentConfig, problem: Problem, record: RunRecord) -> list[dict]:
    """Re-run the best recorded sequence with fresh streams at each budget in ``cfg.shot_sweep``."""
    if record.best_tokens is None:
        return []
    out = []
    for j, shots in enumerate(cfg.shot_sweep):
        wf, cost, unique = evaluate_sequence(problem, record.best_tokens, shots,
                                             make_rng(cfg.seed, REEVAL_STREAM, j))
        out.append({
            "method": record.method, "param": f"L={cfg.length}", "shots": shots,
            "gate_2q": cost.two_qubit_gates, "gate_rot": cost.rotation_gates, "gate_total": cost.total_gates,
            "n_dets": 0 if wf is None else len(wf), "energy": float("inf") if wf is None else wf.energy,
            "unique_sampled": unique,
        })
    record.sweep = out
    return out


def run_baseline(cfg: ExperimentConfig, which: str, problem: Problem | None = None) -> RunRecord:
    """One baseline family at every budget in ``cfg.shot_sweep`` plus the full shared budget."""
    problem = problem or load_problem(cfg)
    record = RunRecord(which, cfg.seed, problem.e_fci, problem.d_max, cfg.total_baseline_shots)
    budgets = sorted(set(cfg.shot_sweep) | {cfg.total_baseline_shots})
    results: list[BaselineResult] = []
    for j, shots in enumerate(budgets):
        rng = make_rng(cfg.seed, REEVAL_STREAM, j)
        if which == "time_evolved":
            tcfg = TimeEvolvedConfig(cfg.te_mode, cfg.te_dt, shots, cfg.te_steps)
            results.append(time_evolved_run(tcfg, problem.ints, problem.d_max, rng, problem.pauli_hamiltonian()))
        elif which == "sqdrift":
            for n_exc in cfg.sqdrift_excitations:
                scfg = SqDriftConfig(n_exc, cfg.sqdrift_randomizations, cfg.sqdrift_k, 1.0, shots)
                results.append(sqdrift_run(scfg, problem.ints, problem.d_max, rng, problem.pauli_hamiltonian()))
        elif which == "exact":
            results.append(exact_state_run(problem.ints, shots, problem.d_max, rng, problem.ground))
        else:
            raise ValueError(f"unknown baseline {which!r}")
    record.baseline_results = [baseline_entry(r) for r in results]
    record.best_energy = min(r.wavefunction.energy for r in results)
    return record


def run_gspgs(cfg: ExperimentConfig, tokens: list[int], problem: Problem | None = None) -> RunRecord:
    """Perturbative angle optimization of a fixed pool sequence at matched evaluations per iteration."""
    problem = problem or load_problem(cfg)
    sched = GSPGSSchedule(n_perturbations=cfg.gspgs_perturbations, iterations=cfg.gspgs_iters)
    _, trace = gspgs_optimize(problem.pool, tokens, None, sched, problem.ints, problem.d_max,
                              cfg.n_shots, make_rng(cfg.seed, REEVAL_STREAM))
    record = RunRecord("gspgs", cfg.seed, problem.e_fci, problem.d_max, cfg.n_shots)
    for t, (g, e) in enumerate(zip(trace.grad_norms, trace.best_energy)):
        record.iterations.append(IterationRecord(
            t + 1, [tokens], [], e, float("inf"), float("inf"), 0, 0, [], [], [], [], 0.0,
        ))
        record.baseline_results.append({"iter": t + 1, "grad_norm": g, "best_energy": e})
    record.best_energy = trace.best_energy[-1] if trace.best_energy else float("inf")
    record.best_tokens = list(tokens)
    return record
