"""Reference state-preparation families for QSCI and a perturbative VQE optimizer.

Time evolution from Hartree-Fock (one or several evolution times), randomized
qDRIFT evolution averaged over many circuits, sampling the exact ground state,
and simultaneous-perturbation gradient descent on fixed circuit angles.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .hamiltonian.determinants import hf_determinant, interleave
from .hamiltonian.fci import fci_ground_state, hf_energy
from .hamiltonian.integrals import MolecularIntegrals
from .hamiltonian.jordan_wigner import jordan_wigner
from .hamiltonian.pauli import PauliHamiltonian
from .pool import OperatorPool
from .qsci import EmptySubspaceError, qsci_from_histogram
from .simulator import (
    Circuit,
    GateCost,
    ShotHistogram,
    gate_cost,
    qdrift_circuit,
    run_circuit,
    sample,
    trotter_circuit,
)
from .wavefunction import SampledWavefunction

BASELINE_COLUMNS = ["method", "param", "shots", "gate_2q", "gate_rot", "gate_total", "n_dets", "energy", "error"]


@dataclass(frozen=True)
class TimeEvolvedConfig:
    mode: str = "single"
    dt: float = 1.0
    n_shots: int = 100_000
    trotter_steps: int = 1
    k_list: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.mode not in ("single", "multiple"):
            raise ValueError(f"unknown time-evolution mode {self.mode!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_shots < 1 or self.trotter_steps < 1:
            raise ValueError("n_shots and trotter_steps must be >= 1")
        if self.k_list is None:
            object.__setattr__(self, "k_list", (1,) if self.mode == "single" else (1, 2, 3, 4, 5))
        object.__setattr__(self, "k_list", tuple(int(k) for k in self.k_list))


@dataclass(frozen=True)
class SqDriftConfig:
    n_excitations: int = 20
    randomizations: int = 500
    k_list: tuple[int, ...] = (1, 2, 3)
    dt: float = 1.0
    n_shots: int = 100_000

    def __post_init__(self):
        if self.randomizations < 1 or self.n_excitations < 1:
            raise ValueError("randomizations and n_excitations must be >= 1")
        if not self.k_list:
            raise ValueError("k_list must not be empty")
        if self.n_shots < 1:
            raise ValueError("n_shots must be >= 1")


@dataclass(frozen=True)
class GSPGSSchedule:
    eta0: float = 0.1
    eta_exp: float = 0.602
    offset: float = 10.0
    c0: float = 0.05
    c_exp: float = 0.101
    n_perturbations: int = 5
    iterations: int = 100

    def eta(self, t: int) -> float:
        return self.eta0 / (t + self.offset + 1) ** self.eta_exp

    def c(self, t: int) -> float:
        return self.c0 / (t + 1) ** self.c_exp


@dataclass
class BaselineResult:
    """One baseline evaluation: the QSCI wavefunction plus its resource accounting."""

    method: str
    param: str
    wavefunction: SampledWavefunction
    n_shots: int
    cost: GateCost
    unique_sampled: int = 0

    def row(self, e_ref: float) -> list:
        return [
            self.method, self.param, self.n_shots, self.cost.two_qubit_gates, self.cost.rotation_gates,
            self.cost.total_gates, len(self.wavefunction), repr(self.wavefunction.energy),
            repr(self.wavefunction.energy - e_ref),
        ]


def baseline_csv(results: Sequence[BaselineResult], e_ref: float) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BASELINE_COLUMNS)
    for res in results:
        writer.writerow(res.row(e_ref))
    return buf.getvalue()


def split_shots(total: int, n_parts: int) -> list[int]:
    """Even split of ``total`` with the remainder going to the earliest parts."""
    if n_parts < 1:
        raise ValueError("need at least one part")
    base, extra = divmod(int(total), n_parts)
    return [base + (1 if i < extra else 0) for i in range(n_parts)]


def sample_circuits(circuits: Sequence[Circuit], total_shots: int, rng: np.random.Generator) -> ShotHistogram:
    """Sum of histograms from ``circuits`` sharing ``total_shots``; zero-shot circuits are not run."""
    hists = []
    for circ, shots in zip(circuits, split_shots(total_shots, len(circuits))):
        if shots:
            hists.append(sample(run_circuit(circ), shots, rng))
    return ShotHistogram.merged(hists)


def _max_cost(circuits: Sequence[Circuit]) -> GateCost:
    cost = GateCost(0, 0, 0)
    for circ in circuits:
        cost = cost.max(gate_cost(circ))
    return cost


def _hamiltonian(ints: MolecularIntegrals, hamiltonian: PauliHamiltonian | None) -> PauliHamiltonian:
    return hamiltonian if hamiltonian is not None else jordan_wigner(ints)


def time_evolved_circuits(cfg: TimeEvolvedConfig, h: PauliHamiltonian, ints: MolecularIntegrals) -> list[Circuit]:
    hf = hf_determinant(ints)
    return [trotter_circuit(h, k * cfg.dt, cfg.trotter_steps, hf) for k in cfg.k_list]


def time_evolved_run(
    cfg: TimeEvolvedConfig, ints: MolecularIntegrals, d_max: int, rng: np.random.Generator,
    hamiltonian: PauliHamiltonian | None = None,
) -> BaselineResult:
    circuits = time_evolved_circuits(cfg, _hamiltonian(ints, hamiltonian), ints)
    hist = sample_circuits(circuits, cfg.n_shots, rng)
    wf = qsci_from_histogram(hist, d_max, ints)
    return BaselineResult(
        f"time_evolved_{cfg.mode}", f"dt={cfg.dt:g}", wf, cfg.n_shots, _max_cost(circuits), len(hist.counts)
    )


def time_evolved_qsci(
    cfg: TimeEvolvedConfig, ints: MolecularIntegrals, d_max: int, rng: np.random.Generator,
    hamiltonian: PauliHamiltonian | None = None,
) -> SampledWavefunction:
    """QSCI on first-order Trotter evolutions ``exp(-i H k dt)`` of the HF state."""
    return time_evolved_run(cfg, ints, d_max, rng, hamiltonian).wavefunction


def sqdrift_circuits(
    cfg: SqDriftConfig, h: PauliHamiltonian, ints: MolecularIntegrals, rng: np.random.Generator
) -> list[Circuit]:
    """``randomizations`` independent qDRIFT draws for each ``t = k dt``, grouped by ``k``."""
    hf = hf_determinant(ints)
    return [
        qdrift_circuit(h, k * cfg.dt, cfg.n_excitations, rng, hf)
        for k in cfg.k_list
        for _ in range(cfg.randomizations)
    ]


def sqdrift_run(
    cfg: SqDriftConfig, ints: MolecularIntegrals, d_max: int, rng: np.random.Generator,
    hamiltonian: PauliHamiltonian | None = None,
) -> BaselineResult:
    circuits = sqdrift_circuits(cfg, _hamiltonian(ints, hamiltonian), ints, rng)
    hist = sample_circuits(circuits, cfg.n_shots, rng)
    wf = qsci_from_histogram(hist, d_max, ints)
    param = f"n_exc={cfg.n_excitations};R={cfg.randomizations}"
    return BaselineResult("sqdrift", param, wf, cfg.n_shots, _max_cost(circuits), len(hist.counts))


def sqdrift_qsci(
    cfg: SqDriftConfig, ints: MolecularIntegrals, d_max: int, rng: np.random.Generator,
    hamiltonian: PauliHamiltonian | None = None,
) -> SampledWavefunction:
    """QSCI on the merged measurements of many randomized qDRIFT evolutions of HF."""
    return sqdrift_run(cfg, ints, d_max, rng, hamiltonian).wavefunction


def exact_state_histogram(
    ground: SampledWavefunction, n_orb: int, n_shots: int, rng: np.random.Generator
) -> ShotHistogram:
    probs = ground.coefficients**2
    draws = rng.multinomial(int(n_shots), probs / probs.sum())
    counts = {
        interleave(d.alpha, d.beta, n_orb): int(c) for d, c in zip(ground.determinants, draws) if c
    }
    return ShotHistogram(counts, 2 * n_orb)


def exact_state_run(
    ints: MolecularIntegrals, n_shots: int, d_max: int, rng: np.random.Generator,
    ground: SampledWavefunction | None = None,
) -> BaselineResult:
    if ground is None:
        _, ground = fci_ground_state(ints)
    hist = exact_state_histogram(ground, ints.n_orb, n_shots, rng)
    wf = qsci_from_histogram(hist, d_max, ints)
    return BaselineResult("exact", "fci", wf, n_shots, GateCost(0, 0, 0), len(hist.counts))


def exact_state_qsci(
    ints: MolecularIntegrals, n_shots: int, d_max: int, rng: np.random.Generator,
    ground: SampledWavefunction | None = None,
) -> SampledWavefunction:
    """QSCI on determinants drawn from ``|c_x|^2`` of the exact ground state."""
    return exact_state_run(ints, n_shots, d_max, rng, ground).wavefunction


def gspgs_gradient(
    objective: Callable[[np.ndarray], float],
    theta: np.ndarray,
    c: float,
    n_perturbations: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, list[float]]:
    """Mean of symmetric simultaneous-perturbation gradients over Rademacher directions.

    Returns the estimate and the ``2 * n_perturbations`` objective values.
    """
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    values = []
    for _ in range(n_perturbations):
        delta = rng.choice([-1.0, 1.0], size=theta.shape)
        f_plus = objective(theta + c * delta)
        f_minus = objective(theta - c * delta)
        values += [f_plus, f_minus]
        # 1/delta_i == delta_i for +-1 entries
        grad += (f_plus - f_minus) / (2 * c) * delta
    return grad / n_perturbations, values


@dataclass
class GSPGSTrace:
    thetas: list[np.ndarray] = field(default_factory=list)
    grad_norms: list[float] = field(default_factory=list)
    best_energy: list[float] = field(default_factory=list)
    evaluations: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iter", "grad_norm", "best_energy"])
        for t, (g, e) in enumerate(zip(self.grad_norms, self.best_energy)):
            writer.writerow([t, repr(g), repr(e)])
        return buf.getvalue()


def circuit_objective(
    pool: OperatorPool,
    token_sequence: Sequence[int],
    ints: MolecularIntegrals,
    d_max: int,
    n_shots: int,
    rng: np.random.Generator,
) -> Callable[[np.ndarray], float]:
    """QSCI energy of the pool circuit with its angles replaced by ``theta``.

    Each call draws fresh shots from ``rng``. A histogram with no in-sector
    bitstring scores the HF energy.
    """
    paulis = [pool[k].pauli for k in token_sequence]
    hf = hf_determinant(ints)
    fallback = hf_energy(ints)

    def f(theta: np.ndarray) -> float:
        circ = Circuit(tuple(zip(paulis, np.asarray(theta, dtype=float))), hf, pool.n_qubits)
        try:
            return qsci_from_histogram(sample(run_circuit(circ), n_shots, rng), d_max, ints).energy
        except EmptySubspaceError:
            return fallback

    return f


def gspgs_optimize(
    pool: OperatorPool,
    token_sequence: Sequence[int],
    theta0: np.ndarray | None,
    sched: GSPGSSchedule,
    ints: MolecularIntegrals,
    d_max: int,
    n_shots: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, GSPGSTrace]:
    """Descend the sampled QSCI energy over circuit angles; ``theta0=None`` starts from pool angles."""
    if theta0 is None:
        theta0 = np.array([pool[k].angle for k in token_sequence])
    theta = np.array(theta0, dtype=float)
    objective = circuit_objective(pool, token_sequence, ints, d_max, n_shots, rng)
    trace = GSPGSTrace()
    best = np.inf
    for t in range(sched.iterations):
        grad, values = gspgs_gradient(objective, theta, sched.c(t), sched.n_perturbations, rng)
        trace.evaluations += len(values)
        best = min(best, *values)
        theta = theta - sched.eta(t) * grad
        trace.thetas.append(theta.copy())
        trace.grad_norms.append(float(np.linalg.norm(grad)))
        trace.best_energy.append(best)
    return theta, trace
