"""Estimator-style wrappers around the functional core.

Hyperparameters live in ``__init__`` and are exposed through
``get_params``/``set_params``; ``fit`` takes molecular integrals and stores
fitted state in trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .hamiltonian.integrals import MolecularIntegrals
from .harness.config import ExperimentConfig
from .harness.runner import load_problem, run_gqe, run_random_baseline
from .policy import sample_sequences
from .pool import OperatorPool
from .qsci import qsci_from_histogram
from .simulator import ShotHistogram
from .validation import check_integrals, check_is_fitted, check_positive_int, check_random_state


class QSCISolver(BaseEstimator):
    """Select, complete, truncate and diagonalize a measured histogram."""

    def __init__(self, d_max: int = 1000):
        self.d_max = d_max

    def fit(self, histogram: ShotHistogram, ints: MolecularIntegrals) -> "QSCISolver":
        check_positive_int(self.d_max, "d_max")
        check_integrals(ints)
        self.wavefunction_ = qsci_from_histogram(histogram, self.d_max, ints)
        self.energy_ = self.wavefunction_.energy
        return self

    def score(self, histogram: ShotHistogram, ints: MolecularIntegrals) -> float:
        """Negative QSCI energy, so larger is better."""
        return -qsci_from_histogram(histogram, self.d_max, ints).energy


class _CircuitSearch(BaseEstimator):
    def _config(self) -> ExperimentConfig:
        return ExperimentConfig(
            seed=self.random_state, n_circuits=check_positive_int(self.n_circuits, "n_circuits", 2),
            n_shots=check_positive_int(self.n_shots, "n_shots"),
            n_iters=check_positive_int(self.n_iters, "n_iters"),
            length=check_positive_int(self.length, "length"),
            d_max=check_positive_int(self.d_max, "d_max", 0),
        )

    def _store(self, record, problem) -> None:
        self.record_ = record
        self.best_tokens_ = record.best_tokens
        self.energy_ = record.best_energy
        self.e_fci_ = problem.e_fci
        self.global_energy_ = record.iterations[-1].e_global if record.iterations else float("inf")

    def score(self, ints: MolecularIntegrals | None = None) -> float:
        """Negative best-so-far QSCI energy of the fitted run."""
        check_is_fitted(self, "energy_")
        return -self.energy_


class GQEOptimizer(_CircuitSearch):
    """Train a transformer policy over an operator pool to lower the QSCI energy."""

    def __init__(self, n_circuits: int = 10, n_shots: int = 100_000, n_iters: int = 100,
                 length: int = 10, d_max: int = 0, random_state: int = 0):
        self.n_circuits = n_circuits
        self.n_shots = n_shots
        self.n_iters = n_iters
        self.length = length
        self.d_max = d_max
        self.random_state = random_state

    def fit(self, ints: MolecularIntegrals, pool: OperatorPool | None = None) -> "GQEOptimizer":
        cfg = self._config()
        problem = load_problem(cfg, check_integrals(ints), pool)
        record, self.policy_ = run_gqe(cfg, problem)
        self._store(record, problem)
        return self

    def predict(self, n_sequences: int = 10, rng=None) -> np.ndarray:
        """Draw pool-index sequences from the trained policy."""
        check_is_fitted(self, "policy_")
        batch = sample_sequences(self.policy_, n_sequences, self.length,
                                 self.policy_.cfg.repetition_penalty, check_random_state(rng))
        return batch.pool_indices()


class RandomCircuitSearch(_CircuitSearch):
    """Uniformly random pool sequences scored by the same pipeline."""

    def __init__(self, n_circuits: int = 10, n_shots: int = 100_000, n_iters: int = 100,
                 length: int = 10, d_max: int = 0, random_state: int = 0):
        self.n_circuits = n_circuits
        self.n_shots = n_shots
        self.n_iters = n_iters
        self.length = length
        self.d_max = d_max
        self.random_state = random_state

    def fit(self, ints: MolecularIntegrals, pool: OperatorPool | None = None) -> "RandomCircuitSearch":
        cfg = self._config()
        problem = load_problem(cfg, check_integrals(ints), pool)
        self._store(run_random_baseline(cfg, problem), problem)
        return self
