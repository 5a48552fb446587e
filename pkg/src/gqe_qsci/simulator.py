"""Statevector simulation of Pauli-rotation circuits.

Every gate is ``exp(i * angle * P)`` for a Pauli string ``P``. Because ``P``
squares to the identity the rotation is applied as
``cos(angle) psi + i sin(angle) P psi`` directly on the amplitude array;
:func:`gate_cost` accounts for the CX-ladder decomposition separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .hamiltonian.determinants import Determinant, interleave
from .hamiltonian.pauli import PauliHamiltonian, PauliString

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Statevector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, index: int, n_qubits: int) -> "Statevector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps, n_qubits)

    @classmethod
    def from_determinant(cls, det: Determinant, n_orb: int) -> "Statevector":
        return cls.basis(interleave(det.alpha, det.beta, n_orb), 2 * n_orb)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class Circuit:
    """Ordered Pauli rotations acting on the basis state of ``initial``."""

    gates: tuple[tuple[PauliString, float], ...]
    initial: Determinant
    n_qubits: int

    def __post_init__(self):
        gates = tuple((p, float(a)) for p, a in self.gates)
        for p, angle in gates:
            if p.n_qubits != self.n_qubits:
                raise ValueError(f"gate {p.label} does not act on {self.n_qubits} qubits")
            if not math.isfinite(angle):
                raise ValueError("gate angle must be finite")
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "initial", Determinant(*self.initial))

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        return Circuit(self.gates + other.gates, self.initial, self.n_qubits)

    def to_text(self) -> str:
        lines = [f"{self.initial.alpha:x} {self.initial.beta:x}"]
        lines += [f"{p.label} {angle!r}" for p, angle in self.gates]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not rows or len(rows[0]) != 2:
            raise ValueError("first line must be '<alpha_hex> <beta_hex>'")
        initial = Determinant(int(rows[0][0], 16), int(rows[0][1], 16))
        gates = []
        for row in rows[1:]:
            if len(row) != 2:
                raise ValueError(f"malformed gate line {' '.join(row)!r}")
            gates.append((PauliString.from_label(row[0]), float(row[1])))
        if not gates:
            raise ValueError("cannot infer qubit count from an empty gate list")
        return cls(tuple(gates), initial, gates[0][0].n_qubits)


@dataclass(frozen=True)
class GateCost:
    two_qubit_gates: int = 0
    rotation_gates: int = 0
    total_gates: int = 0

    def __add__(self, other: "GateCost") -> "GateCost":
        return GateCost(
            self.two_qubit_gates + other.two_qubit_gates,
            self.rotation_gates + other.rotation_gates,
            self.total_gates + other.total_gates,
        )

    def max(self, other: "GateCost") -> "GateCost":
        return GateCost(
            max(self.two_qubit_gates, other.two_qubit_gates),
            max(self.rotation_gates, other.rotation_gates),
            max(self.total_gates, other.total_gates),
        )


@dataclass
class ShotHistogram:
    """Measurement outcomes keyed by computational-basis index (qubit q = bit q)."""

    counts: dict[int, int] = field(default_factory=dict)
    n_qubits: int = 0

    @property
    def n_shots(self) -> int:
        return sum(self.counts.values())

    def merge(self, other: "ShotHistogram") -> "ShotHistogram":
        out = dict(self.counts)
        for k, v in other.counts.items():
            out[k] = out.get(k, 0) + v
        return ShotHistogram(out, max(self.n_qubits, other.n_qubits))

    @classmethod
    def merged(cls, histograms: Iterable["ShotHistogram"]) -> "ShotHistogram":
        counts: dict[int, int] = {}
        n_qubits = 0
        for h in histograms:
            n_qubits = max(n_qubits, h.n_qubits)
            for k, v in h.counts.items():
                counts[k] = counts.get(k, 0) + v
        return cls(counts, n_qubits)

    def bitstrings(self) -> dict[str, int]:
        return {format(k, f"0{self.n_qubits}b"): v for k, v in self.counts.items()}


@lru_cache(maxsize=8)
def _basis_indices(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    idx.setflags(write=False)
    return idx


def _apply_pauli(amps: np.ndarray, p: PauliString) -> np.ndarray:
    idx = _basis_indices(p.n_qubits)
    src = idx ^ p.x
    return p.phases(src) * amps[src]


def apply_pauli_rotation(state: Statevector, p: PauliString, angle: float) -> Statevector:
    """Return ``exp(i * angle * P) |state>``."""
    if p.n_qubits != state.n_qubits:
        raise ValueError(f"Pauli acts on {p.n_qubits} qubits, state has {state.n_qubits}")
    return Statevector(_rotate(state.amplitudes, p, angle), state.n_qubits)


def _rotate(amps: np.ndarray, p: PauliString, angle: float) -> np.ndarray:
    if p.is_identity():
        return amps * complex(math.cos(angle), math.sin(angle))
    if angle == 0.0:
        return amps.copy()
    return math.cos(angle) * amps + (1j * math.sin(angle)) * _apply_pauli(amps, p)


def run_circuit(circuit: Circuit) -> Statevector:
    amps = np.zeros(1 << circuit.n_qubits, dtype=complex)
    amps[interleave(circuit.initial.alpha, circuit.initial.beta, circuit.n_qubits // 2)] = 1.0
    for p, angle in circuit.gates:
        amps = _rotate(amps, p, angle)
    return Statevector(amps, circuit.n_qubits)


def trotter_order(h: PauliHamiltonian) -> list[tuple[float, PauliString]]:
    """Non-identity terms by descending ``|c|``, ties by canonical label."""
    return sorted(h.non_identity_terms(), key=lambda t: (-abs(t[0]), t[1].label))


def trotter_circuit(
    h: PauliHamiltonian, t: float, steps: int = 1, initial: Determinant = Determinant(0, 0)
) -> Circuit:
    """First-order product formula for ``exp(-i H t)`` (identity term dropped as a global phase)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if t == 0:
        return Circuit((), initial, h.n_qubits)
    layer = [(p, -c * t / steps) for c, p in trotter_order(h)]
    return Circuit(tuple(layer) * steps, initial, h.n_qubits)


def qdrift_circuit(
    h: PauliHamiltonian,
    t: float,
    n_samples: int,
    rng: np.random.Generator,
    initial: Determinant = Determinant(0, 0),
) -> Circuit:
    """Randomized product of ``n_samples`` rotations drawn with probability ``|c_j| / lambda``.

    Every gate is ``exp(-i sign(c_j) lambda t / n_samples P_j)``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    terms = h.non_identity_terms()
    if not terms:
        raise ValueError("qDRIFT needs at least one non-identity term")
    coeffs = np.array([c for c, _ in terms])
    lam = float(np.abs(coeffs).sum())
    if lam == 0.0:
        raise ValueError("all non-identity coefficients vanish")
    probs = np.abs(coeffs) / lam
    picks = rng.choice(len(terms), size=n_samples, p=probs)
    tau = lam * t / n_samples
    gates = tuple((terms[j][1], -math.copysign(tau, coeffs[j])) for j in picks)
    return Circuit(gates, initial, h.n_qubits)


def sample(state: Statevector, n_shots: int, rng: np.random.Generator) -> ShotHistogram:
    """Multinomial computational-basis measurement of ``state``."""
    probs = state.probabilities()
    total = probs.sum()
    if not abs(total - 1.0) < 1e-8:
        raise ValueError(f"state is not normalized (norm^2 = {total})")
    probs = probs / total
    draws = rng.multinomial(int(n_shots), probs)
    nz = np.nonzero(draws)[0]
    return ShotHistogram({int(i): int(draws[i]) for i in nz}, state.n_qubits)


def gate_cost(circuit: Circuit | Sequence[tuple[PauliString, float]]) -> GateCost:
    """Pre-synthesis counts for a CX-ladder decomposition with all-to-all connectivity.

    A weight-``w`` rotation needs ``2(w - 1)`` CX gates, one Rz and two basis-change
    Cliffords per X or Y letter. Identity gates are free.
    """
    gates = circuit.gates if isinstance(circuit, Circuit) else circuit
    two = rot = total = 0
    for p, _ in gates:
        w = p.weight
        if w == 0:
            continue
        cx = 2 * (w - 1)
        two += cx
        rot += 1
        total += cx + 1 + 2 * (p.count("X") + p.count("Y"))
    return GateCost(two, rot, total)
