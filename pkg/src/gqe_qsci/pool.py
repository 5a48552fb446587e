"""Discrete operator vocabulary built from excitation amplitudes.

Each surviving excitation becomes a single fixed-angle Pauli rotation: the
anti-Hermitian generator is mapped with Jordan-Wigner, parity Z letters
between the outermost acted qubits are removed, one representative string is
kept, and its coefficient times the amplitude becomes the rotation angle.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .hamiltonian.integrals import MolecularIntegrals
from .hamiltonian.pauli import PauliDict, PauliString, dict_axpy, dict_product, ladder
from .hamiltonian.slater_condon import spin_orbital_tensors

DEFAULT_THRESHOLD = 1e-6
ANGLE_CONVENTION = "angle = representative_coefficient * amplitude"


class AmplitudeFileError(ValueError):
    """Malformed amplitude file."""


@dataclass(frozen=True)
class Excitation:
    """Spin-orbital excitation ``occupied -> virtual`` with amplitude ``amplitude``.

    Indices are 0-based spin orbitals on the interleaved qubit map and are
    stored in ascending order within each tuple.
    """

    occupied: tuple[int, ...]
    virtual: tuple[int, ...]
    amplitude: float

    def __post_init__(self):
        occ, vir = tuple(int(i) for i in self.occupied), tuple(int(a) for a in self.virtual)
        if len(occ) != len(vir) or len(occ) not in (1, 2):
            raise ValueError("only single and double excitations are supported")
        if len(set(occ + vir)) != len(occ) + len(vir):
            raise ValueError(f"repeated spin orbital in {occ} -> {vir}")
        if min(occ + vir) < 0:
            raise ValueError("negative spin-orbital index")
        if list(occ) != sorted(occ) or list(vir) != sorted(vir):
            raise ValueError("indices must be ascending; use Excitation.canonical")
        if not np.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        object.__setattr__(self, "occupied", occ)
        object.__setattr__(self, "virtual", vir)
        object.__setattr__(self, "amplitude", float(self.amplitude))

    @classmethod
    def canonical(cls, occupied: Sequence[int], virtual: Sequence[int], amplitude: float) -> "Excitation":
        """Sort each index pair, flipping the amplitude sign once per transposition."""
        occ, vir = list(occupied), list(virtual)
        sign = 1.0
        if len(occ) == 2 and occ[0] > occ[1]:
            occ.reverse()
            sign = -sign
        if len(vir) == 2 and vir[0] > vir[1]:
            vir.reverse()
            sign = -sign
        return cls(tuple(occ), tuple(vir), sign * amplitude)

    @property
    def kind(self) -> str:
        return "single" if len(self.occupied) == 1 else "double"

    @property
    def key(self) -> tuple:
        return (len(self.occupied), self.occupied, self.virtual)

    def acted_qubits(self) -> tuple[int, ...]:
        return tuple(sorted(self.occupied + self.virtual))

    def label(self) -> str:
        tag = "S" if self.kind == "single" else "D"
        return " ".join([tag, *(str(i + 1) for i in self.occupied + self.virtual)])

    def is_valid_for(self, n_alpha: int, n_beta: int) -> bool:
        """True when occupied indices are filled and virtual ones empty in the HF reference."""

        def occupied_in_hf(q: int) -> bool:
            p, spin = divmod(q, 2)
            return p < (n_beta if spin else n_alpha)

        return all(occupied_in_hf(i) for i in self.occupied) and not any(
            occupied_in_hf(a) for a in self.virtual
        )

    def generator(self) -> PauliDict:
        """Jordan-Wigner image of the anti-Hermitian generator ``tau - tau^dagger``."""
        if self.kind == "single":
            (i,), (a,) = self.occupied, self.virtual
            forward = dict_product(ladder(a, True), ladder(i, False))
            backward = dict_product(ladder(i, True), ladder(a, False))
        else:
            (i, j), (a, b) = self.occupied, self.virtual
            forward = _chain([ladder(a, True), ladder(b, True), ladder(j, False), ladder(i, False)])
            backward = _chain([ladder(i, True), ladder(j, True), ladder(b, False), ladder(a, False)])
        out: PauliDict = {}
        dict_axpy(out, 1.0, forward)
        dict_axpy(out, -1.0, backward)
        return {k: v for k, v in out.items() if abs(v) > 1e-14}


def _chain(ops: list[PauliDict]) -> PauliDict:
    out = ops[0]
    for op in ops[1:]:
        out = dict_product(out, op)
    return out


@dataclass(frozen=True)
class PoolToken:
    index: int
    pauli: PauliString
    angle: float
    source: Excitation | None = None

    @property
    def is_identity(self) -> bool:
        return self.source is None

    @property
    def source_label(self) -> str:
        return "identity" if self.source is None else self.source.label()


@dataclass(frozen=True)
class OperatorPool:
    tokens: tuple[PoolToken, ...]
    n_qubits: int
    metadata: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.tokens)

    def __getitem__(self, index: int) -> PoolToken:
        return self.tokens[index]

    def gates(self, token_ids: Iterable[int]) -> tuple[tuple[PauliString, float], ...]:
        """Rotations for a sequence of pool indices (0 = identity)."""
        return tuple((self.tokens[k].pauli, self.tokens[k].angle) for k in token_ids)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["token_id", "pauli", "angle", "source"])
        for tok in self.tokens:
            writer.writerow([tok.index, tok.pauli.label, repr(tok.angle), tok.source_label])
        return buf.getvalue()


def strip_parity(p: PauliString, acted: Sequence[int]) -> PauliString:
    """Remove Z letters strictly between the lowest and highest acted qubit."""
    lo, hi = min(acted), max(acted)
    interior = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
    z_only = p.z & ~p.x
    return PauliString(p.x, p.z & ~(z_only & interior), p.n_qubits)


def representative_term(exc: Excitation, n_qubits: int) -> tuple[PauliString, float]:
    """Stripped Pauli term of largest ``|c|`` (first canonical label on ties) and its real ``c``.

    The generator is written as ``sum_l i c_l P_l`` so that
    ``exp(theta tau) ~ prod_l exp(i theta c_l P_l)``.
    """
    if max(exc.acted_qubits()) >= n_qubits:
        raise ValueError(f"excitation {exc.label()} exceeds {n_qubits} qubits")
    terms = []
    for (x, z), d in exc.generator().items():
        c = (d / 1j)
        if abs(c.imag) > 1e-12:
            raise ValueError("generator is not anti-Hermitian")
        stripped = strip_parity(PauliString(x, z, n_qubits), exc.acted_qubits())
        terms.append((stripped, float(c.real)))
    best = max(abs(c) for _, c in terms)
    ties = [(p, c) for p, c in terms if abs(abs(c) - best) < 1e-12]
    return min(ties, key=lambda t: t[0].label)


def build_pool(
    amplitudes: Iterable[Excitation], n_qubits: int, threshold: float = DEFAULT_THRESHOLD
) -> OperatorPool:
    """Identity token followed by one rotation per excitation with ``|t| > threshold``.

    Token order is singles by ``(i, a)`` then doubles by ``(i, j, a, b)``.
    """
    kept = [e for e in amplitudes if abs(e.amplitude) > threshold]
    kept.sort(key=lambda e: (len(e.occupied), e.occupied, e.virtual))
    tokens = [PoolToken(0, PauliString.identity(n_qubits), 0.0, None)]
    seen = set()
    dropped = []
    for exc in kept:
        pauli, coeff = representative_term(exc, n_qubits)
        angle = coeff * exc.amplitude
        key = (pauli.x, pauli.z, angle)
        if key in seen:
            dropped.append(exc.label())
            continue
        seen.add(key)
        tokens.append(PoolToken(len(tokens), pauli, angle, exc))
    meta = {"threshold": threshold, "angle_convention": ANGLE_CONVENTION, "duplicates_dropped": dropped}
    return OperatorPool(tuple(tokens), n_qubits, meta)


def mp2_amplitudes(ints: MolecularIntegrals, denominator_tol: float = 1e-8) -> list[Excitation]:
    """Spin-orbital MP2 doubles ``<ij||ab> / (e_i + e_j - e_a - e_b)`` on the interleaved map.

    Singles are zero at this order and are not returned; neither are doubles
    with a vanishing antisymmetrized integral.
    """
    if ints.orb_energies is None:
        raise ValueError("MP2 amplitudes need orbital energies")
    _, anti = spin_orbital_tensors(ints)
    nso = ints.n_qubits
    eps = np.repeat(ints.orb_energies, 2)
    occ = [q for q in range(nso) if (q // 2) < (ints.n_beta if q % 2 else ints.n_alpha)]
    vir = [q for q in range(nso) if q not in occ]
    out = []
    for x, i in enumerate(occ):
        for j in occ[x + 1:]:
            for y, a in enumerate(vir):
                for b in vir[y + 1:]:
                    num = anti[i, j, a, b]
                    if abs(num) < 1e-14:
                        continue
                    denom = eps[i] + eps[j] - eps[a] - eps[b]
                    if abs(denom) < denominator_tol:
                        raise ValueError(
                            f"vanishing MP2 denominator {denom:.3e} for ({i},{j})->({a},{b})"
                        )
                    out.append(Excitation((i, j), (a, b), num / denom))
    return out


def parse_amplitudes(text: str, n_qubits: int | None = None) -> list[Excitation]:
    """Read ``S i a t`` / ``D i j a b t`` lines with 1-based spin-orbital indices."""
    out: dict[tuple, Excitation] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        tag = fields[0].upper()
        expected = {"S": 4, "D": 6}.get(tag)
        if expected is None or len(fields) != expected:
            raise AmplitudeFileError(f"line {lineno}: malformed amplitude line {raw!r}")
        try:
            idx = [int(f) for f in fields[1:-1]]
            amp = float(fields[-1])
        except ValueError as exc:
            raise AmplitudeFileError(f"line {lineno}: non-numeric field in {raw!r}") from exc
        for i in idx:
            if i < 1 or (n_qubits is not None and i > n_qubits):
                raise AmplitudeFileError(f"line {lineno}: index {i} out of range")
        idx = [i - 1 for i in idx]
        half = len(idx) // 2
        try:
            exc_ = Excitation.canonical(idx[:half], idx[half:], amp)
        except ValueError as err:
            raise AmplitudeFileError(f"line {lineno}: {err}") from err
        if exc_.key in out:
            raise AmplitudeFileError(f"line {lineno}: duplicate excitation {exc_.label()}")
        out[exc_.key] = exc_
    return list(out.values())


def format_amplitudes(excitations: Iterable[Excitation]) -> str:
    return "".join(f"{e.label()} {e.amplitude!r}\n" for e in excitations)
