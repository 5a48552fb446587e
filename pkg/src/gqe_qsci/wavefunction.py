"""Sparse determinant-expansion wavefunctions and their CSV form."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .hamiltonian.determinants import Determinant


@dataclass(frozen=True, eq=False)
class SampledWavefunction:
    """``|psi> = sum_x a_x |x>`` over a finite determinant support, plus its energy."""

    determinants: tuple[Determinant, ...]
    coefficients: np.ndarray
    energy: float

    def __post_init__(self):
        dets = tuple(Determinant(int(d[0]), int(d[1])) for d in self.determinants)
        coeffs = np.array(self.coefficients, dtype=float)
        if coeffs.shape != (len(dets),):
            raise ValueError("one coefficient per determinant required")
        if len(set(dets)) != len(dets):
            raise ValueError("duplicate determinants in wavefunction")
        coeffs.setflags(write=False)
        object.__setattr__(self, "determinants", dets)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "energy", float(self.energy))

    def __len__(self) -> int:
        return len(self.determinants)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def as_dict(self) -> dict[Determinant, float]:
        return dict(zip(self.determinants, self.coefficients.tolist()))

    def sector(self) -> tuple[int, int] | None:
        return self.determinants[0].counts() if self.determinants else None

    def overlap(self, other: "SampledWavefunction") -> float:
        mine = self.as_dict()
        return float(sum(mine.get(d, 0.0) * c for d, c in zip(other.determinants, other.coefficients)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"energy={self.energy!r}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["alpha_hex", "beta_hex", "coefficient"])
        for det, c in zip(self.determinants, self.coefficients):
            writer.writerow([f"{det.alpha:x}", f"{det.beta:x}", repr(float(c))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampledWavefunction":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("energy="):
            raise ValueError("missing 'energy=<value>' header line")
        energy = float(lines[0].split("=", 1)[1])
        reader = csv.DictReader(lines[1:])
        dets, coeffs = [], []
        for row in reader:
            dets.append(Determinant(int(row["alpha_hex"], 16), int(row["beta_hex"], 16)))
            coeffs.append(float(row["coefficient"]))
        return cls(tuple(dets), np.array(coeffs), energy)
