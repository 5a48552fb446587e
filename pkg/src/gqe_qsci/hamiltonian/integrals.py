"""Molecular integrals and the Molpro FCIDUMP text format."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np

SYMMETRY_TOL = 1e-10


class FCIDumpError(ValueError):
    """Raised for malformed FCIDUMP input."""


@dataclass(frozen=True, eq=False)
class MolecularIntegrals:
    """Active-space Hamiltonian in a spatial-orbital basis.

    ``h2`` is stored as a dense 4-index array in chemists' notation, i.e.
    ``h2[p, q, r, s] = (pq|rs)``, with the 8-fold permutational symmetry
    already expanded. All energies are in Hartree.
    """

    n_orb: int
    n_alpha: int
    n_beta: int
    e_core: float
    h1: np.ndarray
    h2: np.ndarray
    orb_energies: np.ndarray | None = None

    def __post_init__(self):
        h1 = np.array(self.h1, dtype=float)
        h2 = np.array(self.h2, dtype=float)
        n = self.n_orb
        if h1.shape != (n, n):
            raise ValueError(f"h1 must have shape ({n}, {n}), got {h1.shape}")
        if h2.shape != (n, n, n, n):
            raise ValueError(f"h2 must have shape ({n},)*4, got {h2.shape}")
        if not (0 <= self.n_alpha <= n and 0 <= self.n_beta <= n):
            raise ValueError(
                f"electron counts ({self.n_alpha}, {self.n_beta}) incompatible with {n} orbitals"
            )
        if not np.allclose(h1, h1.T, atol=SYMMETRY_TOL, rtol=0):
            raise ValueError("h1 is not symmetric")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(h2, h2.transpose(perm), atol=SYMMETRY_TOL, rtol=0):
                raise ValueError("h2 lacks 8-fold permutational symmetry")
        h1.setflags(write=False)
        h2.setflags(write=False)
        object.__setattr__(self, "h1", h1)
        object.__setattr__(self, "h2", h2)
        object.__setattr__(self, "e_core", float(self.e_core))
        if self.orb_energies is not None:
            eps = np.array(self.orb_energies, dtype=float)
            if eps.shape != (n,):
                raise ValueError(f"orb_energies must have shape ({n},), got {eps.shape}")
            eps.setflags(write=False)
            object.__setattr__(self, "orb_energies", eps)

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_orb

    @property
    def sector(self) -> tuple[int, int]:
        return (self.n_alpha, self.n_beta)


def _symmetrize_h2(h2: np.ndarray, i: int, j: int, k: int, l: int, value: float) -> None:
    for a, b, c, d in (
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    ):
        h2[a, b, c, d] = value


def _header_int(header: str, key: str, default: int | None = None) -> int:
    match = re.search(rf"\b{key}\s*=\s*([-+]?\d+)", header, flags=re.IGNORECASE)
    if match is None:
        if default is None:
            raise FCIDumpError(f"FCIDUMP header is missing {key}")
        return default
    return int(match.group(1))


def parse_fcidump(source: str | bytes | IO | Iterable[str]) -> MolecularIntegrals:
    """Parse FCIDUMP text into :class:`MolecularIntegrals`.

    Accepts the file content as ``str``/``bytes`` or any iterable of lines.
    Orbital-energy lines (``e i 0 0 0``) are kept; ORBSYM and ISYM are ignored.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [ln.decode("utf-8") if isinstance(ln, bytes) else ln for ln in source]

    header_parts = []
    body_start = None
    for lineno, line in enumerate(lines):
        header_parts.append(line)
        stripped = line.strip()
        if re.search(r"&END\b", stripped, flags=re.IGNORECASE) or stripped == "/" or stripped.endswith("/"):
            body_start = lineno + 1
            break
    if body_start is None or not re.search(r"&FCI\b", "\n".join(header_parts), flags=re.IGNORECASE):
        raise FCIDumpError("FCIDUMP namelist header (&FCI ... &END) not found")
    header = " ".join(header_parts)
    norb = _header_int(header, "NORB")
    nelec = _header_int(header, "NELEC")
    ms2 = _header_int(header, "MS2", default=0)
    if norb <= 0:
        raise FCIDumpError(f"NORB must be positive, got {norb}")
    if (nelec + ms2) % 2 or nelec < abs(ms2):
        raise FCIDumpError(f"inconsistent NELEC={nelec}, MS2={ms2}")
    n_alpha, n_beta = (nelec + ms2) // 2, (nelec - ms2) // 2

    h1 = np.zeros((norb, norb))
    h2 = np.zeros((norb,) * 4)
    eps = np.zeros(norb)
    have_eps = False
    e_core = 0.0
    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 5:
            raise FCIDumpError(f"line {lineno}: expected 'value i j k l', got {line!r}")
        try:
            value = float(fields[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(f) for f in fields[1:])
        except ValueError as exc:
            raise FCIDumpError(f"line {lineno}: non-numeric field in {line!r}") from exc
        for idx in (i, j, k, l):
            if not 0 <= idx <= norb:
                raise FCIDumpError(f"line {lineno}: index {idx} outside [0, {norb}]")
        if i and j and k and l:
            _symmetrize_h2(h2, i - 1, j - 1, k - 1, l - 1, value)
        elif i and j and not k and not l:
            h1[i - 1, j - 1] = h1[j - 1, i - 1] = value
        elif i and not j and not k and not l:
            eps[i - 1] = value
            have_eps = True
        elif not (i or j or k or l):
            e_core = value
        else:
            raise FCIDumpError(f"line {lineno}: unsupported index pattern {i} {j} {k} {l}")

    return MolecularIntegrals(
        n_orb=norb,
        n_alpha=n_alpha,
        n_beta=n_beta,
        e_core=e_core,
        h1=h1,
        h2=h2,
        orb_energies=eps if have_eps else None,
    )


def load_fcidump(path: str | Path) -> MolecularIntegrals:
    return parse_fcidump(Path(path).read_text(encoding="utf-8"))


def format_fcidump(ints: MolecularIntegrals, tol: float = 1e-15) -> str:
    """Serialize integrals back to FCIDUMP text (unique index quadruples only)."""
    n = ints.n_orb
    out = [
        f" &FCI NORB={n:4d},NELEC={ints.n_alpha + ints.n_beta:2d},MS2={ints.n_alpha - ints.n_beta},",
        "  ORBSYM=" + "1," * n,
        "  ISYM=1,",
        " &END",
    ]
    fmt = "{: .16e} {:4d} {:4d} {:4d} {:4d}"
    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(n):
                for l in range(k + 1):
                    if k * (k + 1) // 2 + l > ij:
                        continue
                    v = ints.h2[i, j, k, l]
                    if abs(v) > tol:
                        out.append(fmt.format(v, i + 1, j + 1, k + 1, l + 1))
    for i in range(n):
        for j in range(i + 1):
            if abs(ints.h1[i, j]) > tol:
                out.append(fmt.format(ints.h1[i, j], i + 1, j + 1, 0, 0))
    if ints.orb_energies is not None:
        for i, e in enumerate(ints.orb_energies):
            out.append(fmt.format(e, i + 1, 0, 0, 0))
    out.append(fmt.format(ints.e_core, 0, 0, 0, 0))
    return "\n".join(out) + "\n"


def random_integrals(
    n_orb: int,
    n_alpha: int,
    n_beta: int,
    rng: np.random.Generator,
    scale: float = 0.5,
    with_orbital_energies: bool = False,
) -> MolecularIntegrals:
    """Draw random real integrals with the full 8-fold symmetry.

    The two-electron tensor is a Gram-type construction so it stays positive
    semidefinite as a (pq),(rs) matrix, like physical repulsion integrals.
    """
    a = rng.normal(size=(n_orb, n_orb))
    h1 = -np.eye(n_orb) * np.arange(1, n_orb + 1) + scale * (a + a.T) / 2
    npair = n_orb * n_orb
    b = rng.normal(size=(npair, npair)) * scale / np.sqrt(npair)
    g = (b @ b.T).reshape(n_orb, n_orb, n_orb, n_orb)
    # enforce (pq|rs) = (qp|rs) = (pq|sr); (rs|pq) then follows from the Gram form
    g = (g + g.transpose(1, 0, 2, 3)) / 2
    g = (g + g.transpose(0, 1, 3, 2)) / 2
    g = (g + g.transpose(2, 3, 0, 1)) / 2
    eps = None
    if with_orbital_energies:
        eps = np.sort(np.diag(h1)) + np.linspace(0, 0.1, n_orb)
    return MolecularIntegrals(
        n_orb=n_orb,
        n_alpha=n_alpha,
        n_beta=n_beta,
        e_core=float(rng.normal()),
        h1=h1,
        h2=g,
        orb_energies=eps,
    )
