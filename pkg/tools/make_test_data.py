"""Regenerate the molecular test inputs under tests/data with PySCF.

Writes an H4 chain (STO-3G, 8 qubits) FCIDUMP with orbital energies and, with
``--n2``, N2 STO-3G (10e, 8o) active-space FCIDUMPs and CCSD amplitude files
at three bond lengths. PySCF is only needed here, not by the package.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np
from pyscf import ao2mo, cc, gto, mcscf, scf
from pyscf.cc.addons import spatial2spin

from gqe_qsci.hamiltonian import MolecularIntegrals, format_fcidump
from gqe_qsci.pool import Excitation, format_amplitudes

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"


def h4_chain(spacing: float = 1.2):
    mol = gto.M(atom=[("H", (0, 0, i * spacing)) for i in range(4)], basis="sto-3g", unit="Angstrom")
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    h2 = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])
    mycc = cc.CCSD(mf).run(conv_tol=1e-10)
    return MolecularIntegrals(4, 2, 2, mol.energy_nuc(), h1, h2, mf.mo_energy), mycc


def n2_active(bond: float, ncore: int = 2, ncas: int = 8):
    mol = gto.M(atom=f"N 0 0 0; N 0 0 {bond}", basis="sto-3g", unit="Angstrom")
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    cas = mcscf.CASCI(mf, ncas, 10)
    cas.ncore = ncore
    h1, e_core = cas.get_h1eff()
    h2 = ao2mo.restore(1, cas.get_h2eff(), ncas)
    eps = mf.mo_energy[ncore:ncore + ncas]
    ints = MolecularIntegrals(ncas, 5, 5, e_core, h1, h2, eps)
    mycc = cc.CCSD(mf, frozen=ncore)
    mycc.max_cycle = 500
    mycc.run(conv_tol=1e-10)
    if not mycc.converged:
        raise RuntimeError(f"CCSD did not converge at R = {bond}")
    return ints, mycc


def ccsd_excitations(mycc, nocc: int) -> list[Excitation]:
    """Spin-orbital CCSD amplitudes on the interleaved map (qubit 2p alpha, 2p+1 beta)."""
    t1 = spatial2spin(mycc.t1)
    t2 = spatial2spin(mycc.t2)
    nocc_so = 2 * nocc
    out = []
    for i in range(nocc_so):
        for a in range(t1.shape[1]):
            out.append(Excitation((i,), (nocc_so + a,), t1[i, a]))
    for i in range(nocc_so):
        for j in range(i + 1, nocc_so):
            for a in range(t2.shape[2]):
                for b in range(a + 1, t2.shape[3]):
                    out.append(Excitation((i, j), (nocc_so + a, nocc_so + b), t2[i, j, a, b]))
    return [e for e in out if abs(e.amplitude) > 1e-12]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n2", action="store_true", help="also write the N2 (10e, 8o) inputs")
    args = ap.parse_args()
    DATA.mkdir(parents=True, exist_ok=True)
    ints, mycc = h4_chain()
    (DATA / "h4_chain_sto3g.fcidump").write_text(format_fcidump(ints))
    (DATA / "h4_chain_sto3g_ccsd.amps").write_text(format_amplitudes(ccsd_excitations(mycc, 2)))
    if args.n2:
        for bond in (1.1, 1.8, 2.5):
            ints, mycc = n2_active(bond)
            tag = f"n2_{bond:.1f}".replace(".", "p")
            (DATA / f"{tag}.fcidump").write_text(format_fcidump(ints))
            (DATA / f"{tag}_ccsd.amps").write_text(format_amplitudes(ccsd_excitations(mycc, 5)))


if __name__ == "__main__":
    main()
