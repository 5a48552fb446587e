from pathlib import Path

import numpy as np
import pytest

from gqe_qsci.hamiltonian import load_fcidump, random_integrals

DATA = Path(__file__).parent / "data"

# references computed once with PySCF (RHF/FCI/MP2/CASCI) and frozen here
H4_FCI = -2.1026084809554195
H4_HF = -2.0038674831266947
H4_MP2_CORR = -0.055637418668839644
N2_CASCI = {1.1: -107.65382718819276, 1.8: -107.48338325261858, 2.5: -107.44040879793033}


@pytest.fixture(scope="session")
def h4():
    return load_fcidump(DATA / "h4_chain_sto3g.fcidump")


@pytest.fixture(scope="session")
def h4_amps_path():
    return DATA / "h4_chain_sto3g_ccsd.amps"


@pytest.fixture
def toy():
    """Random 3-orbital, (2, 1)-electron system (6 qubits)."""
    return random_integrals(3, 2, 1, np.random.default_rng(7), with_orbital_energies=True)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one ``CRITERION k: PASS|FAIL|SKIP`` line for the terminal summary."""

    def report(key: str, ok: bool | None, detail: str) -> bool:
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        line = f"CRITERION {key}: {status} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return bool(ok)

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
