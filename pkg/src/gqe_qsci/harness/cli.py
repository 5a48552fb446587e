"""Command-line entry point.

    gqe-qsci fci --fcidump h4.fcidump
    gqe-qsci run-gqe --config run.cfg --seed 3 --out results/
    gqe-qsci report --out results/
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..hamiltonian import fci_ground_state, hf_energy, load_fcidump
from ..policy import save_checkpoint
from ..qsci import qsci_from_histogram
from ..rng import make_rng
from ..simulator import Circuit, run_circuit, sample
from .config import load_config
from .reports import emit_reports
from .runner import RunRecord, load_problem, run_baseline, run_gqe, run_gspgs, run_random_baseline, shot_sweep

RECORD_GLOB = "record_*.json"


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fcidump", help="FCIDUMP integral file")
    p.add_argument("--amps", help="excitation amplitude file (default: MP2 doubles)")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--d-max", dest="d_max", type=int, help="determinant cap (0 = whole sector)")
    p.add_argument("--shots", dest="n_shots", type=int, help="shots per circuit")
    p.add_argument("--iters", dest="n_iters", type=int)
    p.add_argument("--length", type=int, help="circuit length L")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gqe-qsci", description="Generative circuit search for QSCI")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("fci", "exact ground state of the active space"),
        ("pool-build", "write the operator pool as CSV"),
        ("qsci-once", "sample one circuit and diagonalize"),
        ("run-gqe", "policy-driven circuit optimization"),
        ("run-random", "uniformly random circuit control"),
        ("run-baseline", "time-evolved, SqDRIFT, exact-state or GSPGS baseline"),
        ("report", "emit CSV reports from saved records"),
    ]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "qsci-once":
            p.add_argument("--circuit", help="circuit text file (default: the HF determinant)")
        if name == "run-baseline":
            p.add_argument("--which", choices=["time_evolved", "sqdrift", "exact", "gspgs"])
            p.add_argument("--tokens", help="comma-separated pool indices for gspgs")
    return parser


def _config(args: argparse.Namespace):
    keys = ("fcidump", "amps", "seed", "out", "d_max", "n_shots", "n_iters", "length")
    return load_config(args.config, {k: getattr(args, k) for k in keys})


def _save(record: RunRecord, out: Path) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"record_{record.method}_seed{record.seed}.json"
    path.write_text(record.to_json(), encoding="utf-8")
    if record.refinement_trace:
        (out / f"refinement_{record.method}_seed{record.seed}.csv").write_text(record.refinement_trace)
    return path


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    cfg = _config(args)
    out = Path(cfg.out)

    if args.command == "fci":
        ints = load_fcidump(cfg.fcidump)
        e0, wf = fci_ground_state(ints)
        print(f"E_FCI = {e0:.12f}\nE_HF = {hf_energy(ints):.12f}\nsector_size = {len(wf)}")
        if args.out:
            out.mkdir(parents=True, exist_ok=True)
            (out / "fci_wavefunction.csv").write_text(wf.to_csv())
        return 0

    if args.command == "report":
        paths = sorted(out.glob(RECORD_GLOB))
        if not paths:
            print(f"no records in {out}", file=sys.stderr)
            return 1
        records = [RunRecord.from_json(p.read_text(encoding="utf-8")) for p in paths]
        for name, path in emit_reports(records, out).items():
            print(f"{name}: {path}")
        return 0

    problem = load_problem(cfg)

    if args.command == "pool-build":
        text = problem.pool.to_csv()
        if args.out:
            out.mkdir(parents=True, exist_ok=True)
            (out / "pool.csv").write_text(text)
        else:
            sys.stdout.write(text)
        return 0

    if args.command == "qsci-once":
        if args.circuit:
            circ = Circuit.from_text(Path(args.circuit).read_text(encoding="utf-8"))
        else:
            circ = problem.circuit([])
        hist = sample(run_circuit(circ), cfg.n_shots, make_rng(cfg.seed))
        wf = qsci_from_histogram(hist, problem.d_max, problem.ints)
        print(f"energy = {wf.energy:.12f}\nerror = {wf.energy - problem.e_fci:.3e}\nn_dets = {len(wf)}")
        if args.out:
            out.mkdir(parents=True, exist_ok=True)
            (out / "qsci_wavefunction.csv").write_text(wf.to_csv())
        return 0

    if args.command == "run-gqe":
        record, policy = run_gqe(cfg, problem)
        shot_sweep(cfg, problem, record)
        out.mkdir(parents=True, exist_ok=True)
        save_checkpoint(policy, out / f"policy_seed{cfg.seed}.bin")
        (out / f"best_circuit_seed{cfg.seed}.txt").write_text(problem.circuit(record.best_tokens or []).to_text())
    elif args.command == "run-random":
        record = run_random_baseline(cfg, problem)
        shot_sweep(cfg, problem, record)
    else:
        which = args.which or cfg.baseline
        if which == "gspgs":
            if not args.tokens:
                print("gspgs needs --tokens", file=sys.stderr)
                return 2
            record = run_gspgs(cfg, [int(t) for t in args.tokens.split(",")], problem)
        else:
            record = run_baseline(cfg, which, problem)
    path = _save(record, out)
    (out / "config.txt").write_text(cfg.to_text())
    emit_reports([RunRecord.from_json(p.read_text()) for p in sorted(out.glob(RECORD_GLOB))], out)
    print(json.dumps({"record": str(path), "best_energy": record.best_energy,
                      "error": record.best_energy - record.e_fci}))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
