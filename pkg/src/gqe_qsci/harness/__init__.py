"""Experiment configuration, optimization loops, reports and the CLI."""

from .config import ExperimentConfig, load_config, parse_config
from .reports import CHEMICAL_PRECISION, emit_reports
from .runner import (
    Problem,
    RunRecord,
    load_problem,
    run_baseline,
    run_gqe,
    run_gspgs,
    run_random_baseline,
    shot_sweep,
)

__all__ = [
    "CHEMICAL_PRECISION",
    "ExperimentConfig",
    "Problem",
    "RunRecord",
    "emit_reports",
    "load_config",
    "load_problem",
    "parse_config",
    "run_baseline",
    "run_gqe",
    "run_gspgs",
    "run_random_baseline",
    "shot_sweep",
]
