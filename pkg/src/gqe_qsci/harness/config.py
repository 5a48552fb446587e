"""Experiment configuration stored as a flat ``key = value`` text file.

Blank lines and ``#`` comments are ignored. Lists are comma separated.
Command-line flags override file values.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, get_args, get_origin, get_type_hints


@dataclass
class ExperimentConfig:
    fcidump: str = ""
    amps: str = ""
    out: str = "results"
    seed: int = 0
    # GQE loop
    n_circuits: int = 10
    n_shots: int = 100_000
    n_iters: int = 100
    length: int = 10
    d_max: int = 0
    amp_threshold: float = 1e-6
    # policy and GRPO
    d_model: int = 128
    n_heads: int = 4
    n_layers: int = 4
    d_ff: int = 512
    repetition_penalty: float = 1.2
    clip: float = 0.2
    updates_per_batch: int = 30
    learning_rate: float = 5e-6
    weight_decay: float = 0.01
    # baselines
    baseline: str = "time_evolved"
    te_mode: str = "single"
    te_dt: float = 1.0
    te_steps: int = 1
    sqdrift_excitations: tuple[int, ...] = (20,)
    sqdrift_randomizations: int = 500
    sqdrift_k: tuple[int, ...] = (1, 2, 3)
    baseline_shots: int = 0
    gspgs_iters: int = 100
    gspgs_perturbations: int = 5
    # shot budgets for the sampling-efficiency sweep
    shot_sweep: tuple[int, ...] = (1000, 10_000, 100_000)

    def __post_init__(self):
        if self.n_circuits < 2:
            raise ValueError("n_circuits (M) must be >= 2")
        if self.length < 1:
            raise ValueError("length (L) must be >= 1")
        if self.d_max < 0:
            raise ValueError("d_max must be >= 1, or 0 for the full sector")
        if self.n_shots < 1 or self.n_iters < 1:
            raise ValueError("n_shots and n_iters must be >= 1")

    @property
    def total_baseline_shots(self) -> int:
        """Shot budget for baselines; defaults to the whole GQE budget ``M * N_shot * N_iter``."""
        return self.baseline_shots or self.n_circuits * self.n_shots * self.n_iters

    def resolved_d_max(self, sector_size: int) -> int:
        return self.d_max or sector_size

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _convert(name: str, raw: str, hint) -> Any:
    raw = raw.strip()
    if get_origin(hint) is tuple:
        (item,) = {a for a in get_args(hint) if a is not Ellipsis}
        return tuple(item(float(v)) if item is int else item(v) for v in raw.split(",") if v.strip())
    if hint is int:
        value = float(raw)
        if value != int(value):
            raise ValueError(f"{name} must be an integer, got {raw!r}")
        return int(value)
    if hint is float:
        return float(raw)
    return raw


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    hints = get_type_hints(ExperimentConfig)
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in hints:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, value, hints[key])
    return dataclasses.replace(base or ExperimentConfig(), **values)


def load_config(path: str | Path | None, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Defaults, then the file at ``path`` (if any), then non-``None`` ``overrides``."""
    cfg = ExperimentConfig()
    if path:
        cfg = parse_config(Path(path).read_text(encoding="utf-8"), cfg)
    if overrides:
        cfg = dataclasses.replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg
