"""AdamW on flat parameter vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class AdamState:
    m: np.ndarray | None = None
    v: np.ndarray | None = None
    step: int = 0


def adamw_step(params: np.ndarray, grad: np.ndarray, state: AdamState, cfg, decay_mask=None) -> np.ndarray:
    """One decoupled-weight-decay Adam update; advances ``state.step`` in place.

    ``cfg`` supplies ``learning_rate``, ``weight_decay``, ``beta1``, ``beta2`` and
    ``eps``. Weight decay only touches entries where ``decay_mask`` is true.
    """
    params = np.asarray(params, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if params.shape != grad.shape:
        raise ValueError(f"shape mismatch: params {params.shape} vs grad {grad.shape}")
    if state.m is None:
        state.m = np.zeros_like(params)
        state.v = np.zeros_like(params)
    elif state.m.shape != params.shape:
        raise ValueError("optimizer state does not match parameter shape")
    state.step += 1
    t = state.step
    lr = cfg.learning_rate
    state.m = cfg.beta1 * state.m + (1 - cfg.beta1) * grad
    state.v = cfg.beta2 * state.v + (1 - cfg.beta2) * grad**2
    m_hat = state.m / (1 - cfg.beta1**t)
    v_hat = state.v / (1 - cfg.beta2**t)
    decay = cfg.weight_decay if decay_mask is None else cfg.weight_decay * np.asarray(decay_mask, dtype=float)
    return params * (1 - lr * decay) - lr * m_hat / (np.sqrt(v_hat) + cfg.eps)
