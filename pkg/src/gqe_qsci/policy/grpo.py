"""Autoregressive sampling and the clipped group-relative policy objective."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from .model import START_TOKEN, TransformerPolicy
from .optim import AdamState, adamw_step


@dataclass
class GRPOConfig:
    clip: float = 0.2
    updates_per_batch: int = 30
    learning_rate: float = 5e-6
    weight_decay: float = 0.01
    sigma_floor: float = 1e-8
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if not 0 < self.clip < 1:
            raise ValueError("clip must lie in (0, 1)")
        if self.updates_per_batch < 1:
            raise ValueError("updates_per_batch must be >= 1")


@dataclass
class SampledBatch:
    """``M`` token sequences (ids in ``[1, vocab)``) with the log-probabilities they were drawn with."""

    tokens: np.ndarray
    logprobs: np.ndarray
    repetition_penalty: float = 1.0
    rewards: np.ndarray | None = None
    advantages: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.tokens.shape[0]

    @property
    def length(self) -> int:
        return self.tokens.shape[1]

    def pool_indices(self) -> np.ndarray:
        """Token ids shifted to operator-pool indices."""
        return self.tokens - 1


def _penalize(logits: torch.Tensor, seen: torch.Tensor, penalty: float) -> torch.Tensor:
    if penalty != 1.0:
        scaled = torch.where(logits > 0, logits / penalty, logits * penalty)
        logits = torch.where(seen, scaled, logits)
    mask = torch.zeros(logits.shape[-1], dtype=torch.bool)
    mask[START_TOKEN] = True
    return logits.masked_fill(mask, float("-inf"))


def sequence_logprobs(policy: TransformerPolicy, tokens: torch.Tensor, penalty: float) -> torch.Tensor:
    """Per-step ``log pi(s_t | q, s_<t)`` under the penalized, start-masked distribution."""
    m, length = tokens.shape
    start = torch.full((m, 1), START_TOKEN, dtype=torch.long)
    inputs = torch.cat([start, tokens[:, :-1]], dim=1)
    logits = policy(inputs)
    onehot = torch.nn.functional.one_hot(tokens, policy.cfg.vocab_size).to(torch.bool)
    # seen[b, t] marks tokens emitted strictly before step t
    seen = torch.cumsum(onehot.to(torch.int64), dim=1) > 0
    seen = torch.cat([torch.zeros_like(seen[:, :1]), seen[:, :-1]], dim=1)
    logp = torch.log_softmax(_penalize(logits, seen, penalty), dim=-1)
    return logp.gather(-1, tokens.unsqueeze(-1)).squeeze(-1)


def sample_sequences(
    policy: TransformerPolicy,
    n_sequences: int,
    length: int,
    repetition_penalty: float,
    rng: np.random.Generator,
) -> SampledBatch:
    if n_sequences < 2:
        raise ValueError("a group needs at least two sequences")
    if length + 1 > policy.cfg.context_len:
        raise ValueError("sequence length exceeds the policy context")
    vocab = policy.cfg.vocab_size
    tokens = torch.full((n_sequences, 1), START_TOKEN, dtype=torch.long)
    seen = torch.zeros(n_sequences, vocab, dtype=torch.bool)
    logprobs = np.zeros((n_sequences, length))
    with torch.no_grad():
        for t in range(length):
            logits = policy(tokens)[:, -1]
            logp = torch.log_softmax(_penalize(logits, seen, repetition_penalty), dim=-1).numpy()
            probs = np.exp(logp)
            cdf = np.cumsum(probs, axis=1)
            u = rng.random(n_sequences) * cdf[:, -1]
            nxt = np.minimum((cdf < u[:, None]).sum(axis=1), vocab - 1)
            logprobs[:, t] = logp[np.arange(n_sequences), nxt]
            nxt_t = torch.from_numpy(nxt.astype(np.int64))
            seen[torch.arange(n_sequences), nxt_t] = True
            tokens = torch.cat([tokens, nxt_t[:, None]], dim=1)
    return SampledBatch(tokens[:, 1:].numpy().copy(), logprobs, repetition_penalty)


def compute_advantages(rewards, sigma_floor: float = 1e-8) -> np.ndarray:
    """Group-normalized advantages ``(r - mean) / std`` (population std); zeros if std < floor."""
    r = np.asarray(rewards, dtype=float)
    if r.ndim != 1 or r.size < 2:
        raise ValueError("need a 1-D group of at least two rewards")
    centered = r - r.mean()
    sigma = np.sqrt(np.mean(centered**2))
    if sigma < sigma_floor:
        return np.zeros_like(r)
    return centered / sigma


def grpo_loss(
    policy: TransformerPolicy, old_logprobs: np.ndarray, batch: SampledBatch, cfg: GRPOConfig
) -> torch.Tensor:
    if batch.advantages is None:
        raise ValueError("batch advantages are not set")
    tokens = torch.from_numpy(np.asarray(batch.tokens, dtype=np.int64))
    logp = sequence_logprobs(policy, tokens, batch.repetition_penalty)
    ratio = torch.exp(logp - torch.from_numpy(np.asarray(old_logprobs, dtype=np.float64)))
    adv = torch.from_numpy(np.asarray(batch.advantages, dtype=np.float64))[:, None]
    unclipped = ratio * adv
    clipped = torch.clamp(ratio, 1 - cfg.clip, 1 + cfg.clip) * adv
    # ties take the unclipped branch so the subgradient is well defined
    objective = torch.where(unclipped <= clipped, unclipped, clipped)
    return -objective.mean()


def grpo_loss_and_grad(
    policy: TransformerPolicy, old_logprobs: np.ndarray, batch: SampledBatch, cfg: GRPOConfig
) -> tuple[float, np.ndarray]:
    policy.zero_grad(set_to_none=True)
    loss = grpo_loss(policy, old_logprobs, batch, cfg)
    if not torch.isfinite(loss):
        raise FloatingPointError("GRPO loss is not finite")
    loss.backward()
    grad = policy.flat_grad()
    if not np.all(np.isfinite(grad)):
        raise FloatingPointError("GRPO gradient is not finite")
    return float(loss.detach()), grad


def grpo_update(
    policy: TransformerPolicy, batch: SampledBatch, cfg: GRPOConfig, state: AdamState
) -> list[float]:
    """Run ``cfg.updates_per_batch`` AdamW steps against the frozen sampling log-probs.

    A degenerate group (all advantages zero) leaves the parameters untouched.
    """
    if batch.advantages is None:
        raise ValueError("batch advantages are not set")
    if not np.any(batch.advantages):
        return []
    old = np.array(batch.logprobs, copy=True)
    decay = policy.decay_mask()
    losses = []
    params = policy.get_flat()
    for _ in range(cfg.updates_per_batch):
        loss, grad = grpo_loss_and_grad(policy, old, batch, cfg)
        losses.append(loss)
        params = adamw_step(params, grad, state, cfg, decay)
        policy.set_flat(params)
    return losses
