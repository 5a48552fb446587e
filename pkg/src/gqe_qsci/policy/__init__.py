"""Transformer policy over operator-pool tokens and its GRPO training step."""

from .checkpoint import load_checkpoint, save_checkpoint
from .grpo import (
    GRPOConfig,
    SampledBatch,
    compute_advantages,
    grpo_loss,
    grpo_loss_and_grad,
    grpo_update,
    sample_sequences,
    sequence_logprobs,
)
from .model import START_TOKEN, PolicyConfig, TransformerPolicy, forward
from .optim import AdamState, adamw_step

__all__ = [
    "AdamState",
    "GRPOConfig",
    "PolicyConfig",
    "START_TOKEN",
    "SampledBatch",
    "TransformerPolicy",
    "adamw_step",
    "compute_advantages",
    "forward",
    "grpo_loss",
    "grpo_loss_and_grad",
    "grpo_update",
    "load_checkpoint",
    "sample_sequences",
    "save_checkpoint",
    "sequence_logprobs",
]
