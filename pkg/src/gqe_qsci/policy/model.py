"""A small decoder-only Transformer over operator-pool tokens (double precision)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

START_TOKEN = 0


@dataclass
class PolicyConfig:
    """Token ``0`` is the start token; pool entry ``k`` is token ``k + 1``."""

    vocab_size: int
    context_len: int
    d_model: int = 128
    n_heads: int = 4
    n_layers: int = 4
    d_ff: int = 512
    repetition_penalty: float = 1.2
    seed: int = 0
    init_std: float = 0.02

    def __post_init__(self):
        if self.d_model % self.n_heads:
            raise ValueError("d_model must be divisible by n_heads")
        if self.context_len < 2:
            raise ValueError("context_len must be >= 2")
        if self.vocab_size < 2:
            raise ValueError("vocab_size must include the start token and at least one pool token")

    @classmethod
    def for_pool(cls, pool_size: int, length: int, **kwargs) -> "PolicyConfig":
        return cls(vocab_size=pool_size + 1, context_len=length + 1, **kwargs)

    def to_dict(self) -> dict:
        return asdict(self)


class _Block(nn.Module):
    def __init__(self, cfg: PolicyConfig):
        super().__init__()
        self.n_heads = cfg.n_heads
        self.ln1 = nn.LayerNorm(cfg.d_model)
        self.qkv = nn.Linear(cfg.d_model, 3 * cfg.d_model)
        self.proj = nn.Linear(cfg.d_model, cfg.d_model)
        self.ln2 = nn.LayerNorm(cfg.d_model)
        self.fc = nn.Linear(cfg.d_model, cfg.d_ff)
        self.out = nn.Linear(cfg.d_ff, cfg.d_model)

    def forward(self, h: torch.Tensor) -> torch.Tensor:
        b, t, d = h.shape
        q, k, v = self.qkv(self.ln1(h)).split(d, dim=-1)
        shape = (b, t, self.n_heads, d // self.n_heads)
        q, k, v = (x.view(shape).transpose(1, 2) for x in (q, k, v))
        scores = q @ k.transpose(-2, -1) / math.sqrt(d // self.n_heads)
        causal = torch.ones(t, t, dtype=torch.bool, device=h.device).tril()
        scores = scores.masked_fill(~causal, float("-inf"))
        att = torch.softmax(scores, dim=-1) @ v
        h = h + self.proj(att.transpose(1, 2).reshape(b, t, d))
        return h + self.out(F.gelu(self.fc(self.ln2(h))))


class TransformerPolicy(nn.Module):
    """GPT-2 style pre-norm decoder with untied output projection."""

    def __init__(self, cfg: PolicyConfig):
        super().__init__()
        self.cfg = cfg
        self.tok_emb = nn.Embedding(cfg.vocab_size, cfg.d_model)
        self.pos_emb = nn.Embedding(cfg.context_len, cfg.d_model)
        self.blocks = nn.ModuleList(_Block(cfg) for _ in range(cfg.n_layers))
        self.ln_f = nn.LayerNorm(cfg.d_model)
        self.head = nn.Linear(cfg.d_model, cfg.vocab_size, bias=False)
        self.double()
        self.reset_parameters(cfg.seed)

    def reset_parameters(self, seed: int) -> None:
        gen = torch.Generator().manual_seed(int(seed))
        with torch.no_grad():
            for name, p in self.named_parameters():
                if name.endswith("bias"):
                    p.zero_()
                elif ".ln" in name or name.startswith("ln_"):
                    p.fill_(1.0)
                else:
                    p.normal_(0.0, self.cfg.init_std, generator=gen)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        """Logits of shape ``(batch, T, vocab)``; position ``t`` sees tokens ``<= t`` only."""
        if tokens.dim() == 1:
            tokens = tokens.unsqueeze(0)
        t = tokens.shape[1]
        if t > self.cfg.context_len:
            raise ValueError(f"prefix of length {t} exceeds context length {self.cfg.context_len}")
        pos = torch.arange(t, device=tokens.device)
        h = self.tok_emb(tokens) + self.pos_emb(pos)[None]
        for block in self.blocks:
            h = block(h)
        return self.head(self.ln_f(h))

    # flat parameter view -------------------------------------------------
    def n_parameters(self) -> int:
        return sum(p.numel() for p in self.parameters())

    def get_flat(self) -> np.ndarray:
        return nn.utils.parameters_to_vector(self.parameters()).detach().numpy().copy()

    def set_flat(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.n_parameters(),):
            raise ValueError(f"expected {self.n_parameters()} parameters, got {flat.shape}")
        if not np.all(np.isfinite(flat)):
            raise FloatingPointError("non-finite policy parameters")
        nn.utils.vector_to_parameters(torch.from_numpy(flat.copy()), self.parameters())

    def flat_grad(self) -> np.ndarray:
        return np.concatenate(
            [(p.grad if p.grad is not None else torch.zeros_like(p)).reshape(-1).numpy() for p in self.parameters()]
        )

    def decay_mask(self) -> np.ndarray:
        """True for matrices and embeddings; norm gains and all biases are not decayed."""
        parts = []
        for name, p in self.named_parameters():
            decayed = not (name.endswith("bias") or ".ln" in name or name.startswith("ln_"))
            parts.append(np.full(p.numel(), decayed))
        return np.concatenate(parts)


def forward(policy: TransformerPolicy, token_prefix) -> np.ndarray:
    """Next-token logits after ``token_prefix`` (which must begin with the start token)."""
    prefix = torch.as_tensor(np.asarray(token_prefix, dtype=np.int64))
    if prefix.numel() == 0 or int(prefix.reshape(-1)[0]) != START_TOKEN:
        raise ValueError("prefix must start with the start token")
    with torch.no_grad():
        return policy(prefix.reshape(1, -1))[0, -1].numpy()
