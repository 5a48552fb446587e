"""Binary policy checkpoints: versioned header, JSON config, little-endian float64 weights."""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .model import PolicyConfig, TransformerPolicy

MAGIC = b"GQEPOL"
VERSION = 1


def save_checkpoint(policy: TransformerPolicy, path: str | Path) -> None:
    config = json.dumps(policy.cfg.to_dict(), sort_keys=True).encode("utf-8")
    flat = policy.get_flat().astype("<f8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(config)))
        fh.write(config)
        fh.write(struct.pack("<Q", flat.size))
        fh.write(flat.tobytes())


def load_checkpoint(path: str | Path) -> TransformerPolicy:
    data = Path(path).read_bytes()
    if not data.startswith(MAGIC):
        raise ValueError("not a policy checkpoint")
    offset = len(MAGIC)
    version, cfg_len = struct.unpack_from("<II", data, offset)
    if version != VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    offset += 8
    cfg = PolicyConfig(**json.loads(data[offset:offset + cfg_len].decode("utf-8")))
    offset += cfg_len
    (n,) = struct.unpack_from("<Q", data, offset)
    offset += 8
    flat = np.frombuffer(data, dtype="<f8", count=n, offset=offset)
    policy = TransformerPolicy(cfg)
    policy.set_flat(flat.astype(np.float64))
    return policy
