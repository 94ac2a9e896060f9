"""Self-describing checkpoint container.

Layout (all integers little-endian):

    bytes 0..3   magic ``FGLM``
    bytes 4..7   format version, uint32
    bytes 8..15  header length in bytes, uint64
    header       UTF-8 JSON: {"config": .., "vocab": .., "extra": ..,
                 "tensors": [{"name", "dtype", "shape", "offset", "nbytes"}]}
    payload      raw tensor data, little-endian float32, at the offsets
                 recorded in the header (relative to payload start)

The file hash (sha256 of all bytes) doubles as the checkpoint id.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np
import torch

from .model import ModelConfig, TransformerLM
from .vocab import Vocabulary

MAGIC = b"FGLM"
VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass
class LoadedCheckpoint:
    model: TransformerLM
    config: ModelConfig
    vocab: Vocabulary
    extra: dict
    sha256: str


def save_checkpoint(
    path, model: TransformerLM, vocab: Vocabulary, extra: dict | None = None
) -> str:
    """Write the container; returns the file's sha256 (the checkpoint id)."""
    tensors = []
    payload = bytearray()
    for name, tensor in model.state_dict().items():
        raw = tensor.detach().cpu().numpy().astype("<f4").tobytes()
        tensors.append(
            {
                "name": name,
                "dtype": "float32",
                "shape": list(tensor.shape),
                "offset": len(payload),
                "nbytes": len(raw),
            }
        )
        payload.extend(raw)
    header = json.dumps(
        {
            "config": model.config.to_dict(),
            "vocab": vocab.to_dict(),
            "extra": extra or {},
            "tensors": tensors,
        }
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        fh.write(bytes(payload))
    return file_sha256(path)


def load_checkpoint(path) -> LoadedCheckpoint:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic)")
    (version,) = struct.unpack("<I", blob[4:8])
    if version != VERSION:
        raise CheckpointError(f"{path}: unsupported version {version}")
    (header_len,) = struct.unpack("<Q", blob[8:16])
    header = json.loads(blob[16 : 16 + header_len].decode("utf-8"))
    payload = blob[16 + header_len :]

    config = ModelConfig.from_dict(header["config"])
    vocab = Vocabulary.from_dict(header["vocab"])
    model = TransformerLM(config)
    state = {}
    for entry in header["tensors"]:
        raw = payload[entry["offset"] : entry["offset"] + entry["nbytes"]]
        arr = np.frombuffer(raw, dtype="<f4").reshape(entry["shape"]).copy()
        state[entry["name"]] = torch.from_numpy(arr)
    model.load_state_dict(state)
    model.eval()
    return LoadedCheckpoint(
        model=model,
        config=config,
        vocab=vocab,
        extra=header.get("extra", {}),
        sha256=hashlib.sha256(blob).hexdigest(),
    )


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
