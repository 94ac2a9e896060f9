"""Next-token training loop: Adam, global-norm clipping, seeded batching."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F

from .model import TransformerLM


class DivergedLoss(RuntimeError):
    def __init__(self, step: int, value: float):
        self.step = step
        self.value = value
        super().__init__(f"non-finite loss {value} at step {step}")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    adam_betas: tuple[float, float] = (0.9, 0.999)
    batch_size: int = 16
    steps: int = 100
    grad_clip_norm: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        b1, b2 = self.adam_betas
        if not (0 <= b1 < 1 and 0 <= b2 < 1):
            raise ValueError("adam betas must lie in [0, 1)")
        if self.grad_clip_norm <= 0:
            raise ValueError("grad_clip_norm must be positive")
        if self.batch_size <= 0 or self.steps < 0:
            raise ValueError("batch_size must be positive and steps non-negative")


def batch_windows(
    data: torch.Tensor, window: int, batch_size: int, gen: torch.Generator
) -> tuple[torch.Tensor, torch.Tensor]:
    starts = torch.randint(0, len(data) - window, (batch_size,), generator=gen)
    x = torch.stack([data[i : i + window] for i in starts])
    y = torch.stack([data[i + 1 : i + window + 1] for i in starts])
    return x, y


def train(model: TransformerLM, corpus_ids, cfg: TrainConfig) -> list[float]:
    """Run cfg.steps Adam steps of next-token cross-entropy; return the loss trace.

    Deterministic: identical (model seed, corpus, cfg) give bit-identical
    traces.  Raises DivergedLoss as soon as the loss goes non-finite.
    """
    window = model.config.context_length
    data = torch.as_tensor(list(corpus_ids), dtype=torch.long)
    if len(data) <= window:
        raise ValueError(
            f"corpus of {len(data)} tokens is too short for context {window}"
        )
    gen = torch.Generator().manual_seed(cfg.seed)
    opt = torch.optim.Adam(
        model.parameters(), lr=cfg.learning_rate, betas=cfg.adam_betas
    )
    trace: list[float] = []
    model.train()
    for step in range(cfg.steps):
        x, y = batch_windows(data, window, cfg.batch_size, gen)
        logits = model(x)
        loss = F.cross_entropy(logits.reshape(-1, logits.shape[-1]), y.reshape(-1))
        value = loss.item()
        if not torch.isfinite(loss):
            raise DivergedLoss(step, value)
        opt.zero_grad()
        loss.backward()
        torch.nn.utils.clip_grad_norm_(model.parameters(), cfg.grad_clip_norm)
        opt.step()
        trace.append(value)
    model.eval()
    return trace


def cross_entropy_on(model: TransformerLM, ids) -> float:
    """Mean next-token cross-entropy of the model over a token-id sequence."""
    data = torch.as_tensor(list(ids), dtype=torch.long)
    window = model.config.context_length
    total, count = 0.0, 0
    model.eval()
    with torch.no_grad():
        for start in range(0, len(data) - 1, window):
            chunk = data[start : start + window + 1]
            if len(chunk) < 2:
                break
            logits = model(chunk[:-1])
            loss = F.cross_entropy(
                logits, chunk[1:], reduction="sum"
            )
            total += loss.item()
            count += len(chunk) - 1
    if count == 0:
        raise ValueError("sequence too short to evaluate")
    return total / count
