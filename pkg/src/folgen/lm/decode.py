"""Temperature sampling and length-normalized beam search.

Both decoders treat the model as a black box mapping an id sequence to
per-position logits; anything with a ``config.context_length`` and that
callable contract works, which keeps the decoding logic testable against
hand-built distributions.

Conventions shared by both decoders:
- the returned sequences are continuations (prompt excluded) and include
  the EOS token when one was generated;
- temperatures below 1e-6 mean greedy argmax;
- beam scores are sum(log p) / max(len, 1) ** length_penalty computed on
  temperature-scaled log-probabilities, ties broken by token-id order.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F

from .model import SequenceTooLong
from .vocab import EOS_ID

GREEDY_TEMPERATURE = 1e-6


@dataclass(frozen=True)
class DecodeParams:
    mode: str = "sample"  # "sample" or "beam"
    temperature: float = 1.0
    top_k: int | None = None  # None = unlimited
    beam_width: int = 1
    max_new_tokens: int = 64
    length_penalty: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("sample", "beam"):
            raise ValueError(f"unknown decode mode {self.mode!r}")
        if not (self.temperature > 0) or self.temperature != self.temperature:
            raise ValueError("temperature must be a positive finite number")
        if self.temperature == float("inf"):
            raise ValueError("temperature must be finite")
        if self.beam_width < 1:
            raise ValueError("beam_width must be at least 1")
        if self.top_k is not None and self.top_k < 1:
            raise ValueError("top_k must be at least 1 (or None)")
        if self.max_new_tokens < 0:
            raise ValueError("max_new_tokens must be non-negative")
        if self.length_penalty < 0:
            raise ValueError("length_penalty must be non-negative")


def _last_logits(model, ids: list[int]) -> torch.Tensor:
    with torch.no_grad():
        logits = model(torch.as_tensor(ids, dtype=torch.long))
    return logits[-1]


def _check_prompt(model, prompt_ids: list[int]) -> None:
    ctx = model.config.context_length
    if len(prompt_ids) >= ctx:
        raise SequenceTooLong(len(prompt_ids), ctx)


def sample(model, prompt_ids: list[int], p: DecodeParams, eos_id: int | None = EOS_ID) -> list[int]:
    """Autoregressive sampling from softmax(logits / temperature), top-k limited."""
    if p.mode != "sample":
        raise ValueError("sample() requires mode='sample'")
    _check_prompt(model, prompt_ids)
    ctx = model.config.context_length
    gen = torch.Generator().manual_seed(p.seed)
    ids = list(prompt_ids)
    out: list[int] = []
    for _ in range(p.max_new_tokens):
        if len(ids) >= ctx:
            break
        logits = _last_logits(model, ids)
        if p.temperature < GREEDY_TEMPERATURE:
            nxt = int(torch.argmax(logits).item())
        else:
            scaled = logits / p.temperature
            if p.top_k is not None and p.top_k < scaled.shape[-1]:
                _, keep = torch.topk(scaled, p.top_k)
                masked = torch.full_like(scaled, float("-inf"))
                masked[keep] = scaled[keep]
                scaled = masked
            probs = F.softmax(scaled, dim=-1)
            nxt = int(torch.multinomial(probs, 1, generator=gen).item())
        out.append(nxt)
        ids.append(nxt)
        if eos_id is not None and nxt == eos_id:
            break
    return out


def _beam_score(logprob: float, length: int, length_penalty: float) -> float:
    return logprob / (max(length, 1) ** length_penalty)


def beam_search(
    model, prompt_ids: list[int], p: DecodeParams, eos_id: int | None = EOS_ID
) -> list[tuple[list[int], float]]:
    """Top hypotheses by length-normalized log-probability, best first."""
    if p.mode != "beam":
        raise ValueError("beam_search() requires mode='beam'")
    _check_prompt(model, prompt_ids)
    ctx = model.config.context_length

    # (continuation, summed logprob, finished)
    beams: list[tuple[tuple[int, ...], float, bool]] = [((), 0.0, False)]
    for _ in range(p.max_new_tokens):
        if all(done for _, _, done in beams):
            break
        candidates: list[tuple[tuple[int, ...], float, bool]] = []
        for cont, logprob, done in beams:
            if done or len(prompt_ids) + len(cont) >= ctx:
                candidates.append((cont, logprob, True))
                continue
            logits = _last_logits(model, list(prompt_ids) + list(cont))
            if p.temperature < GREEDY_TEMPERATURE:
                nxt = int(torch.argmax(logits).item())
                candidates.append(
                    (cont + (nxt,), logprob, eos_id is not None and nxt == eos_id)
                )
                continue
            logprobs = F.log_softmax(logits / p.temperature, dim=-1)
            if p.top_k is not None and p.top_k < logprobs.shape[-1]:
                values, indices = torch.topk(logprobs, p.top_k)
                expand = [(int(i), float(v)) for i, v in zip(indices, values)]
            else:
                k = min(p.beam_width, logprobs.shape[-1])
                values, indices = torch.topk(logprobs, k)
                expand = [(int(i), float(v)) for i, v in zip(indices, values)]
            for tok, lp in expand:
                candidates.append(
                    (
                        cont + (tok,),
                        logprob + lp,
                        eos_id is not None and tok == eos_id,
                    )
                )
        candidates.sort(
            key=lambda c: (-_beam_score(c[1], len(c[0]), p.length_penalty), c[0])
        )
        beams = candidates[: p.beam_width]

    scored = [
        (list(cont), _beam_score(logprob, len(cont), p.length_penalty))
        for cont, logprob, _ in beams
    ]
    scored.sort(key=lambda s: (-s[1], tuple(s[0])))
    return scored


def greedy(model, prompt_ids: list[int], max_new_tokens: int, eos_id: int | None = EOS_ID) -> list[int]:
    """Argmax decoding (the temperature -> 0 limit of sampling)."""
    p = DecodeParams(mode="sample", temperature=GREEDY_TEMPERATURE / 10, max_new_tokens=max_new_tokens)
    return sample(model, prompt_ids, p, eos_id=eos_id)
