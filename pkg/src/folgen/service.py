"""HTTP autocompletion service over a trained checkpoint.

JSON over HTTP: ``POST /complete`` takes a CompletionRequest and returns a
score-sorted array of results; ``GET /health`` reports checkpoint id,
vocabulary and library sizes, and uptime.  The model, signature, and
library are loaded once at startup and never mutated, so any number of
requests may run concurrently; a semaphore bounds simultaneous decodes.

Responses are deterministic for a fixed (checkpoint, library, request):
the request carries a seed that defaults to 0.
"""

from __future__ import annotations

import math
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

import torch
import torch.nn.functional as F
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import harness, prefix, tptp
from .library import FormulaLibrary
from .lm import (
    BOS_ID,
    NEWLINE_ID,
    DecodeParams,
    beam_search,
    load_checkpoint,
    sample,
    split_on_newline,
    tokenize_text,
    detokenize_text,
)

PROMPT_MARGIN = 8  # prompt must leave this many context slots free


class CompletionRequest(BaseModel):
    prompt: str
    mode: Literal["text_completion", "premise_prediction"] = "text_completion"
    temperature: float = Field(default=1.0, gt=0)
    top_k: Optional[int] = Field(default=None, ge=1)
    beam_width: int = Field(default=10, ge=1)
    num_results: int = Field(default=10, ge=1)
    max_new_tokens: int = Field(default=64, ge=0)
    seed: int = 0


class PremiseClassOut(BaseModel):
    kind: Literal["known", "new", "unparsable"]
    name: Optional[str] = None
    reason: Optional[str] = None
    formula: Optional[str] = None


class CompletionResult(BaseModel):
    text: str
    score: float
    premise_classes: Optional[list[PremiseClassOut]] = None


@dataclass
class ServiceState:
    checkpoint_path: str
    library_path: str | None
    sig_path: str | None
    max_concurrent: int
    loaded: bool = False
    model: object = None
    vocab: object = None
    config: object = None
    library: FormulaLibrary | None = None
    sig: prefix.SignatureMap | None = None
    sha256: str = ""
    started_at: float = 0.0
    gate: threading.Semaphore | None = None

    def load(self) -> None:
        ckpt = load_checkpoint(self.checkpoint_path)
        self.model, self.vocab, self.config = ckpt.model, ckpt.vocab, ckpt.config
        self.sha256 = ckpt.sha256
        if self.library_path:
            self.library = FormulaLibrary.load(self.library_path)
        if self.sig_path:
            self.sig = prefix.SignatureMap.load(self.sig_path).freeze()
        self.gate = threading.Semaphore(self.max_concurrent)
        self.started_at = time.time()
        self.loaded = True


def _sequence_logprob(model, prompt_ids: list[int], cont: list[int]) -> float:
    """Length-normalized log-probability of a continuation."""
    if not cont:
        return 0.0
    ids = torch.as_tensor(prompt_ids + cont, dtype=torch.long)
    with torch.no_grad():
        logprobs = F.log_softmax(model(ids), dim=-1)
    total = 0.0
    for offset, tok in enumerate(cont):
        total += float(logprobs[len(prompt_ids) - 1 + offset, tok])
    return total / len(cont)


def _classify_lines(state: ServiceState, cont_ids: list[int]) -> list[PremiseClassOut]:
    out = []
    for line_ids in split_on_newline(cont_ids):
        tokens = tuple(state.vocab.decode(line_ids))
        result = harness.decode_line(tokens, state.sig)
        pc = harness.classify_premise(result, state.library)
        if isinstance(pc, harness.Known):
            out.append(
                PremiseClassOut(
                    kind="known", name=pc.name, formula=tptp.print_formula(pc.formula)
                )
            )
        elif isinstance(pc, harness.NewConjecture):
            out.append(
                PremiseClassOut(kind="new", formula=tptp.print_formula(pc.formula))
            )
        else:
            out.append(PremiseClassOut(kind="unparsable", reason=pc.reason))
    return out


def handle_complete(state: ServiceState, req: CompletionRequest) -> list[CompletionResult]:
    vocab, model, config = state.vocab, state.model, state.config
    if req.mode == "premise_prediction":
        if state.sig is None or state.library is None:
            raise HTTPException(400, "premise_prediction needs a library and signature")
        prompt_tokens = req.prompt.split()
        decoded = harness.decode_line(tuple(prompt_tokens), state.sig)
        if isinstance(decoded, Exception):
            raise HTTPException(
                400, f"prompt is not a single prefix-token line: {decoded}"
            )
        prompt_ids = [BOS_ID] + vocab.encode(prompt_tokens) + [NEWLINE_ID]
    else:
        prompt_tokens = tokenize_text(req.prompt, vocab.tokenizer)
        prompt_ids = [BOS_ID] + vocab.encode(prompt_tokens)
    if len(prompt_ids) > config.context_length - PROMPT_MARGIN:
        raise HTTPException(
            400,
            f"prompt of {len(prompt_ids)} tokens exceeds the "
            f"{config.context_length - PROMPT_MARGIN}-token limit",
        )

    if req.max_new_tokens == 0:
        return [CompletionResult(text="", score=0.0)]

    candidates: list[tuple[list[int], float]] = []
    if req.beam_width == 1:
        for i in range(req.num_results):
            p = DecodeParams(
                mode="sample",
                temperature=req.temperature,
                top_k=req.top_k,
                max_new_tokens=req.max_new_tokens,
                seed=req.seed + i,
            )
            cont = sample(model, prompt_ids, p)
            candidates.append((cont, _sequence_logprob(model, prompt_ids, cont)))
        candidates.sort(key=lambda c: -c[1])
    else:
        p = DecodeParams(
            mode="beam",
            temperature=req.temperature,
            top_k=req.top_k,
            beam_width=req.beam_width,
            max_new_tokens=req.max_new_tokens,
            length_penalty=1.0,
            seed=req.seed,
        )
        candidates = beam_search(model, prompt_ids, p)
    candidates = candidates[: req.num_results]

    results = []
    for cont, score in candidates:
        if not math.isfinite(score):
            score = -1e30
        if req.mode == "premise_prediction":
            lines = split_on_newline(cont)
            text = "\n".join(" ".join(vocab.decode(ln)) for ln in lines)
            results.append(
                CompletionResult(
                    text=text, score=score, premise_classes=_classify_lines(state, cont)
                )
            )
        else:
            results.append(
                CompletionResult(
                    text=detokenize_text(vocab.decode(cont), vocab.tokenizer),
                    score=score,
                )
            )
    return results


def create_app(
    checkpoint_path: str,
    library_path: str | None = None,
    sig_path: str | None = None,
    max_concurrent: int = 4,
    static_dir: str | None = None,
) -> FastAPI:
    state = ServiceState(checkpoint_path, library_path, sig_path, max_concurrent)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        state.load()
        yield

    app = FastAPI(title="folgen completion service", lifespan=lifespan)
    app.state.service = state

    @app.get("/health")
    def health() -> dict:
        if not state.loaded:
            return {"status": "loading"}
        return {
            "status": "ok",
            "checkpoint_sha256": state.sha256,
            "vocab_size": len(state.vocab),
            "library_size": len(state.library) if state.library else 0,
            "context_length": state.config.context_length,
            "uptime_seconds": time.time() - state.started_at,
        }

    @app.post("/complete", response_model=list[CompletionResult])
    def complete(req: CompletionRequest) -> list[CompletionResult]:
        if not state.loaded:
            raise HTTPException(503, "model is still loading")
        with state.gate:
            return handle_complete(state, req)

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
