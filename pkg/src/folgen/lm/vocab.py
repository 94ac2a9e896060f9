"""Token vocabulary for the language model.

Tokens are whatever the corpus tokenizer produced: whitespace-separated
prefix tokens, TPTP tokens, or single bytes.  The four specials occupy the
lowest ids, followed by the reserved unknown id; corpus tokens are ordered
by descending frequency, ties broken lexicographically, so vocabulary
construction is deterministic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .. import tptp

PAD_ID = 0
BOS_ID = 1
EOS_ID = 2
NEWLINE_ID = 3
UNK_ID = 4

PAD = "<pad>"
BOS = "<bos>"
EOS = "<eos>"
NEWLINE = "<nl>"
UNK = "<unk>"

SPECIALS = (PAD, BOS, EOS, NEWLINE, UNK)

TOKENIZERS = ("whitespace", "tptp", "bytes")


class EmptyCorpus(ValueError):
    pass


def tokenize_text(text: str, tokenizer: str) -> list[str]:
    if tokenizer == "whitespace":
        return text.split()
    if tokenizer == "tptp":
        return tptp.tokenize_tptp(text)
    if tokenizer == "bytes":
        return [chr(b) for b in text.encode("utf-8")]
    raise ValueError(f"unknown tokenizer {tokenizer!r}")


def detokenize_text(tokens: list[str], tokenizer: str) -> str:
    plain = [t for t in tokens if t not in SPECIALS]
    if tokenizer == "bytes":
        return bytes(ord(c) for c in plain).decode("utf-8", errors="replace")
    return " ".join(plain)


@dataclass
class Vocabulary:
    id_to_token: list[str]
    tokenizer: str
    token_to_id: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if tuple(self.id_to_token[:5]) != SPECIALS:
            raise ValueError("vocabulary must start with the special tokens")
        if self.tokenizer not in TOKENIZERS:
            raise ValueError(f"unknown tokenizer {self.tokenizer!r}")
        if not self.token_to_id:
            self.token_to_id = {t: i for i, t in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise ValueError("duplicate tokens in vocabulary")

    def __len__(self) -> int:
        return len(self.id_to_token)

    def encode(self, tokens: list[str]) -> list[int]:
        get = self.token_to_id.get
        return [get(t, UNK_ID) for t in tokens]

    def decode(self, ids: list[int]) -> list[str]:
        return [self.id_to_token[i] for i in ids]

    def to_dict(self) -> dict:
        return {"tokenizer": self.tokenizer, "tokens": list(self.id_to_token)}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls(id_to_token=list(d["tokens"]), tokenizer=d["tokenizer"])


def build_vocab(corpus_tokens: list[str], tokenizer: str = "whitespace") -> Vocabulary:
    """Frequency-then-lexicographic vocabulary over a token stream."""
    if not corpus_tokens:
        raise EmptyCorpus("cannot build a vocabulary from an empty corpus")
    counts = Counter(t for t in corpus_tokens if t not in SPECIALS)
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return Vocabulary(
        id_to_token=list(SPECIALS) + [t for t, _ in ordered], tokenizer=tokenizer
    )


def encode_block(lines: list[list[str]], vocab: Vocabulary) -> list[int]:
    """``<bos> line <nl> line ... <eos>`` ids for one multi-line record."""
    ids = [BOS_ID]
    for i, line in enumerate(lines):
        if i:
            ids.append(NEWLINE_ID)
        ids.extend(vocab.encode(line))
    ids.append(EOS_ID)
    return ids


def corpus_blocks(text: str, tokenizer: str) -> list[list[list[str]]]:
    """Blank-line-separated blocks of token lines.

    Byte-level corpora are one block of one line (newlines are ordinary
    bytes there); token-level corpora map each physical line to a token
    line and each blank line to a block boundary.
    """
    if tokenizer == "bytes":
        return [[tokenize_text(text, tokenizer)]] if text else []
    blocks: list[list[list[str]]] = []
    current: list[list[str]] = []
    for line in text.split("\n"):
        tokens = tokenize_text(line, tokenizer)
        if not tokens:
            if current:
                blocks.append(current)
                current = []
            continue
        current.append(tokens)
    if current:
        blocks.append(current)
    return blocks


def corpus_to_ids(text: str, vocab: Vocabulary) -> list[int]:
    """Flat training stream: every block wrapped in <bos> ... <eos>."""
    ids: list[int] = []
    for block in corpus_blocks(text, vocab.tokenizer):
        ids.extend(encode_block(block, vocab))
    return ids


def split_on_newline(ids: list[int]) -> list[list[int]]:
    """Split a generated id sequence into lines at <nl>, dropping specials."""
    lines: list[list[int]] = [[]]
    for i in ids:
        if i == NEWLINE_ID:
            lines.append([])
        elif i in (PAD_ID, BOS_ID, EOS_ID):
            continue
        else:
            lines[-1].append(i)
    return [ln for ln in lines if ln]
