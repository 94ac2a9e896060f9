from .vocab import (
    Vocabulary,
    build_vocab,
    tokenize_text,
    detokenize_text,
    encode_block,
    corpus_blocks,
    corpus_to_ids,
    split_on_newline,
    EmptyCorpus,
    PAD_ID,
    BOS_ID,
    EOS_ID,
    NEWLINE_ID,
    UNK_ID,
)
from .model import ModelConfig, TransformerLM, SequenceTooLong
from .train import TrainConfig, train, cross_entropy_on, DivergedLoss
from .decode import DecodeParams, sample, beam_search, greedy
from .checkpoint import save_checkpoint, load_checkpoint, LoadedCheckpoint, file_sha256

__all__ = [
    "Vocabulary",
    "build_vocab",
    "tokenize_text",
    "detokenize_text",
    "encode_block",
    "corpus_blocks",
    "corpus_to_ids",
    "split_on_newline",
    "EmptyCorpus",
    "PAD_ID",
    "BOS_ID",
    "EOS_ID",
    "NEWLINE_ID",
    "UNK_ID",
    "ModelConfig",
    "TransformerLM",
    "SequenceTooLong",
    "TrainConfig",
    "train",
    "cross_entropy_on",
    "DivergedLoss",
    "DecodeParams",
    "sample",
    "beam_search",
    "greedy",
    "save_checkpoint",
    "load_checkpoint",
    "LoadedCheckpoint",
    "file_sha256",
]
