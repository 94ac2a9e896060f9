"""Command-line interface for the dataset/train/evaluate/serve pipeline."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import datasets, prefix, tptp
from .library import FormulaLibrary


def _read(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def cmd_build_dataset1(args) -> int:
    text = datasets.build_concatenated([_read(p) for p in args.inputs])
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"wrote {args.out} ({len(text)} bytes from {len(args.inputs)} files)")
    return 0


def cmd_build_dataset3(args) -> int:
    text = datasets.build_tokenized_proofs([_read(p) for p in args.inputs])
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"wrote {args.out} ({len(text)} bytes from {len(args.inputs)} derivations)")
    return 0


def cmd_build_dataset4(args) -> int:
    library = FormulaLibrary.load(args.library)
    sig = prefix.build_signature(
        [tptp.parse_problem(_read(args.library))]
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    built = 0
    for deriv_path in sorted(Path(args.derivations).iterdir()):
        if not deriv_path.is_file():
            continue
        manifest = datasets.extract_premise_order(_read(deriv_path))
        text = datasets.build_prefix_premise_file(manifest, library, sig)
        (out_dir / f"{manifest.conjecture_name}.txt").write_text(text, encoding="utf-8")
        built += 1
    sig.save(args.sig)
    print(f"wrote {built} premise files to {out_dir}, signature to {args.sig}")
    return 0


def cmd_lm_train(args) -> int:
    from . import lm

    cfg = json.loads(_read(args.config))
    tokenizer = cfg.get("tokenizer", "whitespace")
    corpus_text = _read(args.corpus)
    blocks = lm.corpus_blocks(corpus_text, tokenizer)
    tokens = [tok for block in blocks for line in block for tok in line]
    vocab = lm.build_vocab(tokens, tokenizer)
    model_cfg = lm.ModelConfig(**{**cfg.get("model", {}), "vocab_size": len(vocab)})
    train_cfg = lm.TrainConfig(**cfg.get("train", {}))
    model = lm.TransformerLM(model_cfg)
    ids = lm.corpus_to_ids(corpus_text, vocab)
    if args.sample_every and args.sample_every < train_cfg.steps:
        # train in chunks, printing an unconditioned sample between them
        from dataclasses import replace

        trace = []
        done = 0
        while done < train_cfg.steps:
            chunk = min(args.sample_every, train_cfg.steps - done)
            trace.extend(
                lm.train(model, ids, replace(train_cfg, steps=chunk, seed=train_cfg.seed + done))
            )
            done += chunk
            p = lm.DecodeParams(mode="sample", temperature=1.0, max_new_tokens=48, seed=done)
            cont = lm.sample(model, [lm.BOS_ID], p)
            text = lm.detokenize_text(vocab.decode(cont), vocab.tokenizer)
            print(f"[step {done}] loss {trace[-1]:.4f} sample: {text}")
    else:
        trace = lm.train(model, ids, train_cfg)
    sha = lm.save_checkpoint(args.out, model, vocab, extra={"steps": train_cfg.steps})
    meta = {
        "sha256": sha,
        "steps": train_cfg.steps,
        "final_loss": trace[-1] if trace else None,
    }
    Path(args.out + ".meta.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
    if args.loss_csv:
        with open(args.loss_csv, "w", encoding="utf-8") as fh:
            fh.write("step,loss\n")
            for step, loss in enumerate(trace):
                fh.write(f"{step},{loss}\n")
    print(f"trained {train_cfg.steps} steps, checkpoint {args.out} sha256={sha[:12]}")
    return 0


def _load_prompt_ids(args, ckpt):
    from . import lm

    if args.prompt_file:
        text = _read(args.prompt_file)
        tokens = lm.tokenize_text(text, ckpt.vocab.tokenizer)
        return [lm.BOS_ID] + ckpt.vocab.encode(tokens)
    return [lm.BOS_ID]


def cmd_lm_sample(args) -> int:
    from . import lm

    ckpt = lm.load_checkpoint(args.ckpt)
    prompt_ids = _load_prompt_ids(args, ckpt)
    for i in range(args.num):
        p = lm.DecodeParams(
            mode="sample",
            temperature=args.temperature,
            top_k=args.top_k,
            max_new_tokens=args.max_new_tokens,
            seed=args.seed + i,
        )
        cont = lm.sample(ckpt.model, prompt_ids, p)
        print(lm.detokenize_text(ckpt.vocab.decode(cont), ckpt.vocab.tokenizer))
    return 0


def cmd_lm_beam(args) -> int:
    from . import lm

    ckpt = lm.load_checkpoint(args.ckpt)
    prompt_ids = _load_prompt_ids(args, ckpt)
    p = lm.DecodeParams(
        mode="beam",
        beam_width=args.width,
        max_new_tokens=args.max_new_tokens,
        length_penalty=args.length_penalty,
    )
    for cont, score in lm.beam_search(ckpt.model, prompt_ids, p):
        text = lm.detokenize_text(ckpt.vocab.decode(cont), ckpt.vocab.tokenizer)
        print(f"{score:.4f}\t{text}")
    return 0


def cmd_eval_run(args) -> int:
    from . import harness

    library = FormulaLibrary.load(args.library)
    sig = prefix.SignatureMap.load(args.sig).freeze()
    predictions = harness.load_predictions(args.predictions)
    prover = harness.make_prover(args.prover)
    opts = harness.EvalOptions(
        strict_chronology=args.strict_chronology,
        cs_limit=args.cs_limit,
        proof_limit=args.proof_limit,
        jobs=args.jobs,
    )
    report, records = harness.evaluate(predictions, library, sig, prover, opts)
    Path(args.report).write_text(
        json.dumps(report.to_dict(), indent=2), encoding="utf-8"
    )
    if args.per_problem:
        harness.write_records_csv(args.per_problem, records)
    print(
        f"{report.unique_after_dedup} unique predictions: "
        f"{report.proved} proved ({report.proved_theorems} theorems), "
        f"{report.countersatisfiable} countersatisfiable, {report.unknown} unknown"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        checkpoint_path=args.ckpt,
        library_path=args.library,
        sig_path=args.sig,
        max_concurrent=args.max_concurrent,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="folgen")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="construct training corpora")
    build_sub = build.add_subparsers(dest="dataset", required=True)

    d1 = build_sub.add_parser("dataset1", help="comment-stripped concatenated text")
    d1.add_argument("--out", required=True)
    d1.add_argument("inputs", nargs="*")
    d1.set_defaults(func=cmd_build_dataset1)

    d3 = build_sub.add_parser("dataset3", help="tokenized proofs, one statement per line")
    d3.add_argument("--out", required=True)
    d3.add_argument("inputs", nargs="*")
    d3.set_defaults(func=cmd_build_dataset3)

    d4 = build_sub.add_parser("dataset4", help="conjecture-first prefix premise files")
    d4.add_argument("--library", required=True)
    d4.add_argument("--derivations", required=True)
    d4.add_argument("--sig", required=True)
    d4.add_argument("--out", required=True)
    d4.set_defaults(func=cmd_build_dataset4)

    lm_cmd = sub.add_parser("lm", help="train and decode the language model")
    lm_sub = lm_cmd.add_subparsers(dest="lm_command", required=True)

    tr = lm_sub.add_parser("train")
    tr.add_argument("--config", required=True, help="JSON: model/train/tokenizer")
    tr.add_argument("--corpus", required=True)
    tr.add_argument("--out", required=True)
    tr.add_argument("--loss-csv", default=None)
    tr.add_argument(
        "--sample-every", type=int, default=0,
        help="print an unconditioned sample every N training steps",
    )
    tr.set_defaults(func=cmd_lm_train)

    sm = lm_sub.add_parser("sample")
    sm.add_argument("--ckpt", required=True)
    sm.add_argument("--prompt-file", default=None)
    sm.add_argument("--temperature", type=float, default=1.0)
    sm.add_argument("--top-k", type=int, default=None)
    sm.add_argument("--max-new-tokens", type=int, default=64)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--num", type=int, default=1)
    sm.set_defaults(func=cmd_lm_sample)

    bm = lm_sub.add_parser("beam")
    bm.add_argument("--ckpt", required=True)
    bm.add_argument("--prompt-file", default=None)
    bm.add_argument("--width", type=int, default=10)
    bm.add_argument("--max-new-tokens", type=int, default=64)
    bm.add_argument("--length-penalty", type=float, default=1.0)
    bm.set_defaults(func=cmd_lm_beam)

    ev = sub.add_parser("eval", help="semantic evaluation of predictions")
    ev_sub = ev.add_subparsers(dest="eval_command", required=True)
    run = ev_sub.add_parser("run")
    run.add_argument("--library", required=True)
    run.add_argument("--sig", required=True)
    run.add_argument("--predictions", required=True)
    run.add_argument("--prover", default="stub", help="'stub' or prover executable")
    run.add_argument("--cs-limit", type=float, default=1.0)
    run.add_argument("--proof-limit", type=float, default=6.0)
    run.add_argument("--jobs", type=int, default=0)
    run.add_argument("--report", required=True)
    run.add_argument("--per-problem", default=None)
    run.add_argument("--strict-chronology", action="store_true")
    run.set_defaults(func=cmd_eval_run)

    sv = sub.add_parser("serve", help="HTTP completion service")
    sv.add_argument("--ckpt", required=True)
    sv.add_argument("--library", default=None)
    sv.add_argument("--sig", default=None)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8000)
    sv.add_argument("--max-concurrent", type=int, default=4)
    sv.add_argument("--static-dir", default=None)
    sv.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
