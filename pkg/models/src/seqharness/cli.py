"""Command line: train, eval, inventory, causality."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .generate import baseline_predictions, evaluate_generation
from .model import build_model, causality_check, param_inventory
from .specs import InvalidSpec, ModelSpec, TrainSpec
from .train import load_checkpoint, save_checkpoint, train
from .vocab import load_vocab


def _spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=["gpt2", "hyena", "thex"], required=True)
    p.add_argument("--layers", type=int, default=6)
    p.add_argument("--swap", type=int, default=0)
    p.add_argument("--attn-width", type=int, default=64)
    p.add_argument("--hyena-width", type=int, default=72)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--context", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vocab", default=None,
                   help="token-list JSON file (default: byte-level)")


def _spec_from(args) -> ModelSpec:
    extra = {}
    if args.vocab:
        extra = {"vocab_file": args.vocab,
                 "vocab_size": load_vocab(args.vocab).size}
    return ModelSpec(kind=args.kind, n_layers=args.layers,
                     attn_width=args.attn_width, hyena_width=args.hyena_width,
                     swap_index=args.swap, context_len=args.context,
                     n_heads=args.heads, seed=args.seed, **extra)


def build_arg_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="seqharness", description=__doc__)
    sub = root.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="train one model on a corpus file")
    _spec_flags(tr)
    tr.add_argument("--corpus", required=True)
    tr.add_argument("--steps", type=int, required=True)
    tr.add_argument("--batch", type=int, default=32)
    tr.add_argument("--lr", type=float, default=3e-3)
    tr.add_argument("--out", required=True)

    ev = sub.add_parser("eval", help="greedy-decode a dataset into predictions")
    ev.add_argument("--ckpt", required=True)
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--out", required=True)
    ev.add_argument("--limit", type=int, default=None)
    ev.add_argument("--baseline-seed", type=int, default=None,
                    help="also write a label-distribution baseline file")

    inv = sub.add_parser("inventory", help="print the block inventory")
    _spec_flags(inv)

    ca = sub.add_parser("causality", help="check that outputs never look ahead")
    _spec_flags(ca)
    return root


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        if args.command == "train":
            model = build_model(_spec_from(args))
            spec = TrainSpec(corpus=args.corpus, steps=args.steps,
                             batch_size=args.batch, lr=args.lr)
            result = train(model, spec, seed=args.seed)
            save_checkpoint(args.out, model, result)
            print(json.dumps({
                "steps": args.steps,
                "fixed_batch_initial": result.fixed_batch_initial,
                "fixed_batch_final": result.fixed_batch_final,
                "skipped_overflow": result.skipped_overflow,
                "out": args.out,
            }))
        elif args.command == "eval":
            model = load_checkpoint(args.ckpt)
            report = evaluate_generation(model, args.dataset, args.out,
                                         limit=args.limit)
            payload = report.as_dict()
            if args.baseline_seed is not None:
                base = baseline_predictions(args.dataset, args.baseline_seed,
                                            limit=args.limit)
                base_path = Path(args.out).with_suffix(".baseline.jsonl")
                with base_path.open("w", encoding="utf-8") as fh:
                    for rid, pred in base.items():
                        fh.write(json.dumps({"id": rid, "prediction": pred}) + "\n")
                payload["baseline_out"] = str(base_path)
            print(json.dumps(payload))
        elif args.command == "inventory":
            rows = param_inventory(build_model(_spec_from(args)))
            print(json.dumps(rows, indent=2))
        elif args.command == "causality":
            ok, worst = causality_check(build_model(_spec_from(args)))
            print(json.dumps({"pass": ok, "max_leak": worst}))
            return 0 if ok else 1
    except InvalidSpec as exc:
        print(f"seqharness: invalid spec: {exc}", file=sys.stderr)
        return 1
    except (OSError, RuntimeError) as exc:
        print(f"seqharness: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
