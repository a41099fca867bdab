"""Command-line interface: gen, interpret, translate, eval, sweep, stats.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable inputs,
malformed config or module text), 3 infeasible config (quota, namespace,
regeneration limits).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .config import BASE_CONFIG, GenConfig, load_config, serialize
from .corpus import SplitSizes, build_corpus, dataset_stats
from .errors import (ExhaustedNamespace, QuotaInfeasible, QuotaUnmet,
                     RegenerationLimitExceeded, SynthlangError)
from .evalharness import (oracle_predict, score_predictions, sweep_configs,
                          write_predictions, _load_global_bindings)
from .interpreter import Environment, LatentRules, evaluate
from .lang import RenderLang, Syntax, render_value
from .parser import Accept, parse_module
from .translator import translate

_INFEASIBLE = (QuotaInfeasible, QuotaUnmet, ExhaustedNamespace,
               RegenerationLimitExceeded)
_ACCEPT = {"lola": Accept.LOLA_ONLY, "meme": Accept.MEME_ONLY,
           "mixed": Accept.ANY_MIXED}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _load_cfg(path: str | None, seed: int | None) -> GenConfig:
    cfg = BASE_CONFIG if path is None \
        else load_config(Path(path).read_text(encoding="utf-8"))
    if seed is not None:
        cfg = replace(cfg, master_seed=seed)
    return cfg


def _sizes(args, cfg: GenConfig) -> SplitSizes:
    return SplitSizes(
        train=args.train if args.train is not None else cfg.dataset_size,
        eval=args.eval or 0,
        test_with_globals=args.test_global or 0,
        test_no_globals=args.test_noglobal or 0,
    )


def _add_size_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--train", type=int, default=None, metavar="N")
    p.add_argument("--eval", type=int, default=None, metavar="N")
    p.add_argument("--test-global", type=int, default=None, metavar="N")
    p.add_argument("--test-noglobal", type=int, default=None, metavar="N")


def build_arg_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="synthlang", description=__doc__)
    root.add_argument("--version", action="version",
                      version=f"synthlang {__version__}")
    sub = root.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a corpus")
    gen.add_argument("--config", default=None)
    gen.add_argument("--seed", type=int, default=None)
    _add_size_flags(gen)
    gen.add_argument("--out", default=None)
    gen.add_argument("--jobs", type=int, default=1)

    interp = sub.add_parser("interpret", help="evaluate one module per stdin line")
    interp.add_argument("--config", default=None)
    interp.add_argument("--globals", default=None)
    interp.add_argument("--accept", choices=sorted(_ACCEPT), default="mixed")

    trans = sub.add_parser("translate", help="translate one module per stdin line")
    trans.add_argument("--from", dest="src", choices=sorted(_ACCEPT), required=True)
    trans.add_argument("--to", dest="dst", choices=["lola", "meme"], required=True)
    trans.add_argument("--config", default=None)

    ev = sub.add_parser("eval", help="exact-match score prediction files")
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--pred", action="append", default=[])
    ev.add_argument("--report", default=None)
    ev.add_argument("--oracle", action="store_true",
                    help="score the interpreter itself (writes no file unless --pred-out)")
    ev.add_argument("--pred-out", default=None)
    ev.add_argument("--globals", default=None)
    ev.add_argument("--config", default=None)

    sweep = sub.add_parser("sweep", help="emit sweep configs and corpora")
    sweep.add_argument("--kind", required=True)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--config", default=None)
    sweep.add_argument("--seed", type=int, default=None)
    _add_size_flags(sweep)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--configs-only", action="store_true")

    stats = sub.add_parser("stats", help="recount statistics from a dataset file")
    stats.add_argument("--dataset", required=True)
    stats.add_argument("--globals", default=None)
    return root


def _out_dir(args, parser) -> Path:
    out = os.environ.get("SYNTHLANG_OUT") or args.out
    if not out:
        parser.error("--out is required (or set SYNTHLANG_OUT)")
    return Path(out)


def _cmd_gen(args, parser) -> int:
    cfg = _load_cfg(args.config, args.seed)
    manifest = build_corpus(cfg, _sizes(args, cfg), _out_dir(args, parser),
                            jobs=args.jobs)
    print(json.dumps({"splits": manifest["splits"],
                      "out": str(_out_dir(args, parser))}))
    return 0


def _cmd_interpret(args) -> int:
    cfg = _load_cfg(args.config, None)
    syntax = Syntax.from_config(cfg)
    latent = LatentRules.from_config(cfg)
    bindings = {}
    if args.globals:
        tables, _ = _load_global_bindings(args.globals)
        bindings = tables[0]
    env = Environment(bindings)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        module = parse_module(line, _ACCEPT[args.accept], syntax)
        print(render_value(evaluate(module, env, latent).printed))
    return 0


def _cmd_translate(args) -> int:
    cfg = _load_cfg(args.config, None)
    syntax = Syntax.from_config(cfg)
    dst = RenderLang.LOLA if args.dst == "lola" else RenderLang.MEME
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        print(translate(line, _ACCEPT[args.src], dst, syntax))
    return 0


def _cmd_eval(args, parser) -> int:
    cfg = _load_cfg(args.config, None)
    pred_paths = list(args.pred)
    if args.oracle:
        predictions = oracle_predict(args.dataset, args.globals, cfg)
        path = Path(args.pred_out) if args.pred_out \
            else Path(args.dataset).with_suffix(".oracle-pred.jsonl")
        write_predictions(path, predictions)
        pred_paths.append(path)
    if not pred_paths:
        parser.error("need --pred and/or --oracle")
    report = score_predictions(args.dataset, pred_paths)
    blob = json.dumps(report.as_dict(), indent=2)
    if args.report:
        Path(args.report).write_text(blob + "\n", encoding="utf-8")
    print(blob)
    return 0


def _cmd_sweep(args, parser) -> int:
    base = _load_cfg(args.config, args.seed)
    out = _out_dir(args, parser)
    for label, cfg in sweep_configs(args.kind, base):
        target = out / label
        target.mkdir(parents=True, exist_ok=True)
        (target / "config.txt").write_text(serialize(cfg), encoding="utf-8")
        if args.configs_only:
            continue
        sizes = SplitSizes(
            train=args.train if args.train is not None else cfg.dataset_size,
            eval=args.eval if args.eval is not None else cfg.test_dataset_size,
            test_with_globals=0 if cfg.global_var_count == 0 else (
                args.test_global if args.test_global is not None
                else cfg.test_dataset_size),
            test_no_globals=args.test_noglobal if args.test_noglobal is not None
            else cfg.test_dataset_size,
        )
        build_corpus(cfg, sizes, target, jobs=args.jobs)
        print(f"built {label} -> {target}")
    return 0


def _cmd_stats(args) -> int:
    report = dataset_stats(args.dataset, args.globals)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def main(argv=None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args, parser)
        if args.command == "interpret":
            return _cmd_interpret(args)
        if args.command == "translate":
            return _cmd_translate(args)
        if args.command == "eval":
            return _cmd_eval(args, parser)
        if args.command == "sweep":
            return _cmd_sweep(args, parser)
        if args.command == "stats":
            return _cmd_stats(args)
        parser.error(f"unknown command {args.command!r}")
    except _INFEASIBLE as exc:
        print(f"synthlang: infeasible: {exc}", file=sys.stderr)
        return 3
    except (SynthlangError, OSError) as exc:
        print(f"synthlang: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
