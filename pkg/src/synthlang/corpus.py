"""Corpus assembly: splits, global-appearance quotas, layouts, manifests.

The train split must give every global at least its configured number of
appearances.  Rather than feedback-biased sampling (which would make samples
depend on generation order), appearances are scheduled up front: appearance
slot j belongs to global ``j mod G``, and sample i owns a fixed block of
slots.  Each sample therefore receives a small list of mandated globals that
is a pure function of (config, seed, index), generation parallelizes freely,
and the schedule covers every global exactly quota times.  A verification
pass recounts appearances from the rendered text before the manifest is
written.

Token counts use a character proxy (one token per character of a record's
input and output); record texts are short programs, so this tracks the
byte-level serialization consumed by the model harness.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__, rngstream
from .config import GenConfig, GlobalLayout, Language, ensure_valid, config_as_dict
from .errors import CorruptRecord, QuotaInfeasible, QuotaUnmet
from .generator import (Mode, NamePool, Sample, _NAME_TOKEN, FORM_WEIGHTS,
                        build_name_pool, generate_sample)
from .lang import RenderLang

SPLIT_ORDER = ("train", "eval", "test_with_globals", "test_no_globals")
_SPLIT_STREAM = {
    "train": rngstream.STREAM_TRAIN,
    "eval": rngstream.STREAM_EVAL,
    "test_with_globals": rngstream.STREAM_TEST_WITH_GLOBALS,
    "test_no_globals": rngstream.STREAM_TEST_NO_GLOBALS,
}
_SPLIT_MODE = {
    "train": Mode.TRAIN,
    "eval": Mode.TRAIN,
    "test_with_globals": Mode.TEST_WITH_GLOBALS,
    "test_no_globals": Mode.TEST_NO_GLOBALS,
}
_PROBE_COUNT = 64


@dataclass(frozen=True)
class SplitSizes:
    train: int
    eval: int = 0
    test_with_globals: int = 0
    test_no_globals: int = 0

    @classmethod
    def from_config(cls, cfg: GenConfig) -> "SplitSizes":
        return cls(train=cfg.dataset_size, eval=cfg.test_dataset_size,
                   test_with_globals=cfg.test_dataset_size,
                   test_no_globals=cfg.test_dataset_size)

    def get(self, split: str) -> int:
        return getattr(self, split)


def _sample_capacity(cfg: GenConfig) -> int:
    return cfg.statement_count * (2 ** cfg.expression_max_depth)


@dataclass(frozen=True)
class _MandateSchedule:
    """Per-sample appearance slots: sample i owns ``base`` slots (+1 for the
    first ``remainder`` samples) and slot j maps to global ``j mod G``."""

    base: int
    remainder: int

    @classmethod
    def build(cls, cfg: GenConfig, n_globals: int, n_samples: int,
              quota: int) -> "_MandateSchedule":
        required = n_globals * quota
        if required == 0 or n_samples == 0:
            return cls(0, 0)
        if required > n_samples * _sample_capacity(cfg):
            raise QuotaInfeasible(
                f"{required} global appearances cannot fit in {n_samples} "
                f"samples of capacity {_sample_capacity(cfg)}")
        return cls(required // n_samples, required % n_samples)

    def mirror(self) -> "_MandateSchedule":
        """Same per-sample intensity without the exact-coverage remainder;
        used for splits that should look like train but carry no quota."""
        return _MandateSchedule(self.base, 0)

    def for_sample(self, i: int, order: tuple[str, ...]) -> tuple[str, ...]:
        count = self.base + (1 if i < self.remainder else 0)
        if count == 0 or not order:
            return ()
        start = self.base * i + min(i, self.remainder)
        g = len(order)
        return tuple(order[(start + k) % g] for k in range(count))


@dataclass
class _Plan:
    """Everything needed to generate any sample deterministically."""

    cfg: GenConfig
    pools: list[NamePool]
    schedules: dict[str, _MandateSchedule]
    segment_size: Optional[int]

    def pool_for(self, split: str, index: int) -> tuple[int, NamePool]:
        if self.segment_size is None or split in ("test_with_globals",
                                                  "test_no_globals"):
            return 0, self.pools[0]
        seg = min(index // self.segment_size, len(self.pools) - 1)
        return seg, self.pools[seg]

    def dialect_for(self, index: int) -> RenderLang:
        if self.cfg.language is Language.MEME:
            return RenderLang.MEME
        if self.cfg.language is Language.MIXED_HALF:
            return RenderLang.LOLA if index % 2 == 0 else RenderLang.MEME
        return RenderLang.LOLA

    def token_mix_for(self, split: str) -> bool:
        return self.cfg.test_token_mix and split.startswith("test")

    def make(self, split: str, index: int, retry_start: int = 0
             ) -> tuple[Sample, int]:
        seg, pool = self.pool_for(split, index)
        schedule = self.schedules.get(split)
        if schedule is None:
            mandated: tuple[str, ...] = ()
        else:
            local = index if self.segment_size is None \
                else index - seg * self.segment_size
            mandated = schedule.for_sample(local, pool.global_order)
        return generate_sample(
            self.cfg, pool, _SPLIT_MODE[split], _SPLIT_STREAM[split], index,
            dialect=self.dialect_for(index),
            token_mix=self.token_mix_for(split),
            mandated=mandated,
            sample_id=f"{split}-{index:06d}",
            retry_start=retry_start,
        )


def _estimate_segment_size(cfg: GenConfig, pool: NamePool) -> int:
    total = 0
    for i in range(_PROBE_COUNT):
        sample, _ = generate_sample(cfg, pool, Mode.TRAIN,
                                    rngstream.STREAM_PROBE, i)
        total += len(sample.input) + len(sample.output) + 1
    avg = max(1, total // _PROBE_COUNT)
    return max(1, cfg.segment_token_budget // avg)


def _build_plan(cfg: GenConfig, sizes: SplitSizes) -> _Plan:
    quota = cfg.global_variables_num_appearance
    if cfg.global_layout is GlobalLayout.LOCAL:
        taken: set[str] = set()
        first = build_name_pool(cfg, cfg.master_seed, 0, taken=taken)
        seg_size = _estimate_segment_size(cfg, first)
        n_segments = max(1, -(-sizes.train // seg_size))
        pools = [first] + [build_name_pool(cfg, cfg.master_seed, k, taken=taken)
                           for k in range(1, n_segments)]
        # Quota scales with segment share of the train split.
        seg_quota = -(-quota * min(seg_size, sizes.train) // max(sizes.train, 1))
        train_sched = _MandateSchedule.build(
            cfg, cfg.global_var_count, min(seg_size, max(sizes.train, 1)), seg_quota)
        return _Plan(cfg, pools, {"train": train_sched,
                                  "eval": train_sched.mirror()}, seg_size)

    pool = build_name_pool(cfg, cfg.master_seed, 0)
    train_sched = _MandateSchedule.build(
        cfg, cfg.global_var_count, max(sizes.train, 1), quota)
    return _Plan(cfg, [pool], {"train": train_sched,
                               "eval": train_sched.mirror()}, None)


# -- parallel workers ---------------------------------------------------------

_WORKER_PLAN: Optional[_Plan] = None


def _worker_init(plan: _Plan) -> None:
    global _WORKER_PLAN
    _WORKER_PLAN = plan


def _worker_chunk(args: tuple[str, int, int]) -> list[tuple[Sample, int]]:
    split, start, end = args
    return [_WORKER_PLAN.make(split, i) for i in range(start, end)]


def _iter_candidates(plan: _Plan, split: str, n: int, jobs: int):
    if jobs <= 1:
        for i in range(n):
            yield plan.make(split, i)
        return
    chunk = 1024
    tasks = [(split, s, min(s + chunk, n)) for s in range(0, n, chunk)]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(jobs, initializer=_worker_init, initargs=(plan,)) as pool:
        for batch in pool.imap(_worker_chunk, tasks):
            yield from batch


# -- build --------------------------------------------------------------------

def build_corpus(cfg: GenConfig, sizes: SplitSizes, out_dir: str | Path,
                 jobs: int = 1) -> dict:
    """Generate all requested splits plus globals.json and manifest.json.

    Byte-deterministic for a given (config, master_seed, sizes); raises
    QuotaInfeasible before generating and QuotaUnmet if the final recount
    finds any train global below quota.
    """
    ensure_valid(cfg)
    if cfg.global_var_count == 0 and sizes.test_with_globals > 0:
        raise QuotaInfeasible(
            "test_with_globals split requires GLOBAL_VAR_COUNT > 0")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    plan = _build_plan(cfg, sizes)

    seen: set[str] = set()
    appearances: Counter = Counter()
    unique_outputs: dict[str, int] = {}
    token_counts: dict[str, int] = {}
    written: dict[str, int] = {}
    files: dict[str, str] = {}
    global_surfaces = frozenset().union(
        *(p.global_surfaces for p in plan.pools))

    for split in SPLIT_ORDER:
        n = sizes.get(split)
        if n == 0:
            continue
        path = out / f"{split}.jsonl"
        outputs: set[str] = set()
        tokens = 0
        with path.open("w", encoding="utf-8") as fh:
            for index, (sample, retries) in enumerate(
                    _iter_candidates(plan, split, n, jobs)):
                while sample.input in seen:
                    sample, retries = plan.make(split, index,
                                                retry_start=retries + 1)
                seen.add(sample.input)
                if split == "train":
                    for tok in _NAME_TOKEN.findall(sample.input):
                        if tok in global_surfaces:
                            appearances[tok] += 1
                outputs.add(sample.output)
                tokens += len(sample.input) + len(sample.output) + 1
                fh.write(json.dumps(sample.record(), ensure_ascii=False))
                fh.write("\n")
        files[split] = path.name
        written[split] = n
        unique_outputs[split] = len(outputs)
        token_counts[split] = tokens

    globals_doc = _globals_document(plan, sizes)
    globals_path = out / "globals.json"
    globals_blob = json.dumps(globals_doc, indent=2, sort_keys=True)
    globals_path.write_text(globals_blob + "\n", encoding="utf-8")

    per_global = _aggregate_appearances(plan, appearances)
    quota = cfg.global_variables_num_appearance
    if sizes.train and cfg.global_var_count and quota \
            and cfg.global_layout is GlobalLayout.DISTRIBUTED:
        short = {name: c for name, c in per_global.items() if c < quota}
        if short:
            worst = min(short.items(), key=lambda kv: kv[1])
            raise QuotaUnmet(
                f"{len(short)} globals below quota {quota}; worst {worst[0]} "
                f"with {worst[1]}")

    manifest = {
        "tool": "synthlang",
        "version": __version__,
        "master_seed": cfg.master_seed,
        "config": config_as_dict(cfg),
        "splits": written,
        "files": files,
        "layout": cfg.global_layout.value,
        "segment_size": plan.segment_size,
        "global_table_digest": hashlib.sha256(globals_blob.encode()).hexdigest(),
        "global_appearances": per_global,
        "quota": quota,
        "unique_outputs": unique_outputs,
        "token_counts": token_counts,
        "token_proxy": "characters of input + output + 1 per record",
        "statement_forms": {k: dict(v) for k, v in FORM_WEIGHTS.items()},
        "substream_derivation": rngstream.DERIVATION_NOTE,
        "dialect_assignment": "MIXED_HALF alternates lola/meme by sample index",
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def _globals_document(plan: _Plan, sizes: SplitSizes) -> dict:
    segments = []
    seg = plan.segment_size
    for k, pool in enumerate(plan.pools):
        start = 0 if seg is None else k * seg
        end = sizes.train if seg is None else min((k + 1) * seg, sizes.train)
        segments.append({
            "start": start,
            "end": end,
            "globals": [
                {"camel": e.name.camel, "snake": e.name.snake, "value": e.value}
                for e in pool.globals.values()
            ],
        })
    return {
        "layout": plan.cfg.global_layout.value,
        "segment_size": seg,
        "segments": segments,
        "note": "train/eval samples use the segment covering their index; "
                "test splits use segment 0",
    }


def _aggregate_appearances(plan: _Plan, appearances: Counter) -> dict[str, int]:
    out: dict[str, int] = {}
    for pool in plan.pools:
        for entry in pool.globals.values():
            total = appearances.get(entry.name.camel, 0)
            if entry.name.snake != entry.name.camel:
                total += appearances.get(entry.name.snake, 0)
            out[entry.name.camel] = total
    return out


# -- stats --------------------------------------------------------------------

_REQUIRED_FIELDS = ("id", "input", "output", "lang", "mode")


@dataclass
class StatsReport:
    n: int = 0
    unique_outputs: int = 0
    output_histogram: dict = field(default_factory=dict)
    mean_statements: float = 0.0
    max_statements: int = 0
    mean_tokens: float = 0.0
    global_appearances: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        top = sorted(self.output_histogram.items(),
                     key=lambda kv: (-kv[1], kv[0]))[:20]
        return {
            "n": self.n,
            "unique_outputs": self.unique_outputs,
            "mean_statements": round(self.mean_statements, 3),
            "max_statements": self.max_statements,
            "mean_tokens": round(self.mean_tokens, 3),
            "top_outputs": top,
            "global_appearances_min":
                min(self.global_appearances.values(), default=None),
        }


def read_records(path: str | Path):
    """Yield (line_no, record) from a dataset file; raises CorruptRecord."""
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptRecord(path, line_no, f"bad JSON: {exc}") from exc
            missing = [f for f in _REQUIRED_FIELDS if f not in record]
            if missing:
                raise CorruptRecord(path, line_no, f"missing fields {missing}")
            yield line_no, record


def dataset_stats(path: str | Path,
                  globals_path: Optional[str | Path] = None) -> StatsReport:
    """Recount everything the manifest claims, from the emitted file."""
    report = StatsReport()
    histogram: Counter = Counter()
    statements = 0
    tokens = 0
    surface_counts: Counter = Counter()
    surfaces: dict[str, str] = {}
    if globals_path is not None:
        doc = json.loads(Path(globals_path).read_text(encoding="utf-8"))
        for segment in doc["segments"]:
            for g in segment["globals"]:
                surfaces[g["camel"]] = g["camel"]
                surfaces[g["snake"]] = g["camel"]
    for _, record in read_records(path):
        report.n += 1
        histogram[record["output"]] += 1
        count = record["input"].count(";")
        statements += count
        report.max_statements = max(report.max_statements, count)
        tokens += len(record["input"]) + len(record["output"]) + 1
        if surfaces:
            for tok in _NAME_TOKEN.findall(record["input"]):
                primary = surfaces.get(tok)
                if primary is not None:
                    surface_counts[primary] += 1
    report.output_histogram = dict(histogram)
    report.unique_outputs = len(histogram)
    if report.n:
        report.mean_statements = statements / report.n
        report.mean_tokens = tokens / report.n
    if surfaces:
        report.global_appearances = {
            camel: surface_counts.get(camel, 0) for camel in set(surfaces.values())}
    return report
