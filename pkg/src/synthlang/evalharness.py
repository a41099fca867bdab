"""Exact-match scoring, the interpreter-as-model oracle, and sweep configs."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Mapping, Optional, Sequence

from .config import BASE_CONFIG, GenConfig, Language, LatentMod
from .corpus import read_records
from .errors import CorruptRecord
from .interpreter import Environment, LatentRules, evaluate
from .lang import RenderLang, Syntax, render_value
from .parser import Accept, parse_module


@dataclass(frozen=True)
class MatchResult:
    score: float
    n: int
    matched: int
    missing: int


def exact_match(predictions: Mapping[str, str],
                references: Mapping[str, str]) -> MatchResult:
    """Fraction of reference ids whose trimmed prediction is identical.

    Missing predictions count as wrong and are reported separately; extra
    prediction ids are ignored.
    """
    matched = 0
    missing = 0
    for rid, ref in references.items():
        pred = predictions.get(rid)
        if pred is None:
            missing += 1
        elif pred.strip() == ref.strip():
            matched += 1
    n = len(references)
    return MatchResult(matched / n if n else 0.0, n, matched, missing)


# -- oracle -------------------------------------------------------------------

def _load_global_bindings(globals_path) -> tuple[list[dict], Optional[int]]:
    doc = json.loads(Path(globals_path).read_text(encoding="utf-8"))
    tables = []
    for segment in doc["segments"]:
        bindings: dict[str, int] = {}
        for g in segment["globals"]:
            bindings[g["camel"]] = g["value"]
            bindings[g["snake"]] = g["value"]
        tables.append(bindings)
    return tables, doc.get("segment_size")


def _record_index(record: dict) -> int:
    rid = str(record.get("id", "0"))
    tail = rid.rsplit("-", 1)[-1]
    return int(tail) if tail.isdigit() else 0


def oracle_predict(dataset_path, globals_path=None,
                   cfg: GenConfig = BASE_CONFIG) -> dict[str, str]:
    """Predictions from the interpreter itself (a perfect model).

    Scores 1.0 against any corpus this tool emitted (typo-free configs);
    records in with-globals modes need the corpus globals file.
    """
    syntax = Syntax.from_config(cfg)
    latent = LatentRules.from_config(cfg)
    tables: list[dict] = [{}]
    segment_size: Optional[int] = None
    if globals_path is not None:
        tables, segment_size = _load_global_bindings(globals_path)
    predictions: dict[str, str] = {}
    empty = Environment({})
    for _, record in read_records(dataset_path):
        module = parse_module(record["input"], Accept.ANY_MIXED, syntax)
        if record.get("mode") == "test_no_globals":
            env = empty
        elif segment_size is None or record.get("mode") != "train":
            env = Environment(tables[0])
        else:
            seg = min(_record_index(record) // segment_size, len(tables) - 1)
            env = Environment(tables[seg])
        result = evaluate(module, env, latent)
        predictions[str(record["id"])] = render_value(result.printed)
    return predictions


# -- prediction files and reports ----------------------------------------------

def read_predictions(path) -> dict[str, str]:
    predictions: dict[str, str] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptRecord(path, line_no, f"bad JSON: {exc}") from exc
            if "id" not in record or "prediction" not in record:
                raise CorruptRecord(path, line_no, "need id and prediction fields")
            predictions[str(record["id"])] = str(record["prediction"])
    return predictions


def write_predictions(path, predictions: Mapping[str, str]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rid, pred in predictions.items():
            fh.write(json.dumps({"id": rid, "prediction": pred},
                                ensure_ascii=False))
            fh.write("\n")


@dataclass
class EvalReport:
    dataset_digest: str
    n: int
    per_seed: list[float]
    mean: float
    std: float
    missing: int

    def as_dict(self) -> dict:
        return {
            "dataset_digest": self.dataset_digest,
            "n": self.n,
            "per_seed": self.per_seed,
            "mean": self.mean,
            "std": self.std,
            "missing": self.missing,
        }


def score_predictions(dataset_path, prediction_paths: Sequence) -> EvalReport:
    """Score one or more prediction files (one per seed) against a dataset."""
    references = {str(r["id"]): r["output"] for _, r in read_records(dataset_path)}
    digest = hashlib.sha256(Path(dataset_path).read_bytes()).hexdigest()
    scores: list[float] = []
    missing = 0
    for path in prediction_paths:
        result = exact_match(read_predictions(path), references)
        scores.append(result.score)
        missing += result.missing
    mean = sum(scores) / len(scores) if scores else 0.0
    var = sum((s - mean) ** 2 for s in scores) / len(scores) if scores else 0.0
    return EvalReport(digest, len(references), scores, mean, var ** 0.5, missing)


# -- sweeps ---------------------------------------------------------------------

class SweepKind(Enum):
    MEMORIZATION = "memorization"
    VARIABLE_LENGTH = "variable_length"
    LONG_INPUT = "long_input"
    OPERATOR_PRETRAINING = "operator_pretraining"
    MIXING = "mixing"


def sweep_configs(kind: SweepKind | str,
                  base: GenConfig = BASE_CONFIG) -> list[tuple[str, GenConfig]]:
    """Labelled configs for the standard experiment sweeps."""
    if isinstance(kind, str):
        kind = SweepKind(kind.lower().replace("-", "_"))
    if kind is SweepKind.MEMORIZATION:
        return [(f"globals-{count:04d}", replace(base, global_var_count=count))
                for count in range(100, 1001, 100)]
    if kind is SweepKind.VARIABLE_LENGTH:
        configs = []
        for mean in range(3, 10):
            configs.append((f"varlen-{mean}", replace(
                base,
                min_var_length=round(0.75 * mean),
                max_var_length=round(1.25 * mean),
                latent_modification_a=LatentMod.NONE,
                latent_modification_b=LatentMod.NONE,
                latent_modification_c=LatentMod.NONE,
                global_var_count=1000,
            )))
        return configs
    if kind is SweepKind.LONG_INPUT:
        return [("long-input-15", replace(base, statement_count=15,
                                          global_var_count=1000))]
    if kind is SweepKind.OPERATOR_PRETRAINING:
        return [("operator-pretraining", replace(
            base, global_var_count=0, statement_count=5, dataset_size=100_000))]
    if kind is SweepKind.MIXING:
        mixed = replace(base, language=Language.MIXED_HALF)
        return [("mixing-sample", mixed),
                ("mixing-module", replace(mixed, test_token_mix=True))]
    raise ValueError(f"unknown sweep kind {kind!r}")
