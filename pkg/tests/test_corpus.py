import hashlib
import json
from dataclasses import replace
from pathlib import Path

import pytest

from synthlang.config import BASE_CONFIG, GlobalLayout, Language
from synthlang.corpus import (SplitSizes, _MandateSchedule, build_corpus,
                              dataset_stats, read_records)
from synthlang.errors import CorruptRecord, QuotaInfeasible
from synthlang.evalharness import sweep_configs
from synthlang.parser import Accept, parse_module


def tiny_cfg(**overrides):
    base = dict(global_var_count=30, global_variables_num_appearance=20,
                master_seed=11)
    base.update(overrides)
    return replace(BASE_CONFIG, **base)


def dir_digest(path: Path) -> dict:
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(path.iterdir())}


@pytest.fixture(scope="module")
def tiny_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    cfg = tiny_cfg()
    sizes = SplitSizes(train=400, eval=50, test_with_globals=50,
                       test_no_globals=50)
    manifest = build_corpus(cfg, sizes, out)
    return cfg, sizes, out, manifest


def test_quota_met_and_manifest_matches_recount(tiny_corpus):
    cfg, sizes, out, manifest = tiny_corpus
    quota = cfg.global_variables_num_appearance
    assert min(manifest["global_appearances"].values()) >= quota
    stats = dataset_stats(out / "train.jsonl", out / "globals.json")
    assert stats.global_appearances == manifest["global_appearances"]
    assert stats.unique_outputs == manifest["unique_outputs"]["train"]
    assert manifest["splits"] == {"train": 400, "eval": 50,
                                  "test_with_globals": 50,
                                  "test_no_globals": 50}


def test_split_disjointness(tiny_corpus):
    _, _, out, _ = tiny_corpus
    inputs = {}
    for split in ("train", "eval", "test_with_globals", "test_no_globals"):
        inputs[split] = {r["input"] for _, r in read_records(out / f"{split}.jsonl")}
        assert len(inputs[split]) == len(list(read_records(out / f"{split}.jsonl")))
    train = inputs.pop("train")
    for split, texts in inputs.items():
        assert not (train & texts), split


def test_byte_determinism_and_worker_independence(tmp_path):
    cfg = tiny_cfg()
    sizes = SplitSizes(train=150, eval=20, test_with_globals=20,
                       test_no_globals=20)
    digests = []
    for name, jobs in (("a", 1), ("b", 1), ("c", 2)):
        out = tmp_path / name
        build_corpus(cfg, sizes, out, jobs=jobs)
        digests.append(dir_digest(out))
    assert digests[0] == digests[1] == digests[2]


def test_seed_changes_bytes(tmp_path):
    sizes = SplitSizes(train=50)
    build_corpus(tiny_cfg(), sizes, tmp_path / "a")
    build_corpus(tiny_cfg(master_seed=12), sizes, tmp_path / "b")
    assert dir_digest(tmp_path / "a") != dir_digest(tmp_path / "b")


def test_quota_infeasible_precheck():
    with pytest.raises(QuotaInfeasible):
        build_corpus(replace(BASE_CONFIG, master_seed=1),
                     SplitSizes(train=10), "/tmp/never-written")


def test_feasibility_counting_argument():
    # 100 globals x quota 1000 over 1e5 samples needs one appearance per
    # sample on average; the schedule accepts it without generating.
    cfg = replace(BASE_CONFIG, global_var_count=100)
    schedule = _MandateSchedule.build(cfg, 100, 100_000, 1000)
    assert schedule.base == 1 and schedule.remainder == 0
    with pytest.raises(QuotaInfeasible):
        _MandateSchedule.build(cfg, 1000, 10, 1000)


def test_test_with_globals_requires_globals(tmp_path):
    cfg = tiny_cfg(global_var_count=0)
    with pytest.raises(QuotaInfeasible):
        build_corpus(cfg, SplitSizes(train=10, test_with_globals=5), tmp_path)


def test_mixed_half_alternates_dialects(tmp_path):
    cfg = tiny_cfg(language=Language.MIXED_HALF)
    build_corpus(cfg, SplitSizes(train=40), tmp_path)
    langs = [r["lang"] for _, r in read_records(tmp_path / "train.jsonl")]
    assert langs[0::2] == ["lola"] * 20
    assert langs[1::2] == ["meme"] * 20


def test_token_mix_applies_to_test_splits_only(tmp_path):
    cfg = tiny_cfg(language=Language.MIXED_HALF, test_token_mix=True)
    build_corpus(cfg, SplitSizes(train=30, test_no_globals=30), tmp_path)
    train_langs = {r["lang"] for _, r in read_records(tmp_path / "train.jsonl")}
    test_langs = {r["lang"] for _, r in read_records(tmp_path / "test_no_globals.jsonl")}
    assert train_langs == {"lola", "meme"}
    assert test_langs == {"mixed"}
    # Mixed rendering parses in mixed mode and can cross dialects per token.
    for _, record in read_records(tmp_path / "test_no_globals.jsonl"):
        parse_module(record["input"], Accept.ANY_MIXED)


def test_local_layout_segments(tmp_path):
    cfg = tiny_cfg(global_layout=GlobalLayout.LOCAL, segment_token_budget=3000,
                   global_var_count=8, global_variables_num_appearance=4)
    build_corpus(cfg, SplitSizes(train=120, test_with_globals=20), tmp_path)
    doc = json.loads((tmp_path / "globals.json").read_text())
    assert doc["layout"] == "LOCAL"
    assert len(doc["segments"]) >= 2
    tables = [{g["camel"] for g in seg["globals"]} for seg in doc["segments"]]
    for i in range(len(tables) - 1):
        assert not (tables[i] & tables[i + 1])
    # Samples only reference globals from their own segment.
    seg_size = doc["segment_size"]
    for _, record in read_records(tmp_path / "train.jsonl"):
        idx = int(record["id"].rsplit("-", 1)[1])
        seg = min(idx // seg_size, len(tables) - 1)
        for name in record["globals_used"]:
            owners = [k for k, t in enumerate(tables) if name in t]
            assert owners == [seg]


def test_stats_empty_file(tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    report = dataset_stats(empty)
    assert report.n == 0 and report.unique_outputs == 0


def test_stats_corrupt_record(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "a", "input": "x = 1;print(x)", "output": "1", '
                   '"lang": "lola", "mode": "train"}\nnot-json\n')
    with pytest.raises(CorruptRecord) as err:
        list(read_records(bad))
    assert err.value.line_no == 2


def test_operator_pretraining_token_stats(tmp_path):
    _, cfg = sweep_configs("operator_pretraining")[0]
    cfg = replace(cfg, master_seed=5)
    build_corpus(cfg, SplitSizes(train=2000), tmp_path)
    stats = dataset_stats(tmp_path / "train.jsonl")
    assert stats.mean_statements == 5.0
    assert 70 <= stats.mean_tokens <= 130
