"""Corpus reading and batching for synthlang record files.

Records are JSON lines with input and output text.  A training sequence is
``encode(input) + SEP + encode(output) + EOS`` under the model's vocabulary
(byte-level unless a token file is supplied); batches pad on the right and
the loss mask drops padded targets.  Records whose full sequence (or whose
prompt plus answer budget, for generation) exceed the context window are
skipped and counted.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import torch

from .vocab import BYTE_VOCAB


class DataError(RuntimeError):
    pass


@dataclass(frozen=True)
class Example:
    id: str
    prompt: tuple[int, ...]  # encode(input) + SEP
    answer: tuple[int, ...]  # encode(output) + EOS

    @property
    def tokens(self) -> tuple[int, ...]:
        return self.prompt + self.answer


def load_examples(path: str | Path, context_len: int,
                  answer_budget: int = 0, limit: int | None = None,
                  vocab=BYTE_VOCAB) -> tuple[list[Example], int]:
    """(usable examples, skipped-overflow count)."""
    examples: list[Example] = []
    skipped = 0
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                prompt = vocab.encode(record["input"]) + (vocab.sep,)
                answer = vocab.encode(record["output"]) + (vocab.eos,)
                example = Example(str(record["id"]), prompt, answer)
            except (json.JSONDecodeError, KeyError) as exc:
                raise DataError(f"{path}:{line_no}: {exc}") from exc
            budget = max(len(example.tokens), len(prompt) + answer_budget)
            if budget > context_len:
                skipped += 1
                continue
            examples.append(example)
            if limit is not None and len(examples) >= limit:
                break
    return examples, skipped


def pad_batch(sequences: list[tuple[int, ...]], pad_id: int) -> torch.Tensor:
    width = max(len(s) for s in sequences)
    out = torch.full((len(sequences), width), pad_id, dtype=torch.long)
    for i, seq in enumerate(sequences):
        out[i, :len(seq)] = torch.tensor(seq, dtype=torch.long)
    return out


class Batcher:
    """Seeded uniform-with-replacement batch stream over the examples.

    Examples are bucketed by similar length and each batch draws within one
    bucket (buckets weighted by size), which keeps per-example sampling close
    to uniform while avoiding padding to the corpus-wide maximum.
    """

    BUCKET_WIDTH = 16

    def __init__(self, examples: list[Example], batch_size: int, seed: int,
                 pad_id: int):
        if not examples:
            raise DataError("no usable examples")
        self.batch_size = batch_size
        self.pad_id = pad_id
        self.rng = random.Random(seed)
        buckets: dict[int, list[Example]] = {}
        for example in examples:
            buckets.setdefault(len(example.tokens) // self.BUCKET_WIDTH,
                               []).append(example)
        self.buckets = [buckets[k] for k in sorted(buckets)]
        self.weights = [len(b) for b in self.buckets]

    def next_batch(self) -> torch.Tensor:
        bucket = self.rng.choices(self.buckets, weights=self.weights)[0]
        picks = [bucket[self.rng.randrange(len(bucket))]
                 for _ in range(self.batch_size)]
        return pad_batch([p.tokens for p in picks], self.pad_id)
