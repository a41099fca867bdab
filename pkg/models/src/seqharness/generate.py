"""Greedy answer decoding and generation-side evaluation.

Prompts are grouped by identical length so batches need no padding: the
convolution stacks have no pad masking, so mixing prompt lengths in one
batch would shift their filters.  Predictions go to the evaluation
harness's file format (one ``{"id", "prediction"}`` object per line).
"""

from __future__ import annotations

import json
import random
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import torch

from .data import load_examples
from .model import SequenceModel
from .vocab import vocab_for


@dataclass
class GenerationReport:
    n_scored: int
    skipped_overflow: int
    exact_match: float

    def as_dict(self) -> dict:
        return {"n_scored": self.n_scored,
                "skipped_overflow": self.skipped_overflow,
                "exact_match": self.exact_match}


@torch.no_grad()
def greedy_answers(model: SequenceModel, prompts: list[tuple[int, ...]],
                   max_new: int, batch_size: int = 128,
                   vocab=None) -> list[str]:
    """Greedy continuation of each prompt until EOS or the answer budget."""
    vocab = vocab or vocab_for(model.spec)
    model.eval()
    answers: list[str] = [""] * len(prompts)
    by_length: dict[int, list[int]] = defaultdict(list)
    for i, prompt in enumerate(prompts):
        by_length[len(prompt)].append(i)
    for length, indices in sorted(by_length.items()):
        for start in range(0, len(indices), batch_size):
            chunk = indices[start:start + batch_size]
            tokens = torch.tensor([prompts[i] for i in chunk], dtype=torch.long)
            done = torch.zeros(len(chunk), dtype=torch.bool)
            for _ in range(max_new):
                logits = model(tokens)[:, -1]
                nxt = logits.argmax(dim=-1)
                nxt[done] = vocab.eos
                tokens = torch.cat([tokens, nxt[:, None]], dim=1)
                done |= nxt == vocab.eos
                if bool(done.all()):
                    break
            for row, i in enumerate(chunk):
                gen = tokens[row, length:].tolist()
                if vocab.eos in gen:
                    gen = gen[:gen.index(vocab.eos)]
                answers[i] = vocab.decode(gen)
    return answers


def evaluate_generation(model: SequenceModel, dataset_path: str | Path,
                        predictions_path: str | Path,
                        max_answer_len: int = 16,
                        batch_size: int = 128,
                        limit: int | None = None) -> GenerationReport:
    """Decode the dataset, write predictions, and report trimmed exact match."""
    vocab = vocab_for(model.spec)
    examples, skipped = load_examples(dataset_path, model.spec.context_len,
                                      answer_budget=max_answer_len,
                                      limit=limit, vocab=vocab)
    answers = greedy_answers(model, [e.prompt for e in examples],
                             max_answer_len, batch_size, vocab)
    matched = 0
    with Path(predictions_path).open("w", encoding="utf-8") as fh:
        for example, answer in zip(examples, answers):
            fh.write(json.dumps({"id": example.id, "prediction": answer}))
            fh.write("\n")
            reference = vocab.decode(example.answer)
            matched += answer.strip() == reference.strip()
    n = len(examples)
    return GenerationReport(n, skipped, matched / n if n else 0.0)


def baseline_predictions(dataset_path: str | Path, seed: int = 0,
                         limit: int | None = None) -> dict[str, str]:
    """Random outputs drawn from the observed label distribution."""
    rng = random.Random(seed)
    records = []
    with Path(dataset_path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
                if limit is not None and len(records) >= limit:
                    break
    labels = [r["output"] for r in records]
    return {str(r["id"]): rng.choice(labels) for r in records}
