"""Deterministic single-process training loop."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import torch
import torch.nn.functional as F

from .data import Batcher, load_examples
from .model import SequenceModel, build_model
from .specs import ModelSpec, TrainSpec
from .vocab import vocab_for


def sequence_loss(logits: torch.Tensor, tokens: torch.Tensor,
                  pad_id: int) -> torch.Tensor:
    """Next-token cross-entropy over the whole serialized sequence."""
    targets = tokens[:, 1:].reshape(-1)
    flat = logits[:, :-1].reshape(targets.shape[0], -1)
    return F.cross_entropy(flat, targets, ignore_index=pad_id)


def _lr_at(step: int, spec: TrainSpec) -> float:
    if spec.steps <= 0:
        return spec.lr
    if step < spec.warmup:
        return spec.lr * (step + 1) / max(spec.warmup, 1)
    span = max(spec.steps - spec.warmup, 1)
    progress = (step - spec.warmup) / span
    floor = spec.min_lr_fraction
    return spec.lr * (floor + (1 - floor) * 0.5 * (1 + math.cos(math.pi * progress)))


@dataclass
class TrainResult:
    losses: list[float]
    fixed_batch_initial: float
    fixed_batch_final: float
    skipped_overflow: int


def train(model: SequenceModel, spec: TrainSpec, seed: int = 0) -> TrainResult:
    """Train in place; deterministic for a given (model seed, data seed)."""
    torch.manual_seed(seed)
    vocab = vocab_for(model.spec)
    examples, skipped = load_examples(spec.corpus, model.spec.context_len,
                                      vocab=vocab)
    batcher = Batcher(examples, spec.batch_size, seed, vocab.pad)
    fixed = batcher.next_batch()

    model.eval()
    with torch.no_grad():
        initial = sequence_loss(model(fixed), fixed, vocab.pad).item()
    if spec.steps == 0:
        return TrainResult([], initial, initial, skipped)

    optim = torch.optim.AdamW(model.parameters(), lr=spec.lr)
    model.train()
    losses: list[float] = []
    for step in range(spec.steps):
        for group in optim.param_groups:
            group["lr"] = _lr_at(step, spec)
        batch = batcher.next_batch()
        loss = sequence_loss(model(batch), batch, vocab.pad)
        optim.zero_grad()
        loss.backward()
        torch.nn.utils.clip_grad_norm_(model.parameters(), spec.grad_clip)
        optim.step()
        losses.append(loss.item())

    model.eval()
    with torch.no_grad():
        final = sequence_loss(model(fixed), fixed, vocab.pad).item()
    return TrainResult(losses, initial, final, skipped)


def save_checkpoint(path: str | Path, model: SequenceModel,
                    result: TrainResult | None = None) -> None:
    payload = {
        "model_spec": model.spec.__dict__,
        "state_dict": model.state_dict(),
        "losses": result.losses if result else [],
    }
    torch.save(payload, path)


def load_checkpoint(path: str | Path) -> SequenceModel:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    model = build_model(ModelSpec(**payload["model_spec"]))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model
