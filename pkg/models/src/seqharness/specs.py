"""Model and training descriptors.

Width defaults keep the 8:9 attention:convolution ratio (64:72) so the
hybrid's adapters exercise the same shape relationship at desk scale that
the full-size stacks (768:864) use.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("gpt2", "hyena", "thex")

PAD, SEP, EOS = 256, 257, 258
VOCAB_SIZE = 259  # 256 byte values + PAD + SEP + EOS


class InvalidSpec(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    n_layers: int = 6
    attn_width: int = 64
    hyena_width: int = 72
    swap_index: int = 0  # thex only; 0-based from the input layer
    vocab_size: int = VOCAB_SIZE
    vocab_file: str | None = None  # None = byte-level
    context_len: int = 512
    n_heads: int = 4
    seed: int = 0
    # Long-convolution operator internals (order-2, implicit filters).
    hyena_order: int = 2
    filter_mlp_width: int = 32
    filter_n_freqs: int = 8
    short_conv_len: int = 3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n_layers < 1:
            raise InvalidSpec("n_layers must be >= 1")
        if self.kind == "thex" and not 0 <= self.swap_index < self.n_layers:
            raise InvalidSpec(
                f"swap_index {self.swap_index} outside 0..{self.n_layers - 1}")
        if self.attn_width % self.n_heads:
            raise InvalidSpec("attn_width must be divisible by n_heads")
        if min(self.attn_width, self.hyena_width, self.context_len) < 1:
            raise InvalidSpec("widths and context_len must be positive")

    @property
    def stack_width(self) -> int:
        return self.attn_width if self.kind == "gpt2" else self.hyena_width


@dataclass(frozen=True)
class TrainSpec:
    corpus: str | Path
    steps: int
    batch_size: int = 32
    lr: float = 3e-3
    warmup: int = 100
    min_lr_fraction: float = 0.1
    grad_clip: float = 1.0
    seeds: tuple[int, ...] = (0,)
    log_every: int = 50
    max_answer_len: int = 16
