"""Decoder stacks and structural checks (inventory, causality)."""

from __future__ import annotations

import torch
from torch import nn

from .blocks import AttentionBlock, HyenaBlock, SwappedAttention
from .specs import ModelSpec

_MASK64 = (1 << 64) - 1


def _mix(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def _block_seed(seed: int, position: int) -> int:
    # Per-position seeds keep non-swapped blocks bit-identical between the
    # pure stack and the hybrid (swap-locality).
    return _mix(_mix(seed & _MASK64) ^ position) % (2 ** 63)


def _init_weights(module: nn.Module, n_layers: int) -> None:
    """Default linear/conv init (the gated mixers need healthy scales);
    embeddings small-normal, residual-branch projections scaled down."""
    residual_scale = (2 * n_layers) ** -0.5
    for name, sub in module.named_modules():
        if isinstance(sub, nn.Linear) and name.endswith((".proj", "out_proj",
                                                         "adapter_out")):
            with torch.no_grad():
                sub.weight.mul_(residual_scale)
        elif isinstance(sub, nn.Embedding):
            nn.init.normal_(sub.weight, mean=0.0, std=0.02)


class SequenceModel(nn.Module):
    """Byte-level causal LM: embedding, block stack, layer norm, logit head.

    The attention stack takes learned absolute position embeddings; the
    convolution stacks get position information from their implicit filters
    and need none.
    """

    def __init__(self, spec: ModelSpec):
        super().__init__()
        self.spec = spec
        width = spec.stack_width

        torch.manual_seed(_block_seed(spec.seed, 10_001))
        self.embed = nn.Embedding(spec.vocab_size, width)
        _init_weights(self, spec.n_layers)
        self.pos_embed = None
        if spec.kind == "gpt2":
            self.pos_embed = nn.Embedding(spec.context_len, width)
            _init_weights(self.pos_embed, spec.n_layers)

        blocks = []
        for position in range(spec.n_layers):
            torch.manual_seed(_block_seed(spec.seed, position))
            block = self._make_block(position)
            _init_weights(block, spec.n_layers)
            blocks.append(block)
        self.blocks = nn.ModuleList(blocks)

        torch.manual_seed(_block_seed(spec.seed, 10_002))
        self.ln_out = nn.LayerNorm(width)
        self.head = nn.Linear(width, spec.vocab_size)

    def _make_block(self, position: int) -> nn.Module:
        spec = self.spec
        if spec.kind == "gpt2":
            return AttentionBlock(spec.attn_width, spec.n_heads)
        if spec.kind == "thex" and position == spec.swap_index:
            # Swapped attention draws from its own stream so the remaining
            # positions keep the pure stack's draws.
            torch.manual_seed(_block_seed(spec.seed, 20_000 + position))
            return SwappedAttention(spec.hyena_width, spec.attn_width,
                                    spec.n_heads)
        return HyenaBlock(spec.hyena_width, spec.hyena_order,
                          spec.filter_mlp_width, spec.filter_n_freqs,
                          spec.short_conv_len)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        x = self.embed(tokens)
        if self.pos_embed is not None:
            positions = torch.arange(tokens.shape[1], device=tokens.device)
            x = x + self.pos_embed(positions)[None]
        for block in self.blocks:
            x = block(x)
        return self.head(self.ln_out(x))


def build_model(spec: ModelSpec) -> SequenceModel:
    return SequenceModel(spec)


def param_inventory(model: SequenceModel) -> list[dict]:
    """Deterministic structural listing: one entry per block plus edges."""

    def count(module) -> int:
        return sum(p.numel() for p in module.parameters())

    spec = model.spec
    rows = [{"position": None, "kind": "embedding",
             "width": spec.stack_width, "params": count(model.embed)
             + (count(model.pos_embed) if model.pos_embed is not None else 0)}]
    for position, block in enumerate(model.blocks):
        if isinstance(block, SwappedAttention):
            rows.append({"position": position, "kind": "adapter_in",
                         "shape": [spec.hyena_width, spec.attn_width],
                         "params": count(block.adapter_in)})
            rows.append({"position": position, "kind": "attention",
                         "width": spec.attn_width,
                         "params": count(block.block)})
            rows.append({"position": position, "kind": "adapter_out",
                         "shape": [spec.attn_width, spec.hyena_width],
                         "params": count(block.adapter_out)})
        elif isinstance(block, AttentionBlock):
            rows.append({"position": position, "kind": "attention",
                         "width": spec.attn_width, "params": count(block)})
        else:
            rows.append({"position": position, "kind": "hyena",
                         "width": spec.hyena_width, "params": count(block)})
    rows.append({"position": None, "kind": "head", "width": spec.stack_width,
                 "params": count(model.ln_out) + count(model.head)})
    return rows


def causality_check(model: SequenceModel, probe_len: int = 48,
                    tol: float = 1e-5, seed: int = 0) -> tuple[bool, float]:
    """Perturb position t; outputs before t must not move (within tol).

    Runs in float64 so the check reflects architecture, not FFT roundoff.
    """
    probe_len = min(probe_len, model.spec.context_len)
    dbl = build_model(model.spec).double()
    dbl.load_state_dict({k: v.double() for k, v in model.state_dict().items()})
    dbl.eval()
    gen = torch.Generator().manual_seed(seed)
    tokens = torch.randint(0, model.spec.vocab_size, (1, probe_len),
                           generator=gen)
    with torch.no_grad():
        base = dbl(tokens)
    worst = 0.0
    for t in sorted({probe_len // 4, probe_len // 2, probe_len - 1}):
        perturbed = tokens.clone()
        perturbed[0, t] = (perturbed[0, t] + 1) % model.spec.vocab_size
        with torch.no_grad():
            out = dbl(perturbed)
        if t > 0:
            leak = (out[0, :t] - base[0, :t]).abs().max().item()
            worst = max(worst, leak)
    return worst < tol, worst
