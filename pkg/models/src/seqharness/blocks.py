"""Decoder building blocks: causal attention, causal long-convolution, MLP.

The long-convolution operator follows the order-2 recipe: input projections
pass through a short causal depthwise convolution, then two stages of
FFT-based causal long convolution with elementwise gating.  Long filters are
implicit: a small MLP over sinusoidal position features, windowed by a
learned per-channel exponential decay, generates the full-length kernels.
"""

from __future__ import annotations

import math

import torch
import torch.nn.functional as F
from torch import nn


class Mlp(nn.Module):
    def __init__(self, width: int):
        super().__init__()
        self.fc = nn.Linear(width, 4 * width)
        self.proj = nn.Linear(4 * width, width)

    def forward(self, x):
        return self.proj(F.gelu(self.fc(x)))


class CausalSelfAttention(nn.Module):
    def __init__(self, width: int, n_heads: int):
        super().__init__()
        self.n_heads = n_heads
        self.qkv = nn.Linear(width, 3 * width)
        self.proj = nn.Linear(width, width)

    def forward(self, x):
        b, l, d = x.shape
        q, k, v = self.qkv(x).chunk(3, dim=-1)
        shape = (b, l, self.n_heads, d // self.n_heads)
        q, k, v = (t.view(shape).transpose(1, 2) for t in (q, k, v))
        y = F.scaled_dot_product_attention(q, k, v, is_causal=True)
        return self.proj(y.transpose(1, 2).reshape(b, l, d))


class AttentionBlock(nn.Module):
    """Pre-norm residual attention + MLP block."""

    def __init__(self, width: int, n_heads: int):
        super().__init__()
        self.ln1 = nn.LayerNorm(width)
        self.attn = CausalSelfAttention(width, n_heads)
        self.ln2 = nn.LayerNorm(width)
        self.mlp = Mlp(width)

    def forward(self, x):
        x = x + self.attn(self.ln1(x))
        return x + self.mlp(self.ln2(x))


class ImplicitFilter(nn.Module):
    """Generates (order, length, width) causal kernels from position features."""

    def __init__(self, width: int, order: int, mlp_width: int, n_freqs: int,
                 max_timescale: float = 512.0):
        super().__init__()
        self.width = width
        self.order = order
        self.n_freqs = n_freqs
        in_features = 1 + 2 * n_freqs
        self.net = nn.Sequential(
            nn.Linear(in_features, mlp_width),
            _Sin(),
            nn.Linear(mlp_width, mlp_width),
            _Sin(),
            nn.Linear(mlp_width, order * width),
        )
        # Per-channel decay timescales spread log-uniformly from local to the
        # whole window, plus a learned floor so some kernels never vanish:
        # recall over arbitrary distances stays representable.
        decay = torch.linspace(math.log(0.5), math.log(max_timescale),
                               order * width)
        self.log_decay = nn.Parameter(decay)
        self.window_floor = nn.Parameter(
            torch.full((order * width,), 0.01))

    def forward(self, length: int):
        dtype = self.log_decay.dtype
        t = torch.arange(length, dtype=dtype, device=self.log_decay.device)
        t_norm = t / max(length, 1)
        freqs = torch.arange(1, self.n_freqs + 1, dtype=dtype, device=t.device)
        angles = 2 * math.pi * t_norm[:, None] * freqs[None, :]
        features = torch.cat(
            [t_norm[:, None], torch.sin(angles), torch.cos(angles)], dim=-1)
        h = self.net(features)  # (L, order*width)
        window = torch.exp(-t[:, None] / self.log_decay.exp()[None, :]) \
            + self.window_floor[None, :] ** 2
        h = h * window
        return h.view(length, self.order, self.width).permute(1, 0, 2)


class _Sin(nn.Module):
    def forward(self, x):
        return torch.sin(x)


def causal_fft_conv(v: torch.Tensor, h: torch.Tensor) -> torch.Tensor:
    """y[t] = sum_{s<=t} h[t-s] * v[s] along dim 1; v (B,L,D), h (L,D)."""
    length = v.shape[1]
    n = 2 * length
    fv = torch.fft.rfft(v, n=n, dim=1)
    fh = torch.fft.rfft(h, n=n, dim=0)
    return torch.fft.irfft(fv * fh[None], n=n, dim=1)[:, :length]


class HyenaOperator(nn.Module):
    """Attention-free causal sequence mixer with gating (order-2 default)."""

    def __init__(self, width: int, order: int, mlp_width: int, n_freqs: int,
                 short_conv_len: int):
        super().__init__()
        self.width = width
        self.order = order
        channels = (order + 1) * width
        self.in_proj = nn.Linear(width, channels)
        self.short_conv = nn.Conv1d(channels, channels, short_conv_len,
                                    padding=short_conv_len - 1, groups=channels)
        self.filters = ImplicitFilter(width, order, mlp_width, n_freqs)
        self.out_proj = nn.Linear(width, width)

    def forward(self, x):
        b, l, d = x.shape
        z = self.in_proj(x).transpose(1, 2)
        z = self.short_conv(z)[..., :l].transpose(1, 2)
        gates = [z[..., i * d:(i + 1) * d] for i in range(self.order)]
        v = z[..., self.order * d:]
        h = self.filters(l)
        for i in range(self.order):
            v = gates[i] * causal_fft_conv(v, h[i])
        return self.out_proj(v)


class HyenaBlock(nn.Module):
    """Pre-norm residual long-convolution + MLP block."""

    def __init__(self, width: int, order: int, mlp_width: int, n_freqs: int,
                 short_conv_len: int):
        super().__init__()
        self.ln1 = nn.LayerNorm(width)
        self.mixer = HyenaOperator(width, order, mlp_width, n_freqs,
                                   short_conv_len)
        self.ln2 = nn.LayerNorm(width)
        self.mlp = Mlp(width)

    def forward(self, x):
        x = x + self.mixer(self.ln1(x))
        return x + self.mlp(self.ln2(x))


class SwappedAttention(nn.Module):
    """An attention block at its own width, bridged into a wider stack by a
    pair of linear adapters."""

    def __init__(self, stack_width: int, attn_width: int, n_heads: int):
        super().__init__()
        self.adapter_in = nn.Linear(stack_width, attn_width)
        self.block = AttentionBlock(attn_width, n_heads)
        self.adapter_out = nn.Linear(attn_width, stack_width)

    def forward(self, x):
        return self.adapter_out(self.block(self.adapter_in(x)))
