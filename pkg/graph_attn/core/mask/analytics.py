# graph_attn/core/mask/analytics.py
"""Sparsity analytics: sparsity factor, the LongNet-derived schedule and window sizing."""

from __future__ import annotations

import math

from graph_attn.core.errors import PatternError
from graph_attn.core.mask.formats import CooMask, CsrMask
from graph_attn.core.mask.graph import neighbor_source
from graph_attn.core.mask.patterns import Dilated1D, MaskPattern, Random

__all__: list[str] = [
    "LONGNET_DOT_PRODUCTS_PER_TOKEN",
    "sparsity_factor",
    "longnet_sparsity",
    "expected_nnz",
    "local_nnz",
    "window_for_sparsity",
    "block_for_sparsity",
]

# dot products per token under LongNet's alpha=2, w0=2048 schedule
LONGNET_DOT_PRODUCTS_PER_TOKEN = 2730


def sparsity_factor(m: CsrMask | CooMask) -> float:
    """nnz / L²."""
    return m.nnz / (m.length * m.length)


def longnet_sparsity(L: int) -> float:
    """min(1, 2730 / L)."""
    if L < 1:
        raise PatternError(f"context length must be >= 1, got {L}", length=L)
    return min(1.0, LONGNET_DOT_PRODUCTS_PER_TOKEN / L)


def local_nnz(w: int, L: int) -> int:
    """Nonzeros of the |i−j| < w mask over L tokens."""
    if w >= L:
        return L * L
    return L * (2 * w - 1) - w * (w - 1)


def expected_nnz(pattern: MaskPattern, L: int) -> int:
    """Nonzero count a pattern yields at L, without materializing it."""
    if isinstance(pattern, Random):
        return int(round(pattern.s_f * L * L))
    return int(neighbor_source(pattern, L).counts().sum().item())


def window_for_sparsity(s_f: float, L: int, r: int = 1) -> int:
    """Window w (dilation r) whose mask density is closest to s_f."""
    if not 0.0 < s_f <= 1.0:
        raise PatternError(f"sparsity factor must be in (0, 1], got {s_f}")
    target = s_f * L * L

    def nnz(w: int) -> int:
        if r == 1:
            return local_nnz(w, L)
        return expected_nnz(Dilated1D(w=w, r=r), L)

    lo, hi = 1, L
    while lo < hi:
        mid = (lo + hi) // 2
        if nnz(mid) < target:
            lo = mid + 1
        else:
            hi = mid
    if lo > 1 and abs(nnz(lo - 1) - target) <= abs(nnz(lo) - target):
        return lo - 1
    return lo


def block_for_sparsity(s_f: float, L: int) -> int:
    """Divisor b of L closest to s_f·L (a dilation-1 block mask has L·b nonzeros)."""
    if not 0.0 < s_f <= 1.0:
        raise PatternError(f"sparsity factor must be in (0, 1], got {s_f}")
    target = s_f * L
    divisors: set[int] = set()
    for k in range(1, math.isqrt(L) + 1):
        if L % k == 0:
            divisors.update((k, L // k))
    return min(sorted(divisors), key=lambda b: abs(b - target))
