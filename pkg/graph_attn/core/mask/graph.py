# graph_attn/core/mask/graph.py
"""
The token graph: neighbor sources over explicit masks and implicit patterns.

A neighbor source answers two questions for a context length L: how many neighbors each
row has, and what the t-th neighbor (ascending column order) of a row is. Explicit masks
read it from storage, implicit patterns compute it arithmetically from per-row bounds, so
no L×L structure is ever built for them.
"""

from __future__ import annotations

from typing import Protocol

import torch

from graph_attn.core.config import get_logger
from graph_attn.core.errors import PatternError
from graph_attn.core.mask.formats import CooMask, CsrMask
from graph_attn.core.mask.patterns import (
    Dilated1D,
    Dilated2D,
    Global,
    Local,
    MaskPattern,
    Random,
)

logger = get_logger(__name__)

__all__: list[str] = [
    "NeighborSource",
    "neighbor_source",
    "get_neighbors",
    "gen_pattern_mask",
    "sample_random_keys",
]


class NeighborSource(Protocol):
    length: int

    def counts(self) -> torch.Tensor:
        """Neighbor count per row, shape (L,)."""
        ...

    def column_at(self, rows: torch.Tensor, t: torch.Tensor | int) -> torch.Tensor:
        """t-th neighbor column of each row in ``rows``; requires t < counts()[rows]."""
        ...


class _Source:
    length: int
    _counts: torch.Tensor

    def counts(self) -> torch.Tensor:
        return self._counts

    def column_at(self, rows: torch.Tensor, t: torch.Tensor | int) -> torch.Tensor:
        raise NotImplementedError

    def nnz(self) -> int:
        return int(self._counts.sum().item())

    def neighbors(self, i: int) -> torch.Tensor:
        if not 0 <= i < self.length:
            raise IndexError(f"row {i} out of range for L={self.length}")
        n = int(self._counts[i].item())
        rows = torch.full((n,), i, dtype=torch.int64)
        return self.column_at(rows, torch.arange(n, dtype=torch.int64))


class CsrSource(_Source):
    def __init__(self, mask: CsrMask) -> None:
        self.length = mask.length
        self._offsets = mask.offsets
        self._cols = mask.cols
        self._counts = mask.row_counts()

    def column_at(self, rows: torch.Tensor, t: torch.Tensor | int) -> torch.Tensor:
        return self._cols[self._offsets[rows] + t]


class CooSource(_Source):
    """Row spans are found by binary search over the sorted rows vector."""

    def __init__(self, mask: CooMask) -> None:
        self.length = mask.length
        self._cols = mask.cols
        ids = torch.arange(mask.length, dtype=torch.int64)
        self._starts = torch.searchsorted(mask.rows, ids, right=False)
        stops = torch.searchsorted(mask.rows, ids, right=True)
        self._counts = stops - self._starts

    def column_at(self, rows: torch.Tensor, t: torch.Tensor | int) -> torch.Tensor:
        return self._cols[self._starts[rows] + t]


def _window_bounds(L: int, w: int) -> tuple[torch.Tensor, torch.Tensor]:
    i = torch.arange(L, dtype=torch.int64)
    lo = (i - (w - 1)).clamp_min(0)
    hi = (i + (w - 1)).clamp_max(L - 1)
    return lo, hi


class LocalSource(_Source):
    def __init__(self, pattern: Local, L: int) -> None:
        self.length = L
        self._lo, hi = _window_bounds(L, pattern.w)
        self._counts = hi - self._lo + 1

    def column_at(self, rows: torch.Tensor, t: torch.Tensor | int) -> torch.Tensor:
        return self._lo[rows] + t


class Dilated1DSource(_Source):
    """Neighbors are j = i + k·r for k in [kmin, kmax], clipped to [0, L)."""

    def __init__(self, pattern: Dilated1D, L: int) -> None:
        self.length = L
        self._r = pattern.r
        i = torch.arange(L, dtype=torch.int64)
        reach = (pattern.w - 1) // pattern.r
        kmin = torch.maximum(torch.full_like(i, -reach), -torch.div(i, pattern.r, rounding_mode="floor"))
        kmax = torch.minimum(
            torch.full_like(i, reach), torch.div(L - 1 - i, pattern.r, rounding_mode="floor")
        )
        self._first = i + kmin * pattern.r
        self._counts = kmax - kmin + 1

    def column_at(self, rows: torch.Tensor, t: torch.Tensor | int) -> torch.Tensor:
        return self._first[rows] + t * self._r


class Dilated2DSource(_Source):
    """Rows at a dilated within-block offset see the dilated offsets of their own block."""

    def __init__(self, pattern: Dilated2D, L: int) -> None:
        self.length = L
        self._r = pattern.r
        b, r = pattern.b, pattern.r
        i = torch.arange(L, dtype=torch.int64)
        self._first = torch.div(i, b, rounding_mode="floor") * b
        per_row = (b - 1) // r + 1
        active = torch.remainder(torch.remainder(i, b), r) == 0
        self._counts = torch.where(active, torch.full_like(i, per_row), torch.zeros_like(i))

    def column_at(self, rows: torch.Tensor, t: torch.Tensor | int) -> torch.Tensor:
        return self._first[rows] + t * self._r


class GlobalSource(_Source):
    """
    Global rows walk every column outside their local window; other rows walk the global
    columns outside their local window. The excluded columns are contiguous in both lists,
    so the t-th neighbor is an index shift past the gap.
    """

    def __init__(self, pattern: Global, L: int) -> None:
        self.length = L
        self._g = torch.tensor(pattern.indices, dtype=torch.int64)
        self._is_global = torch.zeros(L, dtype=torch.bool)
        if self._g.numel():
            self._is_global[self._g] = True

        self._lo, hi = _window_bounds(L, pattern.w)
        self._width = hi - self._lo + 1
        self._split = torch.searchsorted(self._g, self._lo, right=False)
        self._gap = torch.searchsorted(self._g, hi, right=True) - self._split

        own = L - self._width
        other = self._g.numel() - self._gap
        self._counts = torch.where(self._is_global, own, other).to(torch.int64)

    def column_at(self, rows: torch.Tensor, t: torch.Tensor | int) -> torch.Tensor:
        t = torch.as_tensor(t, dtype=torch.int64)
        lo = self._lo[rows]
        full_row = torch.where(t < lo, t, t + self._width[rows])
        if self._g.numel() == 0:
            return full_row
        split = self._split[rows]
        idx = torch.where(t < split, t, t + self._gap[rows]).clamp(0, self._g.numel() - 1)
        return torch.where(self._is_global[rows], full_row, self._g[idx])


def sample_random_keys(pattern: Random, L: int) -> torch.Tensor:
    """Sorted linear keys of round(s_f·L²) distinct coordinates, deterministic per seed."""
    return torch.from_numpy(pattern.sampled_keys(L).copy())


def neighbor_source(source: CsrMask | CooMask | MaskPattern, L: int | None = None) -> _Source:
    """Bind a mask or a pattern (validated for L) to a neighbor source."""
    match source:
        case CsrMask():
            _check_length(source.length, L)
            return CsrSource(source)
        case CooMask():
            _check_length(source.length, L)
            return CooSource(source)

    if L is None:
        raise PatternError("an implicit pattern needs a context length")
    source.validate_for(L)
    match source:
        case Local():
            return LocalSource(source, L)
        case Dilated1D():
            return Dilated1DSource(source, L)
        case Dilated2D():
            return Dilated2DSource(source, L)
        case Global():
            return GlobalSource(source, L)
        case Random():
            return CsrSource(CsrMask.from_keys(L, sample_random_keys(source, L)))
    raise PatternError(f"unknown mask source: {type(source).__name__}")


def _check_length(length: int, L: int | None) -> None:
    if L is not None and L != length:
        raise PatternError(f"mask length {length} does not match L={L}", length=L)


def get_neighbors(source: CsrMask | CooMask | MaskPattern, i: int, L: int | None = None) -> list[int]:
    """Ascending neighbor columns of row i."""
    return [int(j) for j in neighbor_source(source, L).neighbors(i).tolist()]


def gen_pattern_mask(pattern: MaskPattern, L: int) -> CsrMask:
    """Materialize a pattern as CSR; row i equals get_neighbors(pattern, i, L)."""
    if isinstance(pattern, Random):
        pattern.validate_for(L)
        mask = CsrMask.from_keys(L, sample_random_keys(pattern, L))
        logger.debug("Generated random mask L=%d nnz=%d seed=%d", L, mask.nnz, pattern.seed)
        return mask

    src = neighbor_source(pattern, L)
    counts = src.counts()
    offsets = torch.zeros(L + 1, dtype=torch.int64)
    offsets[1:] = torch.cumsum(counts, dim=0)
    nnz = int(offsets[-1].item())
    rows = torch.repeat_interleave(torch.arange(L, dtype=torch.int64), counts)
    t = torch.arange(nnz, dtype=torch.int64) - offsets[rows]
    cols = src.column_at(rows, t) if nnz else torch.zeros(0, dtype=torch.int64)
    logger.debug("Generated %s mask L=%d nnz=%d", pattern.kind, L, nnz)
    return CsrMask(length=L, offsets=offsets, cols=cols)
