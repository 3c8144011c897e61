# graph_attn/core/mask/formats.py
"""Explicit binary attention masks (the token graph's edge set) and format bridges."""

from __future__ import annotations

from typing import Self

import torch
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from graph_attn.core.errors import MaskError, MaskOverlapError

__all__: list[str] = [
    "CooMask",
    "CsrMask",
    "coo_to_csr",
    "csr_to_coo",
    "dense_to_csr",
    "csr_to_dense",
    "mask_union_disjoint",
    "mask_union",
    "mask_equal",
]


def _as_index(v: object) -> torch.Tensor:
    t = v if isinstance(v, torch.Tensor) else torch.as_tensor(v, dtype=torch.int64)
    if t.dim() != 1:
        raise ValueError(f"index vectors must be 1-D, got shape {tuple(t.shape)}")
    if t.dtype != torch.int64:
        if t.is_floating_point() or t.dtype == torch.bool:
            raise ValueError(f"index vectors must be integral, got {t.dtype}")
        t = t.to(torch.int64)
    return t.contiguous()


def _first_unsorted(keys: torch.Tensor) -> int | None:
    """Index of the first key that is not strictly greater than its predecessor."""
    if keys.numel() < 2:
        return None
    bad = torch.nonzero(keys[1:] <= keys[:-1])
    return None if bad.numel() == 0 else int(bad[0].item()) + 1


class CooMask(BaseModel):
    """Coordinate-format mask: sorted (row, col) pairs, no duplicates, no stored values."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    length: int
    rows: torch.Tensor
    cols: torch.Tensor

    @field_validator("rows", "cols", mode="before")
    @classmethod
    def _index(cls, v: object) -> torch.Tensor:
        return _as_index(v)

    @model_validator(mode="after")
    def _check(self) -> Self:
        L = self.length
        if L < 1:
            raise MaskError(f"length must be >= 1, got {L}")
        if self.rows.numel() != self.cols.numel():
            raise MaskError(
                f"rows and cols differ in length: {self.rows.numel()} vs {self.cols.numel()}"
            )
        if self.rows.numel() == 0:
            return self
        out_of_range = (self.rows < 0) | (self.rows >= L) | (self.cols < 0) | (self.cols >= L)
        if bool(out_of_range.any()):
            k = int(torch.nonzero(out_of_range)[0].item())
            raise MaskError("entry out of range", coordinate=self._coord(k))
        k = _first_unsorted(self.rows * L + self.cols)
        if k is not None:
            raise MaskError("entries unsorted or duplicated", coordinate=self._coord(k))
        return self

    def _coord(self, k: int) -> tuple[int, int]:
        return int(self.rows[k].item()), int(self.cols[k].item())

    @classmethod
    def from_pairs(cls, length: int, pairs: list[tuple[int, int]]) -> Self:
        """Build from unordered unique pairs (sorted here)."""
        ordered = sorted(pairs)
        return cls(
            length=length,
            rows=[p[0] for p in ordered],
            cols=[p[1] for p in ordered],
        )

    @property
    def nnz(self) -> int:
        return int(self.rows.numel())

    def row_span(self, i: int) -> tuple[int, int]:
        """[start, stop) of row i, located by binary search over the sorted rows vector."""
        probe = torch.tensor([i], dtype=torch.int64)
        start = int(torch.searchsorted(self.rows, probe, right=False).item())
        stop = int(torch.searchsorted(self.rows, probe, right=True).item())
        return start, stop

    def coordinates(self) -> torch.Tensor:
        """Sorted linear keys row·L + col."""
        return self.rows * self.length + self.cols

    def __repr__(self) -> str:
        return f"<CooMask L={self.length} nnz={self.nnz}>"


class CsrMask(BaseModel):
    """Compressed-sparse-row mask: offsets (L+1) and strictly increasing columns per row."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    length: int
    offsets: torch.Tensor
    cols: torch.Tensor

    @field_validator("offsets", "cols", mode="before")
    @classmethod
    def _index(cls, v: object) -> torch.Tensor:
        return _as_index(v)

    @model_validator(mode="after")
    def _check(self) -> Self:
        L = self.length
        if L < 1:
            raise MaskError(f"length must be >= 1, got {L}")
        if self.offsets.numel() != L + 1:
            raise MaskError(f"offsets must have L+1={L + 1} entries, got {self.offsets.numel()}")
        if int(self.offsets[0].item()) != 0:
            raise MaskError("offsets[0] must be 0")
        counts = self.offsets[1:] - self.offsets[:-1]
        if bool((counts < 0).any()):
            i = int(torch.nonzero(counts < 0)[0].item())
            raise MaskError(f"offsets decrease at row {i}")
        if int(self.offsets[-1].item()) != self.cols.numel():
            raise MaskError(
                f"offsets[L]={int(self.offsets[-1].item())} != nnz={self.cols.numel()}"
            )
        if self.cols.numel() == 0:
            return self
        rows = self.row_indices()
        bad = (self.cols < 0) | (self.cols >= L)
        if bool(bad.any()):
            k = int(torch.nonzero(bad)[0].item())
            raise MaskError("column out of range", coordinate=(int(rows[k]), int(self.cols[k])))
        k = _first_unsorted(rows * L + self.cols)
        if k is not None:
            raise MaskError(
                "columns not strictly increasing", coordinate=(int(rows[k]), int(self.cols[k]))
            )
        return self

    @classmethod
    def empty(cls, length: int) -> Self:
        return cls(
            length=length,
            offsets=torch.zeros(length + 1, dtype=torch.int64),
            cols=torch.zeros(0, dtype=torch.int64),
        )

    @classmethod
    def diagonal(cls, length: int) -> Self:
        return cls(
            length=length,
            offsets=torch.arange(length + 1, dtype=torch.int64),
            cols=torch.arange(length, dtype=torch.int64),
        )

    @classmethod
    def full(cls, length: int) -> Self:
        return cls(
            length=length,
            offsets=torch.arange(length + 1, dtype=torch.int64) * length,
            cols=torch.arange(length, dtype=torch.int64).repeat(length),
        )

    @classmethod
    def from_keys(cls, length: int, keys: torch.Tensor) -> Self:
        """Build from sorted, unique linear keys row·L + col."""
        rows = torch.div(keys, length, rounding_mode="floor")
        counts = torch.bincount(rows, minlength=length)
        offsets = torch.zeros(length + 1, dtype=torch.int64)
        offsets[1:] = torch.cumsum(counts, dim=0)
        return cls(length=length, offsets=offsets, cols=keys - rows * length)

    @property
    def nnz(self) -> int:
        return int(self.cols.numel())

    def row_counts(self) -> torch.Tensor:
        return self.offsets[1:] - self.offsets[:-1]

    def row_indices(self) -> torch.Tensor:
        """Row index of every stored column (the COO rows vector)."""
        return torch.repeat_interleave(torch.arange(self.length, dtype=torch.int64), self.row_counts())

    def row(self, i: int) -> torch.Tensor:
        return self.cols[int(self.offsets[i].item()) : int(self.offsets[i + 1].item())]

    def coordinates(self) -> torch.Tensor:
        """Sorted linear keys row·L + col."""
        return self.row_indices() * self.length + self.cols

    def __repr__(self) -> str:
        return f"<CsrMask L={self.length} nnz={self.nnz}>"


def coo_to_csr(m: CooMask) -> CsrMask:
    counts = torch.bincount(m.rows, minlength=m.length)
    offsets = torch.zeros(m.length + 1, dtype=torch.int64)
    offsets[1:] = torch.cumsum(counts, dim=0)
    return CsrMask(length=m.length, offsets=offsets, cols=m.cols.clone())


def csr_to_coo(m: CsrMask) -> CooMask:
    return CooMask(length=m.length, rows=m.row_indices(), cols=m.cols.clone())


def dense_to_csr(grid: torch.Tensor) -> CsrMask:
    """Square 0-1 grid → CSR. Any nonzero entry counts as an edge."""
    if grid.dim() != 2 or grid.shape[0] != grid.shape[1]:
        raise MaskError(f"dense mask must be square, got shape {tuple(grid.shape)}")
    L = int(grid.shape[0])
    nz = torch.nonzero(grid != 0)
    if nz.numel() == 0:
        return CsrMask.empty(L)
    keys = nz[:, 0].to(torch.int64) * L + nz[:, 1].to(torch.int64)
    return CsrMask.from_keys(L, keys)


def csr_to_dense(m: CsrMask) -> torch.Tensor:
    """CSR → bool L×L grid."""
    grid = torch.zeros(m.length, m.length, dtype=torch.bool)
    if m.nnz:
        grid[m.row_indices(), m.cols] = True
    return grid


def _check_lengths(a: CsrMask, b: CsrMask) -> None:
    if a.length != b.length:
        raise MaskError(f"mask lengths differ: {a.length} vs {b.length}")


def mask_union_disjoint(a: CsrMask, b: CsrMask) -> CsrMask:
    """Union of two masks that must not share a coordinate; raises MaskOverlapError otherwise."""
    _check_lengths(a, b)
    keys, _ = torch.sort(torch.cat([a.coordinates(), b.coordinates()]))
    dup = _first_unsorted(keys)
    if dup is not None:
        key = int(keys[dup].item())
        raise MaskOverlapError((key // a.length, key % a.length))
    return CsrMask.from_keys(a.length, keys)


def mask_union(a: CsrMask, b: CsrMask) -> CsrMask:
    """Set union; shared coordinates are kept once."""
    _check_lengths(a, b)
    keys = torch.unique(torch.cat([a.coordinates(), b.coordinates()]), sorted=True)
    return CsrMask.from_keys(a.length, keys)


def mask_equal(a: CsrMask | CooMask, b: CsrMask | CooMask) -> bool:
    return a.length == b.length and torch.equal(a.coordinates(), b.coordinates())
