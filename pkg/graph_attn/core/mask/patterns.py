# graph_attn/core/mask/patterns.py
"""Implicit mask patterns: parameter records and membership predicates."""

from __future__ import annotations

from functools import lru_cache
from typing import Annotated, Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

from graph_attn.core.enums import Algorithm
from graph_attn.core.errors import PatternError

__all__: list[str] = [
    "Local",
    "Dilated1D",
    "Dilated2D",
    "Global",
    "Random",
    "MaskPattern",
    "parse_pattern",
    "is_local",
    "is_dilated1d",
    "is_dilated2d",
    "is_global",
]


def is_local(i: int, j: int, w: int) -> int:
    """1 iff |i − j| < w (the diagonal is always included for w >= 1)."""
    return int(abs(i - j) < w)


def is_dilated1d(i: int, j: int, w: int, r: int) -> int:
    """1 iff |i − j| < w and |i − j| is a multiple of r."""
    d = abs(i - j)
    return int(d < w and d % r == 0)


def is_dilated2d(i: int, j: int, L: int, b: int, r: int) -> int:
    """1 iff i and j share a size-b block and both within-block offsets are multiples of r."""
    if b < 1 or L % b != 0:
        raise PatternError(f"block size {b} must divide L={L}", length=L, block=b)
    if i // b != j // b:
        return 0
    return int((i % b) % r == 0 and (j % b) % r == 0)


def is_global(i: int, j: int, indices: frozenset[int] | set[int], w: int) -> int:
    """1 iff row i or column j is a global token and (i, j) lies outside the local window."""
    return int((i in indices or j in indices) and abs(i - j) >= w)


class _Pattern(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def algorithm(self) -> Algorithm:
        raise NotImplementedError

    def validate_for(self, L: int) -> Self:
        if L < 1:
            raise PatternError(f"context length must be >= 1, got {L}", length=L)
        return self

    def accepts(self, i: int, j: int, L: int) -> int:
        raise NotImplementedError


class Local(_Pattern):
    kind: Literal["local"] = "local"
    w: int = Field(ge=1, description="window size; |i-j| < w")

    @property
    def algorithm(self) -> Algorithm:
        return Algorithm.local

    def accepts(self, i: int, j: int, L: int) -> int:
        return is_local(i, j, self.w)


class Dilated1D(_Pattern):
    kind: Literal["dilated1d"] = "dilated1d"
    w: int = Field(ge=1, description="window size")
    r: int = Field(default=1, ge=1, description="dilation factor")

    @property
    def algorithm(self) -> Algorithm:
        return Algorithm.dilated1d

    def accepts(self, i: int, j: int, L: int) -> int:
        return is_dilated1d(i, j, self.w, self.r)


class Dilated2D(_Pattern):
    kind: Literal["dilated2d"] = "dilated2d"
    b: int = Field(ge=1, description="block height and width")
    r: int = Field(default=1, ge=1, description="dilation factor")

    @property
    def algorithm(self) -> Algorithm:
        return Algorithm.dilated2d

    def validate_for(self, L: int) -> Self:
        super().validate_for(L)
        if L % self.b != 0:
            raise PatternError(f"block size {self.b} must divide L={L}", length=L, block=self.b)
        return self

    def accepts(self, i: int, j: int, L: int) -> int:
        return is_dilated2d(i, j, L, self.b, self.r)


class Global(_Pattern):
    """Full rows and columns at the global tokens, minus the local window of size w."""

    kind: Literal["global"] = "global"
    indices: tuple[int, ...] = Field(description="global token indices")
    w: int = Field(default=1, ge=1, description="local window subtracted from the global mask")

    @field_validator("indices")
    @classmethod
    def _sorted_unique(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if len(set(v)) != len(v):
            raise ValueError("global indices must be unique")
        if any(i < 0 for i in v):
            raise ValueError("global indices must be non-negative")
        return tuple(sorted(v))

    @property
    def algorithm(self) -> Algorithm:
        return Algorithm.global_

    def validate_for(self, L: int) -> Self:
        super().validate_for(L)
        if self.indices and self.indices[-1] >= L:
            raise PatternError(
                f"global index {self.indices[-1]} out of range for L={L}", length=L
            )
        return self

    def accepts(self, i: int, j: int, L: int) -> int:
        return is_global(i, j, frozenset(self.indices), self.w)


class Random(_Pattern):
    """Exactly round(s_f·L²) coordinates sampled uniformly without replacement."""

    kind: Literal["random"] = "random"
    s_f: float = Field(gt=0.0, le=1.0, description="sparsity factor")
    seed: int = 0

    @property
    def algorithm(self) -> Algorithm:
        return Algorithm.csr

    def sampled_keys(self, L: int) -> np.ndarray:
        """Sorted linear keys i·L + j of the sampled coordinates (read-only)."""
        self.validate_for(L)
        return _sample_keys(self.s_f, self.seed, L)

    def accepts(self, i: int, j: int, L: int) -> int:
        if not (0 <= i < L and 0 <= j < L):
            return 0
        keys = self.sampled_keys(L)
        key = i * L + j
        pos = int(np.searchsorted(keys, key))
        return int(pos < keys.size and int(keys[pos]) == key)


@lru_cache(maxsize=8)
def _sample_keys(s_f: float, seed: int, L: int) -> np.ndarray:
    total = L * L
    k = int(round(s_f * total))
    gen = np.random.Generator(np.random.Philox(seed))
    keys = np.sort(gen.choice(total, size=k, replace=False, shuffle=False)).astype(np.int64)
    keys.setflags(write=False)
    return keys


MaskPattern = Annotated[
    Local | Dilated1D | Dilated2D | Global | Random, Field(discriminator="kind")
]

_PATTERN_ADAPTER: TypeAdapter[MaskPattern] = TypeAdapter(MaskPattern)


def parse_pattern(data: dict[str, object] | str) -> MaskPattern:
    """Validate a pattern from a dict or JSON string, e.g. {"kind": "local", "w": 51}."""
    if isinstance(data, str):
        return _PATTERN_ADAPTER.validate_json(data)
    return _PATTERN_ADAPTER.validate_python(data)
