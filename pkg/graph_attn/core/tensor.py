# graph_attn/core/tensor.py
"""Dense-matrix substrate: storage, seeded generation and tolerance comparison."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Self

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, Field, field_validator

from graph_attn.core.config import settings
from graph_attn.core.enums import DType
from graph_attn.core.errors import ShapeError

_FLOAT_DTYPES = (torch.float16, torch.float32, torch.float64)


def default_dtype() -> torch.dtype:
    """Kernel element precision configured in settings."""
    return DType(settings.dtype).torch


class DenseMatrix(BaseModel):
    """
    Row-major L×d real matrix (Q, K, V or O).

    The wrapped tensor is made contiguous on construction and must not be mutated
    afterwards; kernels only ever read it.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: torch.Tensor

    @field_validator("data")
    @classmethod
    def _check_data(cls, v: torch.Tensor) -> torch.Tensor:
        if not isinstance(v, torch.Tensor):
            raise ShapeError(f"expected a torch.Tensor, got {type(v).__name__}")
        if v.dim() != 2:
            raise ShapeError(f"expected a 2-D tensor, got shape {tuple(v.shape)}")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ShapeError(f"dimensions must be >= 1, got {tuple(v.shape)}")
        if v.dtype not in _FLOAT_DTYPES:
            raise ShapeError(f"expected a floating dtype, got {v.dtype}")
        return v.contiguous()

    @classmethod
    def of(cls, data: torch.Tensor | np.ndarray | Sequence[Sequence[float]]) -> Self:
        if isinstance(data, torch.Tensor):
            return cls(data=data)
        if isinstance(data, np.ndarray):
            return cls(data=torch.from_numpy(np.ascontiguousarray(data)))
        return cls(data=torch.tensor(data, dtype=torch.float64))

    @classmethod
    def zeros(cls, rows: int, cols: int, dtype: torch.dtype | None = None) -> Self:
        return cls(data=torch.zeros(rows, cols, dtype=dtype or default_dtype()))

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def dtype(self) -> torch.dtype:
        return self.data.dtype

    def to(self, dtype: torch.dtype | DType) -> DenseMatrix:
        target = dtype.torch if isinstance(dtype, DType) else dtype
        if target == self.data.dtype:
            return self
        return DenseMatrix(data=self.data.to(target))

    def scaled(self, factor: float) -> DenseMatrix:
        return DenseMatrix(data=self.data * factor)

    def numpy(self) -> np.ndarray:
        return self.data.detach().cpu().numpy()

    def __repr__(self) -> str:
        return f"<DenseMatrix {self.rows}x{self.cols} {self.dtype}>"


class Tolerances(BaseModel):
    """allclose tolerances; defaults are the verification protocol's."""

    model_config = ConfigDict(frozen=True)

    rtol: float = Field(default=1e-5, ge=0.0)
    atol: float = Field(default=1e-8, ge=0.0)
    nan_equal: bool = True

    def scaled(self, factor: float) -> Tolerances:
        return Tolerances(rtol=self.rtol * factor, atol=self.atol * factor, nan_equal=self.nan_equal)


class Deviation(BaseModel):
    """Worst-case difference between two matrices, as reported by the verify harness."""

    max_abs: float
    max_rel: float
    first_failure: tuple[int, int] | None = None

    @property
    def passed(self) -> bool:
        return self.first_failure is None


def random_uniform_matrix(
    rows: int, cols: int, seed: int, dtype: torch.dtype | DType | None = None
) -> DenseMatrix:
    """
    Draw a rows×cols matrix i.i.d. uniform on [0, 1).

    Values come from numpy's Philox counter-based generator in float64 and are then cast,
    so a given (rows, cols, seed) is bit-identical across runs and torch thread counts.
    """
    if rows < 1 or cols < 1:
        raise ShapeError(f"dimensions must be >= 1, got ({rows}, {cols})")
    target = dtype.torch if isinstance(dtype, DType) else (dtype or default_dtype())
    gen = np.random.Generator(np.random.Philox(seed))
    values = gen.random((rows, cols), dtype=np.float64)
    return DenseMatrix(data=torch.from_numpy(values).to(target))


def _check_same_shape(a: DenseMatrix, b: DenseMatrix) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")


def _close_mask(a: torch.Tensor, b: torch.Tensor, tol: Tolerances) -> torch.Tensor:
    diff = (a - b).abs()
    close = diff <= tol.atol + tol.rtol * b.abs()
    if tol.nan_equal:
        close = close | (torch.isnan(a) & torch.isnan(b))
    # infinities of equal sign are close (diff is NaN there)
    close = close | (torch.isinf(a) & (a == b))
    return close


def allclose(a: DenseMatrix, b: DenseMatrix, tol: Tolerances | None = None) -> bool:
    """True iff |a−b| <= atol + rtol·|b| elementwise. Shape mismatch raises ShapeError."""
    _check_same_shape(a, b)
    tol = tol or Tolerances()
    common = torch.promote_types(a.dtype, b.dtype)
    return bool(_close_mask(a.data.to(common), b.data.to(common), tol).all())


def max_deviation(a: DenseMatrix, b: DenseMatrix, tol: Tolerances | None = None) -> Deviation:
    """Max absolute/relative deviation of a from b and the first coordinate failing allclose."""
    _check_same_shape(a, b)
    tol = tol or Tolerances()
    x = a.data.to(torch.float64)
    y = b.data.to(torch.float64)

    close = _close_mask(x, y, tol)
    both_finite = torch.isfinite(x) & torch.isfinite(y)
    diff = torch.where(both_finite, (x - y).abs(), torch.zeros_like(x))
    rel = torch.where(
        both_finite & (y != 0), diff / y.abs().clamp_min(torch.finfo(torch.float64).tiny), diff
    )

    first: tuple[int, int] | None = None
    if not bool(close.all()):
        flat = int(torch.nonzero(~close.reshape(-1))[0].item())
        first = (flat // a.cols, flat % a.cols)

    return Deviation(
        max_abs=float(diff.max().item()),
        max_rel=float(rel.max().item()),
        first_failure=first,
    )


def random_qkv(
    L: int, d: int, seed: int, dtype: torch.dtype | DType | None = None
) -> tuple[DenseMatrix, DenseMatrix, DenseMatrix]:
    """Q, K, V drawn from consecutive seeds so that each operand is distinct."""
    return (
        random_uniform_matrix(L, d, seed, dtype),
        random_uniform_matrix(L, d, seed + 1, dtype),
        random_uniform_matrix(L, d, seed + 2, dtype),
    )
