# graph_attn/core/memmodel.py
"""
Theoretical maximum context length.

A kernel's working set is modelled as

    fixed + per_token·L + per_nnz·S_f·L² + quadratic_dense·L²  (bytes)

and the largest L that fits a device budget is the positive root of that quadratic.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from graph_attn.core.config import A100_80GB_BYTES, get_logger, settings
from graph_attn.core.enums import Algorithm
from graph_attn.core.errors import CapacityError, ConfigurationError

logger = get_logger(__name__)

__all__: list[str] = [
    "MemoryAccounting",
    "HardwareBudget",
    "CapacityPoint",
    "accounting_for",
    "footprint_bytes",
    "max_context_length",
    "capacity_curve",
]

ELEMENT_WIDTHS = frozenset({2, 4})


class MemoryAccounting(BaseModel):
    """Byte coefficients of the working-set polynomial in L."""

    model_config = ConfigDict(frozen=True)

    per_token_bytes: float = Field(default=0.0, ge=0.0)
    per_nnz_bytes: float = Field(default=0.0, ge=0.0)
    quadratic_dense_bytes: float = Field(default=0.0, ge=0.0)
    fixed_bytes: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _any_positive(self) -> Self:
        if not (self.per_token_bytes or self.per_nnz_bytes or self.quadratic_dense_bytes or self.fixed_bytes):
            raise ValueError("at least one accounting coefficient must be positive")
        return self


class HardwareBudget(BaseModel):
    model_config = ConfigDict(frozen=True)

    bytes: int = Field(gt=0)

    @classmethod
    def a100_80gb(cls) -> Self:
        """One 80 GiB device."""
        return cls(bytes=A100_80GB_BYTES)

    @classmethod
    def from_settings(cls) -> Self:
        return cls(bytes=settings.device_budget_bytes)

    def scaled(self, fraction: float) -> HardwareBudget:
        """The share of the device left to attention, e.g. 0.25 when the rest of the model holds 75%."""
        if not 0.0 < fraction <= 1.0:
            raise ConfigurationError(f"budget fraction must be in (0, 1], got {fraction}")
        return HardwareBudget(bytes=max(1, int(self.bytes * fraction)))


class CapacityPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    s_f: float
    max_L: int


def accounting_for(
    algorithm: Algorithm | str,
    element_bytes: int,
    index_bytes: int,
    d: int,
    heads: int = 1,
    *,
    per_token_bytes: float | None = None,
    per_nnz_bytes: float | None = None,
    quadratic_dense_bytes: float | None = None,
    fixed_bytes: float | None = None,
) -> MemoryAccounting:
    """
    Default accounting for an algorithm family; any coefficient can be overridden.

    Q, K, V and O cost 4·d·element_bytes per token. Every algorithm except sdp keeps two
    softmax statistics vectors per head. Mask storage is per head: csr pays an offsets entry
    per token and (index + value) per nonzero, coo pays (row + col + value) per nonzero,
    sdp materializes the L×L score matrix, global keeps its index vector.
    """
    try:
        algo = Algorithm(algorithm)
    except ValueError as e:
        raise ConfigurationError(f"unknown algorithm: {algorithm!r}") from e
    if element_bytes not in ELEMENT_WIDTHS:
        raise ConfigurationError(f"element_bytes must be 2 or 4, got {element_bytes}")
    if index_bytes < 1 or d < 1 or heads < 1:
        raise ConfigurationError(
            f"index_bytes, d and heads must be >= 1, got {index_bytes}, {d}, {heads}"
        )

    per_token = 4 * d * element_bytes
    per_nnz = 0
    quadratic = 0
    if algo is not Algorithm.sdp:
        per_token += 2 * heads * element_bytes

    match algo:
        case Algorithm.csr:
            per_token += heads * index_bytes
            per_nnz = heads * (index_bytes + element_bytes)
        case Algorithm.coo:
            per_nnz = heads * (2 * index_bytes + element_bytes)
        case Algorithm.sdp:
            quadratic = heads * element_bytes
        case Algorithm.global_:
            per_token += index_bytes
        case _:
            pass

    return MemoryAccounting(
        per_token_bytes=per_token if per_token_bytes is None else per_token_bytes,
        per_nnz_bytes=per_nnz if per_nnz_bytes is None else per_nnz_bytes,
        quadratic_dense_bytes=quadratic if quadratic_dense_bytes is None else quadratic_dense_bytes,
        fixed_bytes=0.0 if fixed_bytes is None else fixed_bytes,
    )


def footprint_bytes(acc: MemoryAccounting, L: int, s_f: float) -> int:
    """Modelled working set of one call at context length L."""
    total = (
        acc.fixed_bytes
        + acc.per_token_bytes * L
        + (acc.per_nnz_bytes * s_f + acc.quadratic_dense_bytes) * L * L
    )
    return math.ceil(total)


def max_context_length(acc: MemoryAccounting, s_f: float, budget: HardwareBudget) -> int:
    """Largest L whose modelled working set fits ``budget``, rounded to the nearest token."""
    if not 0.0 <= s_f <= 1.0:
        raise ConfigurationError(f"s_f must be in [0, 1], got {s_f}")

    a = acc.per_nnz_bytes * s_f + acc.quadratic_dense_bytes
    b = acc.per_token_bytes
    c = budget.bytes - acc.fixed_bytes
    if c <= 0 or (a == 0 and b == 0):
        raise CapacityError(
            f"budget of {budget.bytes} bytes does not cover the fixed cost",
            budget_bytes=budget.bytes,
            fixed_bytes=acc.fixed_bytes,
        )

    # 2c / (b + sqrt(b² + 4ac)) is the positive root without cancellation when b² >> 4ac
    root = c / b if a == 0 else 2 * c / (b + math.sqrt(b * b + 4 * a * c))
    L = round(root)
    if L < 1:
        raise CapacityError(
            f"no positive context length fits {budget.bytes} bytes", budget_bytes=budget.bytes
        )
    logger.debug("max L: a=%g b=%g c=%g -> %.2f -> %d", a, b, c, root, L)
    return L


def capacity_curve(
    algorithm: Algorithm | str,
    element_bytes: int,
    index_bytes: int,
    d: int,
    heads: int,
    s_f_list: Iterable[float],
    budget: HardwareBudget | None = None,
) -> list[CapacityPoint]:
    budget = budget or HardwareBudget.from_settings()
    acc = accounting_for(algorithm, element_bytes, index_bytes, d, heads)
    points: list[CapacityPoint] = []
    for s_f in s_f_list:
        if not 0.0 < s_f <= 1.0:
            raise ConfigurationError(f"capacity curve s_f must be in (0, 1], got {s_f}")
        points.append(CapacityPoint(s_f=s_f, max_L=max_context_length(acc, s_f, budget)))
    return points
