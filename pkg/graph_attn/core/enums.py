# graph_attn/core/enums.py
from __future__ import annotations

from enum import Enum

import torch


class Algorithm(str, Enum):
    """
    Enum values are CLI/user-facing tokens ("csr", "local", ...).
    ``sdp`` is the dense masked oracle; ``flash_dense`` only exists in the memory model.
    """

    sdp = "sdp"
    csr = "csr"
    coo = "coo"
    local = "local"
    dilated1d = "dilated1d"
    dilated2d = "dilated2d"
    global_ = "global"
    flash_dense = "flash_dense"

    def __str__(self) -> str:
        return self.value

    @property
    def is_explicit(self) -> bool:
        """Kernel consumes a materialized CSR/COO mask."""
        return self in (Algorithm.csr, Algorithm.coo)

    @property
    def is_implicit(self) -> bool:
        """Kernel computes neighbor indices from pattern parameters."""
        return self in (
            Algorithm.local,
            Algorithm.dilated1d,
            Algorithm.dilated2d,
            Algorithm.global_,
        )

    @property
    def is_graph_kernel(self) -> bool:
        return self.is_explicit or self.is_implicit

    @property
    def is_runnable(self) -> bool:
        """Has an executable implementation (everything except flash_dense)."""
        return self is not Algorithm.flash_dense


class DType(str, Enum):
    """Element precision. float16 exists for the memory model only."""

    float16 = "float16"
    float32 = "float32"
    float64 = "float64"

    def __str__(self) -> str:
        return self.value

    @property
    def torch(self) -> torch.dtype:
        return {
            DType.float16: torch.float16,
            DType.float32: torch.float32,
            DType.float64: torch.float64,
        }[self]

    @property
    def bytes(self) -> int:
        return {DType.float16: 2, DType.float32: 4, DType.float64: 8}[self]

    @classmethod
    def of(cls, dtype: torch.dtype) -> DType:
        for member in cls:
            if member.torch == dtype:
                return member
        raise ValueError(f"Unsupported dtype: {dtype}")


class PresetName(str, Enum):
    longformer = "longformer"
    longformer_dilated = "longformer_dilated"
    bigbird = "bigbird"

    def __str__(self) -> str:
        return self.value


class SweepKind(str, Enum):
    """constant_window and constant_sparsity vary L; sparsity varies S_f at one L."""

    constant_window = "constant_window"
    constant_sparsity = "constant_sparsity"
    sparsity = "sparsity"

    def __str__(self) -> str:
        return self.value


class Suite(str, Enum):
    oracle = "oracle"
    work = "work"
    composition = "composition"
    all = "all"

    def __str__(self) -> str:
        return self.value

    def includes(self, other: Suite) -> bool:
        return self is Suite.all or self is other


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"

    def __str__(self) -> str:
        return self.value
