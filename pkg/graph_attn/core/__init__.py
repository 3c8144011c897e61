# graph_attn/core/__init__.py
"""Core functionality: tensors, masks, attention kernels and the memory model."""

from graph_attn.core.attention import (
    AttentionResult,
    SoftmaxState,
    TouchRecorder,
    attend,
    attend_coo,
    attend_csr,
    attend_dilated1d,
    attend_dilated2d,
    attend_global,
    attend_local,
    online_update,
    sdp_masked_oracle,
)
from graph_attn.core.config import get_logger, settings, setup_logging
from graph_attn.core.enums import Algorithm, DType, PresetName, Suite, SweepKind
from graph_attn.core.memmodel import (
    HardwareBudget,
    MemoryAccounting,
    accounting_for,
    capacity_curve,
    max_context_length,
)
from graph_attn.core.tensor import DenseMatrix, Tolerances, allclose, random_uniform_matrix

__all__: list[str] = [
    "Algorithm",
    "DType",
    "PresetName",
    "Suite",
    "SweepKind",
    "DenseMatrix",
    "Tolerances",
    "allclose",
    "random_uniform_matrix",
    "SoftmaxState",
    "online_update",
    "sdp_masked_oracle",
    "AttentionResult",
    "TouchRecorder",
    "attend",
    "attend_csr",
    "attend_coo",
    "attend_local",
    "attend_dilated1d",
    "attend_dilated2d",
    "attend_global",
    "MemoryAccounting",
    "HardwareBudget",
    "accounting_for",
    "max_context_length",
    "capacity_curve",
    "get_logger",
    "settings",
    "setup_logging",
]
