# graph_attn/core/attention/kernels.py
"""
Graph-processing attention kernels.

Every kernel walks, for each row i, the neighbors of i in ascending column order and folds
them into (m_i, l_i, O_i) with ``online_update``; only mask nonzeros ever produce a dot
product. Rows are processed row-parallel: at step t every row with more than t neighbors
consumes its t-th neighbor in one vectorized update. Rows are sorted by neighbor count so
the active rows of a step form a prefix of that order.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import torch
from pydantic import BaseModel, ConfigDict

from graph_attn.core.attention.oracle import check_operands
from graph_attn.core.attention.softmax import SoftmaxState, online_update
from graph_attn.core.config import get_logger
from graph_attn.core.errors import PatternError, ShapeError, StateError
from graph_attn.core.mask import (
    CooMask,
    CsrMask,
    Dilated1D,
    Dilated2D,
    Global,
    Local,
    MaskPattern,
    Random,
    gen_pattern_mask,
    neighbor_source,
)
from graph_attn.core.mask.graph import NeighborSource
from graph_attn.core.tensor import DenseMatrix

logger = get_logger(__name__)

__all__: list[str] = [
    "AttentionResult",
    "Probe",
    "TouchRecorder",
    "attend",
    "attend_csr",
    "attend_coo",
    "attend_local",
    "attend_dilated1d",
    "attend_dilated2d",
    "attend_global",
]

Probe = Callable[[torch.Tensor, torch.Tensor], None]


class AttentionResult(BaseModel):
    """Kernel output, final softmax state (for composition) and dot-product count."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    O: DenseMatrix  # noqa: E741
    state: SoftmaxState
    work: int

    def carry(self) -> tuple[SoftmaxState, DenseMatrix]:
        """The init pair for a follow-up kernel over a disjoint mask."""
        return self.state, self.O


Init = AttentionResult | tuple[SoftmaxState, DenseMatrix] | None


class TouchRecorder:
    """Probe that records every (i, j) pair a kernel computes a dot product for."""

    def __init__(self, length: int) -> None:
        self.length = length
        self._keys: list[torch.Tensor] = []

    def __call__(self, rows: torch.Tensor, cols: torch.Tensor) -> None:
        self._keys.append(rows * self.length + cols)

    @property
    def touched(self) -> int:
        return sum(int(k.numel()) for k in self._keys)

    def coordinates(self) -> torch.Tensor:
        """Sorted keys row·L + col of every touch (duplicates kept)."""
        if not self._keys:
            return torch.zeros(0, dtype=torch.int64)
        keys, _ = torch.sort(torch.cat(self._keys))
        return keys


def _initial(init: Init, Q: DenseMatrix) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    if init is None:
        state = SoftmaxState.initial(Q.rows, Q.dtype)
        return state.m.clone(), state.l.clone(), torch.zeros_like(Q.data)

    state, O = init.carry() if isinstance(init, AttentionResult) else init
    if state.length != Q.rows or O.shape != Q.shape:
        raise StateError(
            f"init state for L={state.length}, O {O.shape} does not match Q {Q.shape}"
        )
    if state.m.dtype != Q.dtype or O.dtype != Q.dtype:
        raise StateError(f"init dtype {state.m.dtype} does not match operands {Q.dtype}")
    unseen = ~state.seen()
    if bool((O.data[unseen] != 0).any()):
        raise StateError("init O must be zero on rows without a processed neighbor")
    return state.m.clone(), state.l.clone(), O.data.clone()


def _propagate(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    source: NeighborSource,
    init: Init,
    probe: Probe | None,
    row_block: int | None,
    label: str,
) -> AttentionResult:
    check_operands(Q, K, V, source.length)
    if Q.dtype == torch.float16:
        raise ShapeError("float16 kernels are not supported; use float32 or float64")
    if row_block is not None and row_block < 1:
        raise ShapeError(f"row_block must be >= 1, got {row_block}")

    q, k, v = Q.data, K.data, V.data
    m, l, out = _initial(init, Q)  # noqa: E741
    scale = 1.0 / math.sqrt(Q.cols)

    counts = source.counts()
    order = torch.argsort(counts, descending=True, stable=True)
    block = row_block or Q.rows
    work = 0

    for start in range(0, Q.rows, block):
        rows_b = order[start : start + block]
        counts_b = counts[rows_b]
        if counts_b.numel() == 0 or int(counts_b[0].item()) == 0:
            continue
        # active rows per step: how many of the (descending) counts exceed t
        ascending = counts_b.flip(0)
        steps = torch.arange(int(counts_b[0].item()), dtype=torch.int64)
        active = rows_b.numel() - torch.searchsorted(ascending, steps, right=True)

        for t, n in enumerate(active.tolist()):
            rows = rows_b[:n]
            cols = source.column_at(rows, t)
            if probe is not None:
                probe(rows, cols)
            W = (q[rows] * k[cols]).sum(dim=-1) * scale
            m[rows], l[rows], out[rows] = online_update(m[rows], l[rows], out[rows], W, v[cols])
            work += n

    logger.debug("%s kernel: L=%d d=%d work=%d", label, Q.rows, Q.cols, work)
    return AttentionResult(O=DenseMatrix(data=out), state=SoftmaxState(m=m, l=l), work=work)


def attend_csr(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    mask: CsrMask,
    init: Init = None,
    *,
    probe: Probe | None = None,
    row_block: int | None = None,
) -> AttentionResult:
    """Explicit-mask kernel over a CSR mask; row spans are read from the offsets vector."""
    if not isinstance(mask, CsrMask):
        raise ShapeError(f"attend_csr expects a CsrMask, got {type(mask).__name__}")
    return _propagate(Q, K, V, neighbor_source(mask), init, probe, row_block, "csr")


def attend_coo(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    mask: CooMask,
    init: Init = None,
    *,
    probe: Probe | None = None,
    row_block: int | None = None,
) -> AttentionResult:
    """Explicit-mask kernel over a COO mask; row spans are found by binary search."""
    if not isinstance(mask, CooMask):
        raise ShapeError(f"attend_coo expects a CooMask, got {type(mask).__name__}")
    return _propagate(Q, K, V, neighbor_source(mask), init, probe, row_block, "coo")


def _attend_pattern(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    pattern: MaskPattern,
    init: Init,
    probe: Probe | None,
    row_block: int | None,
) -> AttentionResult:
    source = neighbor_source(pattern, Q.rows)
    return _propagate(Q, K, V, source, init, probe, row_block, pattern.kind)


def attend_local(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    w: int,
    init: Init = None,
    *,
    probe: Probe | None = None,
    row_block: int | None = None,
) -> AttentionResult:
    return _attend_pattern(Q, K, V, Local(w=w), init, probe, row_block)


def attend_dilated1d(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    w: int,
    r: int,
    init: Init = None,
    *,
    probe: Probe | None = None,
    row_block: int | None = None,
) -> AttentionResult:
    return _attend_pattern(Q, K, V, Dilated1D(w=w, r=r), init, probe, row_block)


def attend_dilated2d(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    b: int,
    r: int,
    init: Init = None,
    *,
    probe: Probe | None = None,
    row_block: int | None = None,
) -> AttentionResult:
    return _attend_pattern(Q, K, V, Dilated2D(b=b, r=r), init, probe, row_block)


def attend_global(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    indices: list[int] | tuple[int, ...],
    w: int,
    init: Init = None,
    *,
    probe: Probe | None = None,
    row_block: int | None = None,
) -> AttentionResult:
    """Global rows and columns minus the local window of size w (walks indices per row)."""
    return _attend_pattern(Q, K, V, Global(indices=tuple(indices), w=w), init, probe, row_block)


def attend(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    source: CsrMask | CooMask | MaskPattern,
    init: Init = None,
    *,
    probe: Probe | None = None,
    row_block: int | None = None,
) -> AttentionResult:
    """Dispatch to the kernel matching a mask or pattern; random patterns run through CSR."""
    match source:
        case CsrMask():
            return attend_csr(Q, K, V, source, init, probe=probe, row_block=row_block)
        case CooMask():
            return attend_coo(Q, K, V, source, init, probe=probe, row_block=row_block)
        case Local() | Dilated1D() | Dilated2D() | Global():
            return _attend_pattern(Q, K, V, source, init, probe, row_block)
        case Random():
            mask = gen_pattern_mask(source, Q.rows)
            return attend_csr(Q, K, V, mask, init, probe=probe, row_block=row_block)
    raise PatternError(f"unknown mask source: {type(source).__name__}")
