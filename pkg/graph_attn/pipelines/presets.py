# graph_attn/pipelines/presets.py
"""
Longformer- and BigBird-style mask presets.

A preset is a list of pairwise-disjoint legs, each runnable by one kernel, plus the union of
all legs as one CSR mask. Running the legs one after another with carried softmax state
and running the CSR kernel once on the union must give the same output.
"""

from __future__ import annotations

from collections.abc import Sequence
from functools import reduce
from typing import Self

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, model_validator

from graph_attn.core.attention import AttentionResult, attend, attend_csr
from graph_attn.core.attention.kernels import Init
from graph_attn.core.config import get_logger
from graph_attn.core.enums import Algorithm, PresetName
from graph_attn.core.errors import PatternError
from graph_attn.core.mask import (
    CsrMask,
    Dilated1D,
    Global,
    Local,
    MaskPattern,
    gen_pattern_mask,
    mask_union,
    mask_union_disjoint,
)
from graph_attn.core.tensor import DenseMatrix

logger = get_logger(__name__)

__all__: list[str] = [
    "PresetLeg",
    "PresetPlan",
    "preset",
    "default_global_indices",
    "LOCAL_REACH",
    "RANDOM_SPARSITY",
]

# neighbors on each side of the diagonal
LOCAL_REACH = 50
RANDOM_SPARSITY = 0.001


class PresetLeg(BaseModel):
    """One kernel call: an implicit pattern, or an explicit CSR mask."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    algorithm: Algorithm
    pattern: MaskPattern | None = None
    mask: CsrMask | None = None

    @model_validator(mode="after")
    def _one_source(self) -> Self:
        if (self.pattern is None) == (self.mask is None):
            raise ValueError("a preset leg carries exactly one of pattern or mask")
        return self

    def materialize(self, L: int) -> CsrMask:
        if self.mask is not None:
            return self.mask
        assert self.pattern is not None
        return gen_pattern_mask(self.pattern, L)

    def run(
        self, Q: DenseMatrix, K: DenseMatrix, V: DenseMatrix, init: Init = None
    ) -> AttentionResult:
        source = self.mask if self.mask is not None else self.pattern
        assert source is not None
        return attend(Q, K, V, source, init)


class PresetPlan(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: PresetName
    length: int
    legs: list[PresetLeg]
    union: CsrMask

    def run_sequential(self, Q: DenseMatrix, K: DenseMatrix, V: DenseMatrix) -> AttentionResult:
        """Every leg in order, each starting from the previous leg's state."""
        result: AttentionResult | None = None
        work = 0
        for leg in self.legs:
            result = leg.run(Q, K, V, result)
            work += result.work
        assert result is not None
        return AttentionResult(O=result.O, state=result.state, work=work)

    def run_union(self, Q: DenseMatrix, K: DenseMatrix, V: DenseMatrix) -> AttentionResult:
        return attend_csr(Q, K, V, self.union)


def default_global_indices(L: int) -> tuple[int, ...]:
    """Three evenly spaced global tokens: first, middle, last."""
    return tuple(sorted({0, L // 2, L - 1}))


def _disjoint_random_mask(L: int, s_f: float, taken: CsrMask, seed: int) -> CsrMask:
    """round(s_f·L²) distinct coordinates drawn outside ``taken``, deterministic per seed."""
    k = int(round(s_f * L * L))
    free = L * L - taken.nnz
    if k > free:
        raise PatternError(f"random leg needs {k} free coordinates, only {free} left", length=L)

    taken_keys = taken.coordinates().numpy()
    gen = np.random.Generator(np.random.Philox(seed))
    chosen = np.zeros(0, dtype=np.int64)
    while chosen.size < k:
        draw = gen.integers(0, L * L, size=2 * (k - chosen.size) + 16, dtype=np.int64)
        if taken_keys.size:
            pos = np.searchsorted(taken_keys, draw).clip(max=taken_keys.size - 1)
            draw = draw[taken_keys[pos] != draw]
        chosen = np.union1d(chosen, draw)
    if chosen.size > k:
        chosen = np.sort(gen.choice(chosen, size=k, replace=False))
    return CsrMask.from_keys(L, torch.from_numpy(chosen.astype(np.int64)))


def preset(
    name: PresetName | str,
    L: int,
    seed: int = 0,
    *,
    global_indices: Sequence[int] | None = None,
    dilation: int = 2,
    local_reach: int = LOCAL_REACH,
    random_sf: float = RANDOM_SPARSITY,
) -> PresetPlan:
    """
    Build a preset at context length L.

    longformer: local window of ``local_reach`` tokens each side plus global tokens.
    longformer_dilated: a dilated window of the same reach in steps of ``dilation``, merged
    with the global rows and columns into a single CSR leg (the two overlap).
    bigbird: longformer's legs plus a random leg at ``random_sf`` drawn away from them.
    """
    name = PresetName(name)
    w = local_reach + 1
    if L < 2 * w:
        raise PatternError(f"{name} preset needs L >= {2 * w}, got {L}", length=L)
    indices = tuple(global_indices) if global_indices is not None else default_global_indices(L)

    local_leg = PresetLeg(algorithm=Algorithm.local, pattern=Local(w=w))
    global_leg = PresetLeg(algorithm=Algorithm.global_, pattern=Global(indices=indices, w=w))

    match name:
        case PresetName.longformer:
            legs = [local_leg, global_leg]
        case PresetName.longformer_dilated:
            dilated = gen_pattern_mask(Dilated1D(w=local_reach * dilation + 1, r=dilation), L)
            rows_cols = gen_pattern_mask(Global(indices=indices, w=1), L)
            legs = [PresetLeg(algorithm=Algorithm.csr, mask=mask_union(dilated, rows_cols))]
        case PresetName.bigbird:
            taken = mask_union_disjoint(local_leg.materialize(L), global_leg.materialize(L))
            random = _disjoint_random_mask(L, random_sf, taken, seed)
            legs = [local_leg, global_leg, PresetLeg(algorithm=Algorithm.csr, mask=random)]

    union = reduce(mask_union_disjoint, (leg.materialize(L) for leg in legs))
    logger.info(
        "Preset %s: L=%d legs=%s nnz=%d", name, L, [str(leg.algorithm) for leg in legs], union.nnz
    )
    return PresetPlan(name=name, length=L, legs=legs, union=union)
