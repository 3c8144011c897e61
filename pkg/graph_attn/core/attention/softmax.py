# graph_attn/core/attention/softmax.py
"""Online-softmax state and the per-neighbor update recurrence."""

from __future__ import annotations

from typing import Self

import torch
from pydantic import BaseModel, ConfigDict, model_validator

__all__: list[str] = ["SoftmaxState", "online_update", "two_pass_softmax"]


class SoftmaxState(BaseModel):
    """
    Running row maxima ``m`` and denominators ``l``.

    A row that has not seen a neighbor has m = -inf and l = 0; after neighbors with scaled
    scores W_1..W_k, m = max(W) and l = sum(exp(W - m)).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    m: torch.Tensor
    l: torch.Tensor  # noqa: E741

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.m.dim() != 1 or self.m.shape != self.l.shape:
            raise ValueError(
                f"m and l must be 1-D of equal length, got {tuple(self.m.shape)} and {tuple(self.l.shape)}"
            )
        if self.m.dtype != self.l.dtype or not self.m.is_floating_point():
            raise ValueError("m and l must share a floating dtype")
        if bool((self.l < 0).any()) or bool(torch.isnan(self.l).any()):
            raise ValueError("denominators must be non-negative")
        unseen = torch.isneginf(self.m)
        if not torch.equal(unseen, self.l == 0):
            raise ValueError("l == 0 must hold exactly where m == -inf")
        return self

    @classmethod
    def initial(cls, length: int, dtype: torch.dtype) -> Self:
        return cls(
            m=torch.full((length,), float("-inf"), dtype=dtype),
            l=torch.zeros(length, dtype=dtype),
        )

    @property
    def length(self) -> int:
        return int(self.m.shape[0])

    def seen(self) -> torch.Tensor:
        """Rows that have processed at least one neighbor."""
        return self.l > 0


def online_update(
    m_i: torch.Tensor,
    l_i: torch.Tensor,
    O_i: torch.Tensor,
    W: torch.Tensor,
    V_j: torch.Tensor,
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """
    Fold one neighbor (scaled score W, value row V_j) into a row's softmax accumulation.

    Leading dimensions are rows: m_i, l_i, W have shape (...), O_i and V_j shape (..., d).
    The output row is renormalized by l_new at every call. From the initial state
    (m = -inf, l = 0) the carried term exp(m_i - m_new) is exactly 0.
    """
    m_new = torch.maximum(m_i, W)
    carried = l_i * torch.exp(m_i - m_new)
    weight = torch.exp(W - m_new)
    l_new = carried + weight
    O_new = (carried.unsqueeze(-1) * O_i + weight.unsqueeze(-1) * V_j) / l_new.unsqueeze(-1)
    return m_new, l_new, O_new


def two_pass_softmax(scores: torch.Tensor, values: torch.Tensor) -> torch.Tensor:
    """Max-subtracted softmax(scores) @ values for one row; the reference for online_update."""
    p = torch.exp(scores - scores.max())
    return (p / p.sum()) @ values
