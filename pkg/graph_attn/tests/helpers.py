# graph_attn/tests/helpers.py
"""Shared test helpers that are not fixtures."""

from __future__ import annotations

import torch

from graph_attn.core.mask import MaskPattern


def dense_pattern(pattern: MaskPattern, L: int) -> torch.Tensor:
    """Predicate-enumerated L×L bool grid of an implicit pattern."""
    grid = torch.zeros(L, L, dtype=torch.bool)
    for i in range(L):
        for j in range(L):
            grid[i, j] = bool(pattern.accepts(i, j, L))
    return grid
