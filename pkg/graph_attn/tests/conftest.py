# graph_attn/tests/conftest.py
from __future__ import annotations

from collections.abc import Callable, Generator
from pathlib import Path

import pytest
import torch

from graph_attn.core.mask import CsrMask, Global, Local, gen_pattern_mask
from graph_attn.core.tensor import DenseMatrix, random_qkv


@pytest.fixture(autouse=True)
def sandbox_env(
    tmp_path: Path,
    monkeypatch: pytest.MonkeyPatch,
) -> Generator[None, None, None]:
    """
    Keep reports, caches and .env lookups inside the test's temp directory.
    Automatically reverts after each test.
    """
    sandbox = tmp_path / ".sandbox"
    data = sandbox / "data"
    cache = sandbox / "cache"
    for p in (data, cache):
        p.mkdir(parents=True, exist_ok=True)

    monkeypatch.setenv("XDG_DATA_HOME", str(data))
    monkeypatch.setenv("XDG_CACHE_HOME", str(cache))
    monkeypatch.setenv("NO_COLOR", "1")
    monkeypatch.setenv("GRAPH_ATTN_ENVIRONMENT", "test")

    monkeypatch.chdir(tmp_path)

    yield


@pytest.fixture
def qkv() -> Callable[..., tuple[DenseMatrix, DenseMatrix, DenseMatrix]]:
    """Factory for seeded uniform Q, K, V (float64 unless told otherwise)."""

    def _make(
        L: int, d: int = 8, seed: int = 0, dtype: torch.dtype = torch.float64
    ) -> tuple[DenseMatrix, DenseMatrix, DenseMatrix]:
        return random_qkv(L, d, seed, dtype)

    return _make


@pytest.fixture
def longformer_masks() -> Callable[[int], tuple[CsrMask, CsrMask]]:
    """Local (w=51) and global (first/middle/last, w=51) masks at L."""

    def _make(L: int) -> tuple[CsrMask, CsrMask]:
        local = gen_pattern_mask(Local(w=51), L)
        glob = gen_pattern_mask(Global(indices=(0, L // 2, L - 1), w=51), L)
        return local, glob

    return _make

