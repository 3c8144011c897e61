# graph_attn/core/mask/io.py
"""
Mask files.

Binary layout (little-endian): magic ``CSRM``, then u64 version (1), u64 L, u64 nnz,
u64 offsets[L+1], u64 cols[nnz]. Tiny test masks may also be given as a 0-1 CSV grid.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import torch
from pydantic import ValidationError

from graph_attn.core.config import get_logger
from graph_attn.core.errors import MaskFileError
from graph_attn.core.mask.formats import CsrMask, dense_to_csr

logger = get_logger(__name__)

MAGIC = b"CSRM"
VERSION = 1
_HEADER = struct.Struct("<4sQQQ")
_U64 = np.dtype("<u8")


def save_csr(mask: CsrMask, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, mask.length, mask.nnz))
        f.write(mask.offsets.numpy().astype(_U64).tobytes())
        f.write(mask.cols.numpy().astype(_U64).tobytes())
    logger.info("Wrote CSR mask L=%d nnz=%d to %s", mask.length, mask.nnz, path)
    return path


def load_csr(path: Path | str) -> CsrMask:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise MaskFileError(f"{path}: truncated header", path=str(path))
    magic, version, L, nnz = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise MaskFileError(f"{path}: bad magic {magic!r}", path=str(path))
    if version != VERSION:
        raise MaskFileError(f"{path}: unsupported version {version}", path=str(path))

    expected = _HEADER.size + 8 * (L + 1 + nnz)
    if len(raw) != expected:
        raise MaskFileError(
            f"{path}: expected {expected} bytes for L={L} nnz={nnz}, got {len(raw)}",
            path=str(path),
        )
    body = np.frombuffer(raw, dtype=_U64, offset=_HEADER.size)
    offsets = torch.from_numpy(body[: L + 1].astype(np.int64))
    cols = torch.from_numpy(body[L + 1 :].astype(np.int64))
    try:
        return CsrMask(length=int(L), offsets=offsets, cols=cols)
    except ValidationError as e:
        raise MaskFileError(f"{path}: invalid mask: {e}", path=str(path)) from e


def load_dense_csv(path: Path | str) -> CsrMask:
    path = Path(path)
    try:
        grid = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2)
    except ValueError as e:
        raise MaskFileError(f"{path}: not a 0-1 CSV grid: {e}", path=str(path)) from e
    if grid.shape[0] != grid.shape[1]:
        raise MaskFileError(f"{path}: grid must be square, got {grid.shape}", path=str(path))
    if not np.isin(grid, (0, 1)).all():
        raise MaskFileError(f"{path}: grid entries must be 0 or 1", path=str(path))
    return dense_to_csr(torch.from_numpy(grid))


def load_mask(path: Path | str) -> CsrMask:
    """Load a mask file, choosing the CSV reader for ``.csv`` and the binary reader otherwise."""
    path = Path(path)
    if not path.is_file():
        raise MaskFileError(f"mask file not found: {path}", path=str(path))
    if path.suffix.lower() == ".csv":
        return load_dense_csv(path)
    return load_csr(path)
