# graph_attn/core/attention/oracle.py
"""Dense masked scaled-dot-product attention: the reference every kernel is checked against."""

from __future__ import annotations

import math

import torch

from graph_attn.core.config import get_logger, settings
from graph_attn.core.enums import DType
from graph_attn.core.errors import ShapeError
from graph_attn.core.mask import CooMask, CsrMask, coo_to_csr, csr_to_dense
from graph_attn.core.tensor import DenseMatrix

logger = get_logger(__name__)

__all__: list[str] = ["sdp_masked_oracle", "check_operands"]


def check_operands(Q: DenseMatrix, K: DenseMatrix, V: DenseMatrix, length: int) -> None:
    if not (Q.shape == K.shape == V.shape):
        raise ShapeError(f"Q, K, V shapes differ: {Q.shape}, {K.shape}, {V.shape}")
    if not (Q.dtype == K.dtype == V.dtype):
        raise ShapeError(f"Q, K, V dtypes differ: {Q.dtype}, {K.dtype}, {V.dtype}")
    if Q.rows != length:
        raise ShapeError(f"mask length {length} does not match L={Q.rows}")


def sdp_masked_oracle(
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    mask: CsrMask | CooMask,
    dtype: torch.dtype | DType | None = None,
) -> DenseMatrix:
    """
    softmax(QKᵀ/√d_k) V with masked-out scores set to -inf, fully materialized.

    Rows without any mask nonzero come out NaN in every column. Computes in
    ``settings.oracle_dtype`` unless ``dtype`` is given.
    """
    if isinstance(mask, CooMask):
        mask = coo_to_csr(mask)
    check_operands(Q, K, V, mask.length)

    target = dtype.torch if isinstance(dtype, DType) else (dtype or DType(settings.oracle_dtype).torch)
    q, k, v = (x.data.to(target) for x in (Q, K, V))

    scores = (q @ k.T) * (1.0 / math.sqrt(Q.cols))
    scores = scores.masked_fill(~csr_to_dense(mask), float("-inf"))
    weights = torch.softmax(scores, dim=-1)
    logger.debug("Oracle materialized %d score cells (L=%d, d=%d)", Q.rows**2, Q.rows, Q.cols)
    return DenseMatrix(data=weights @ v)
