# graph_attn/core/mask/__init__.py
"""Attention masks as token graphs: formats, patterns, generators and analytics."""

from graph_attn.core.mask.analytics import (
    LONGNET_DOT_PRODUCTS_PER_TOKEN,
    block_for_sparsity,
    expected_nnz,
    local_nnz,
    longnet_sparsity,
    sparsity_factor,
    window_for_sparsity,
)
from graph_attn.core.mask.formats import (
    CooMask,
    CsrMask,
    coo_to_csr,
    csr_to_coo,
    csr_to_dense,
    dense_to_csr,
    mask_equal,
    mask_union,
    mask_union_disjoint,
)
from graph_attn.core.mask.graph import (
    NeighborSource,
    gen_pattern_mask,
    get_neighbors,
    neighbor_source,
)
from graph_attn.core.mask.io import load_csr, load_dense_csv, load_mask, save_csr
from graph_attn.core.mask.patterns import (
    Dilated1D,
    Dilated2D,
    Global,
    Local,
    MaskPattern,
    Random,
    is_dilated1d,
    is_dilated2d,
    is_global,
    is_local,
    parse_pattern,
)

__all__: list[str] = [
    "CooMask",
    "CsrMask",
    "coo_to_csr",
    "csr_to_coo",
    "csr_to_dense",
    "dense_to_csr",
    "mask_equal",
    "mask_union",
    "mask_union_disjoint",
    "Local",
    "Dilated1D",
    "Dilated2D",
    "Global",
    "Random",
    "MaskPattern",
    "parse_pattern",
    "is_local",
    "is_dilated1d",
    "is_dilated2d",
    "is_global",
    "NeighborSource",
    "neighbor_source",
    "get_neighbors",
    "gen_pattern_mask",
    "LONGNET_DOT_PRODUCTS_PER_TOKEN",
    "sparsity_factor",
    "longnet_sparsity",
    "expected_nnz",
    "local_nnz",
    "window_for_sparsity",
    "block_for_sparsity",
    "save_csr",
    "load_csr",
    "load_dense_csv",
    "load_mask",
]
