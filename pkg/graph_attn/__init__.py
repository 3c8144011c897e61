# graph_attn/__init__.py
"""graph_attn - work-optimal masked attention as graph processing."""

from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as _pkg_version

try:
    __version__ = _pkg_version("graph-attn")
except PackageNotFoundError:
    __version__ = "0.0.0"

from graph_attn.core import (
    Algorithm,
    AttentionResult,
    DenseMatrix,
    HardwareBudget,
    SoftmaxState,
    accounting_for,
    attend,
    get_logger,
    max_context_length,
    random_uniform_matrix,
    sdp_masked_oracle,
    settings,
    setup_logging,
)
from graph_attn.core.mask import CooMask, CsrMask, gen_pattern_mask, parse_pattern

__all__: list[str] = [
    "__version__",
    # Core
    "Algorithm",
    "DenseMatrix",
    "random_uniform_matrix",
    "SoftmaxState",
    "AttentionResult",
    "attend",
    "sdp_masked_oracle",
    # Masks
    "CsrMask",
    "CooMask",
    "parse_pattern",
    "gen_pattern_mask",
    # Memory model
    "HardwareBudget",
    "accounting_for",
    "max_context_length",
    # Config
    "settings",
    "get_logger",
    "setup_logging",
]
