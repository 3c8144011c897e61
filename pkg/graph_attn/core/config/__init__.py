# graph_attn/core/config/__init__.py

from graph_attn.core.config.logging import JsonFormatter, LogContext, get_logger, setup_logging
from graph_attn.core.config.settings import A100_80GB_BYTES, Settings, settings

__all__: list[str] = [
    "A100_80GB_BYTES",
    "Settings",
    "settings",
    "setup_logging",
    "get_logger",
    "LogContext",
    "JsonFormatter",
]
