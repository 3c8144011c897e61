# graph_attn/core/config/logging.py
"""
Centralized logging configuration.

Log records go to stderr; stdout is reserved for reports. Benchmark and verify records may
carry run fields (``extra={"algorithm": ..., "length": ...}``), which the json format emits
as top-level keys so a log stream can be filtered per kernel and context length.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Literal

from graph_attn.core.config.settings import settings

FormatType = Literal["simple", "detailed", "json"]

RUN_FIELDS: tuple[str, ...] = ("algorithm", "length", "d", "seed", "work", "nnz", "suite")

_FORMATS: dict[str, str] = {
    "simple": "%(levelname)s - %(message)s",
    "detailed": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
}
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# third-party loggers kept at WARNING
_QUIET_LOGGERS: tuple[str, ...] = ("torch", "numpy")


class ColoredFormatter(logging.Formatter):
    """Colored level names for console output."""

    COLORS = {
        "DEBUG": "\033[36m",  # Cyan
        "INFO": "\033[32m",  # Green
        "WARNING": "\033[33m",  # Yellow
        "ERROR": "\033[31m",  # Red
        "CRITICAL": "\033[35m",  # Magenta
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname)
        if color is None:
            return super().format(record)
        # color a copy; the record is shared with the file handler
        tinted = logging.makeLogRecord(record.__dict__)
        tinted.levelname = f"{color}{record.levelname}{self.RESET}"
        return super().format(tinted)


class JsonFormatter(logging.Formatter):
    """One JSON object per record, with any run fields lifted to top-level keys."""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "time": self.formatTime(record, _DATE_FORMAT),
            "name": record.name,
            "level": record.levelname,
            "message": record.getMessage(),
        }
        for field in RUN_FIELDS:
            if field in record.__dict__:
                payload[field] = record.__dict__[field]
        if record.exc_info:
            payload["exc"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


def _formatter(format_type: str, colored: bool) -> logging.Formatter:
    if format_type == "json":
        return JsonFormatter()
    fmt = _FORMATS.get(format_type, _FORMATS["simple"])
    if colored:
        return ColoredFormatter(fmt, datefmt=_DATE_FORMAT)
    return logging.Formatter(fmt, datefmt=_DATE_FORMAT)


def setup_logging(
    level: str | int | None = None,
    format_type: FormatType | None = None,
    log_file: Path | str | None = None,
    enable_colors: bool = True,
) -> None:
    """
    Configure application-wide logging.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL) or int
        format_type: simple, detailed or json (one JSON object per line)
        log_file: Optional file path to write logs to, in the same format
        enable_colors: Colored level names on the console (never in files or json)

    Usage:
        setup_logging()
        setup_logging(level="DEBUG", format_type="json")
        setup_logging(log_file="logs/sweep.log")
    """
    # Determine level and format
    if level is None:
        level = settings.log_level
    if isinstance(level, str):
        level = getattr(logging, level.upper())
    if format_type is None:
        format_type = settings.log_format

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    # Console handler
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(_formatter(format_type, enable_colors and log_file is None))
    root_logger.addHandler(console_handler)

    # File handler (optional)
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(_formatter(format_type, colored=False))
        root_logger.addHandler(file_handler)

    for name in _QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)

    root_logger.debug(
        "Logging configured: level=%s, format=%s, file=%s",
        logging.getLevelName(level),
        format_type,
        log_file or "console only",
    )


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance for a module.

    Usage:
        logger = get_logger(__name__)
        logger.info("Kernel finished", extra={"algorithm": "csr", "length": 4096})
    """
    return logging.getLogger(name)


class LogContext:
    """Context manager for temporary log level changes (sweeps quiet per-run kernel logs)."""

    def __init__(self, logger: logging.Logger | str, level: str | int):
        if isinstance(logger, str):
            logger = logging.getLogger(logger)
        self.logger = logger
        self.level = level if isinstance(level, int) else getattr(logging, level.upper())
        self.original_level = logger.level

    def __enter__(self) -> logging.Logger:
        self.logger.setLevel(self.level)
        return self.logger

    def __exit__(self, *args: object) -> None:
        self.logger.setLevel(self.original_level)
