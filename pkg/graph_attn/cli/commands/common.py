# graph_attn/cli/commands/common.py
"""Helpers shared by the subcommands: error rendering, pattern flags and output."""

from __future__ import annotations

import json
import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from functools import wraps
from pathlib import Path
from typing import Any, ParamSpec, TypeVar

import typer
from pydantic import ValidationError

from graph_attn.core.config import get_logger
from graph_attn.core.enums import Algorithm
from graph_attn.core.errors import ConfigurationError, GraphAttnError
from graph_attn.core.mask import (
    Dilated1D,
    Dilated2D,
    Global,
    Local,
    MaskPattern,
    block_for_sparsity,
    parse_pattern,
    window_for_sparsity,
)
from graph_attn.pipelines.presets import default_global_indices

logger = get_logger(__name__)

P = ParamSpec("P")
R = TypeVar("R")

EXIT_ERROR = 1
EXIT_FAILED = 2


def error_payload(exc: Exception) -> dict[str, Any]:
    if isinstance(exc, GraphAttnError):
        return exc.to_dict()
    if isinstance(exc, ValidationError):
        return {
            "error": "ValidationError",
            "message": f"{exc.error_count()} validation error(s) for {exc.title}",
            "errors": exc.errors(include_url=False),
        }
    return {"error": type(exc).__name__, "message": str(exc)}


@contextmanager
def reporting_errors() -> Iterator[None]:
    """Render library errors as a JSON object on stderr and exit with status 1."""
    try:
        yield
    except (GraphAttnError, ValidationError, FileNotFoundError) as e:
        logger.debug("Command failed", exc_info=True)
        typer.echo(json.dumps(error_payload(e), default=str), err=True)
        raise typer.Exit(EXIT_ERROR) from e


def handles_errors(fn: Callable[P, R]) -> Callable[P, R]:
    @wraps(fn)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        with reporting_errors():
            return fn(*args, **kwargs)

    return wrapper


def parse_ints(text: str | None) -> list[int] | None:
    """'0,512,1023' -> [0, 512, 1023]."""
    if text is None or not text.strip():
        return None
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigurationError(f"expected comma-separated integers, got {text!r}") from e


def parse_floats(text: str | None) -> list[float] | None:
    """'0.001,0.01,0.1' -> [0.001, 0.01, 0.1]."""
    if text is None or not text.strip():
        return None
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigurationError(f"expected comma-separated numbers, got {text!r}") from e


def build_pattern(
    algorithm: Algorithm,
    length: int,
    *,
    window: int | None = None,
    dilation: int = 1,
    block: int | None = None,
    global_indices: str | None = None,
    sparsity: float | None = None,
    pattern_json: str | None = None,
) -> MaskPattern | None:
    """
    Pattern implied by the command-line flags.

    Implicit kernels size a missing window or block from ``sparsity``. Explicit kernels and
    the dense oracle get a materialized window when one is given, otherwise None (the
    caller falls back to a mask file or a random mask).
    """
    if pattern_json is not None:
        return parse_pattern(pattern_json)

    match algorithm:
        case Algorithm.local | Algorithm.dilated1d:
            if window is None:
                if sparsity is None:
                    raise ConfigurationError(f"{algorithm} needs --window or --sparsity")
                window = window_for_sparsity(sparsity, length, dilation)
            if algorithm is Algorithm.local:
                return Local(w=window)
            return Dilated1D(w=window, r=dilation)
        case Algorithm.dilated2d:
            if block is None:
                if sparsity is None:
                    raise ConfigurationError("dilated2d needs --block or --sparsity")
                block = block_for_sparsity(sparsity, length)
            return Dilated2D(b=block, r=dilation)
        case Algorithm.global_:
            indices = parse_ints(global_indices) or list(default_global_indices(length))
            return Global(indices=tuple(indices), w=window or 1)
    if window is not None:
        return Local(w=window) if dilation == 1 else Dilated1D(w=window, r=dilation)
    return None


def emit(text: str, out: Path | None) -> None:
    """Write to ``out`` or to stdout."""
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    logger.info("Wrote %s", out)
