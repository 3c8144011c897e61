# graph_attn/core/errors.py
"""Exception hierarchy. Every error renders to a machine-readable dict for the CLI."""

from __future__ import annotations

from typing import Any


class GraphAttnError(Exception):
    """Base class for all graph_attn errors."""

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, **self.details}


class MaskError(GraphAttnError, ValueError):
    """A mask violates its format invariants."""

    def __init__(self, message: str, coordinate: tuple[int, int] | None = None) -> None:
        if coordinate is not None:
            super().__init__(f"{message} at {coordinate}", coordinate=list(coordinate))
        else:
            super().__init__(message)
        self.coordinate = coordinate


class MaskOverlapError(MaskError):
    """Two masks expected to be disjoint share a coordinate."""

    def __init__(self, coordinate: tuple[int, int]) -> None:
        super().__init__("masks overlap", coordinate=coordinate)


class MaskFileError(GraphAttnError, ValueError):
    """A mask file is malformed or has an unknown layout."""


class ShapeError(GraphAttnError, ValueError):
    """Operand shapes or dtypes are inconsistent."""


class PatternError(GraphAttnError, ValueError):
    """Pattern parameters are invalid for the requested context length."""


class ConfigurationError(GraphAttnError, ValueError):
    """A harness was configured inconsistently (distinct from a comparison failure)."""


class CapacityError(GraphAttnError):
    """No positive context length fits the budget."""


class FootprintError(GraphAttnError, MemoryError):
    """A benchmark ran out of memory; carries the estimated footprint."""

    def __init__(self, message: str, requested_bytes: int) -> None:
        super().__init__(message, requested_bytes=requested_bytes)
        self.requested_bytes = requested_bytes


class StateError(GraphAttnError, ValueError):
    """A carried softmax state does not match the operands or violates its invariants."""
