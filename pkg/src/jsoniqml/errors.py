"""Engine error hierarchy.

Every failure surfaced by the engine carries a stable error code plus an
optional (line, column) source position. The exception class determines the
CLI exit-code family: 1 parse, 2 resolve, 3 dynamic, 4 io, 5 cap.
"""

from __future__ import annotations

from typing import Optional, Tuple

Position = Tuple[int, int]


class EngineError(Exception):
    """Base class for all engine failures."""

    exit_code = 3

    def __init__(self, code: str, message: str, position: Optional[Position] = None):
        self.code = code
        self.message = message
        self.position = position
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.position is not None:
            line, col = self.position
            return f"[{self.code}] {self.message} (line {line}, column {col})"
        return f"[{self.code}] {self.message}"


class QueryParseError(EngineError):
    """Lexical or syntactic failure; exit family 1."""

    exit_code = 1


class ResolutionError(EngineError):
    """Static name-resolution failure; exit family 2."""

    exit_code = 2


class DynamicError(EngineError):
    """Runtime failure: typing, validation, ML, evaluation; exit family 3."""

    exit_code = 3


class SourceIOError(EngineError):
    """File access failure; exit family 4."""

    exit_code = 4

    def __init__(self, message: str, position: Optional[Position] = None):
        super().__init__("IO_ERROR", message, position)


class MaterializationCapError(EngineError):
    """More items than the configured cap were collected; exit family 5."""

    exit_code = 5

    def __init__(self, cap: int, position: Optional[Position] = None):
        self.cap = cap
        super().__init__(
            "MATERIALIZATION_CAP_EXCEEDED",
            f"sequence exceeded the materialization cap of {cap} items",
            position,
        )
