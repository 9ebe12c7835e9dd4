"""Error types shared across the package.

Every error carries a stable machine-readable code (``E_...``) plus an
optional 1-based (line, column) source position.
"""
from __future__ import annotations


class ToolError(Exception):
    def __init__(self, code: str, message: str, pos: tuple[int, int] | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.pos = pos

    def __str__(self) -> str:
        if self.pos is not None:
            return f"{self.pos[0]}:{self.pos[1]}: {self.code}: {self.message}"
        return f"{self.code}: {self.message}"


class ParseError(ToolError):
    """Lexical or bracketing failure while reading s-expressions."""


class ElabError(ToolError):
    """Ill-formed or ill-sorted surface syntax."""


class VcError(ToolError):
    """Failure while eliminating program modalities (missing annotations etc.)."""


class OracleError(ToolError):
    """Term or program outside the fragment the concrete interpreter handles."""


class UsageError(ToolError):
    """Bad command line."""

    def __init__(self, message: str):
        super().__init__("E_USAGE", message)
