"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TsclsError(Exception):
    """Base class for every error raised by this package."""


class WellFormednessError(TsclsError):
    """A term value violates a structural constraint (e.g. a loop with an
    empty membrane wrapping non-empty content)."""


class UnknownElementType(TsclsError):
    """The typing environment has no assignment for an element."""

    def __init__(self, element: str):
        super().__init__(f"no type assignment for element '{element}'")
        self.element = element


class ParseError(TsclsError):
    """Syntax error with source location."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ModelError(TsclsError):
    """Model validation failure; carries every diagnostic found."""

    def __init__(self, diagnostics: list[str]):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


class SubstitutionError(TsclsError):
    """Instantiation does not bind a variable the pattern uses."""


class RateEvalError(TsclsError):
    """Rate expression evaluation failure (division by zero outside the
    guarded idiom, or an undeclared name)."""


class OracleSizeError(TsclsError):
    """Brute-force oracle refused an instance above its size guard."""
