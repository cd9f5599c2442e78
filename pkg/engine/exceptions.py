"""Error hierarchy shared by the engine modules and the management commands."""

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


class AspirError(Exception):
    """Base class of every error raised by the engine."""


class ParseError(AspirError):
    def __init__(self, message, span=None, expected=()):
        self.span = span
        self.expected = tuple(sorted(expected))
        text = f"{span}: {message}" if span is not None else message
        if self.expected:
            text += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(text)


class SafetyError(ParseError):
    pass


class ArityError(ParseError):
    pass


class NotGround(AspirError):
    pass


class GroundingError(AspirError):
    pass


class BoundExceeded(AspirError):
    def __init__(self, limit, value):
        self.limit = limit
        self.value = value
        super().__init__(f"resource bound '{limit}' exceeded ({value})")


class UnknownExternal(AspirError):
    pass


class ExternalArityError(AspirError):
    pass


class DomainError(AspirError):
    pass


class AnalysisError(AspirError):
    pass


class MetaEncodingError(AspirError):
    pass


class ChainError(AspirError):
    pass


class UnsupportedProgram(AspirError):
    """The program uses a construct the requested operation does not handle."""
