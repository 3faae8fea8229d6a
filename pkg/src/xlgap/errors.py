"""Exception hierarchy shared by every xlgap module."""


class XlgapError(Exception):
    """Base class for all library errors."""


class ParseError(XlgapError, ValueError):
    """Malformed input file or value.

    ``line`` is 1-based when known; ``offset`` is a byte offset for binary input.
    """

    def __init__(self, message, *, path=None, line=None, offset=None):
        self.path = path
        self.line = line
        self.offset = offset
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DomainError(XlgapError, ValueError):
    """An argument lies outside the domain of the operation."""


class AlignmentError(DomainError):
    """Row counts of paired matrices disagree."""


class DegenerateInputError(DomainError):
    """Input has no variance (or no mass) where the operation needs some."""


class ConfigError(XlgapError, ValueError):
    pass


class UnsupportedSizeError(XlgapError, ValueError):
    """Exhaustive routine asked to enumerate beyond its size limit."""


class ConversionError(XlgapError, ValueError):
    """No G2P rule matched at ``position``."""

    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} (position {position})")


class SegmentationError(XlgapError, ValueError):
    """No inventory unit matched at ``offset``."""

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (offset {offset})")


class ConvergenceError(XlgapError, ArithmeticError):
    """Raised only by callers that opt into strict convergence checking."""
