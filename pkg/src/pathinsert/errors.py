class PathInsertError(Exception):
    """Base class for all errors raised by this package."""


class DocumentError(PathInsertError):
    """A document could not be parsed.

    ``line`` is 1-based and ``field`` names the offending key when known.
    """

    def __init__(self, message, line=None, field=None, source=None):
        self.line = line
        self.field = field
        self.source = source
        where = []
        if source:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DanglingReferenceError(PathInsertError):
    def __init__(self, kind, ident, context=""):
        self.kind = kind
        self.ident = ident
        msg = f"unknown {kind} {ident!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class TimetableError(PathInsertError):
    pass


class ParameterError(PathInsertError):
    pass


class MissingRunTimeError(ParameterError):
    def __init__(self, segment, pattern):
        self.segment = segment
        self.pattern = pattern
        super().__init__(f"no minimum running time for segment {segment!r} pattern {pattern}")


class RequestError(PathInsertError):
    pass


class InvariantViolation(PathInsertError):
    """Internal inconsistency; always a bug."""
