"""Exception hierarchy shared by every kgraph_lab module."""

from __future__ import annotations


class KGraphError(Exception):
    """Base class for all library errors."""


class RankMismatch(KGraphError):
    pass


class NotComposable(KGraphError):
    pass


class DegreeOutOfRange(KGraphError):
    pass


class BoundRequired(KGraphError):
    pass


class EWrongRange(KGraphError):
    pass


class NotExhaustive(KGraphError):
    pass


class NotCoreGraded(KGraphError):
    pass


class DegreeMismatch(KGraphError):
    pass


class WindowTooSmall(KGraphError):
    pass


class UnknownId(KGraphError):
    pass


class ValidationError(KGraphError):
    """Raised when a raw presentation is not a k-graph.

    ``report`` is the full :class:`~kgraph_lab.core.ValidationReport`.
    """

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations) or "invalid k-graph")


class ParseError(KGraphError):
    def __init__(self, message: str, source: str = "<input>", line: int | None = None):
        self.source = source
        self.line = line
        self.message = message
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")
