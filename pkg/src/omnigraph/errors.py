"""Exception hierarchy shared by all omnigraph modules."""

from __future__ import annotations


class OmniGraphError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(OmniGraphError):
    """Structural misuse of a workspace: bad ids, bad values, broken invariants."""


class UnknownElementError(GraphError):
    """An operation referenced an element id that does not exist."""

    def __init__(self, element_id: int, message: str | None = None):
        self.element_id = element_id
        super().__init__(message or f"unknown element id {element_id}")


class ParseError(OmniGraphError):
    """A text input (workspace file, metamodel, query, script, template) failed to parse."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{message} ({loc})"
        super().__init__(message)


class IntegrityError(OmniGraphError):
    """A document violates workspace invariants (e.g. a dangling link endpoint)."""

    def __init__(self, message: str, element_id: int | None = None):
        self.element_id = element_id
        super().__init__(message)


class FormatVersionError(OmniGraphError):
    """A document declares a file-format version this build does not support."""


class MetaModelError(OmniGraphError):
    """A metamodel definition is internally inconsistent."""


class QueryError(OmniGraphError):
    """A query pipeline failed at evaluation time."""


class RenderError(OmniGraphError):
    """Template rendering failed (bad placeholder, missing attribute, query failure)."""


class NotFoundError(OmniGraphError):
    """A store lookup for a workspace or metamodel id found nothing."""


class ConflictError(OmniGraphError):
    """An optimistic save carried a stale version token."""

    def __init__(self, expected: int, stored: int):
        self.expected = expected
        self.stored = stored
        super().__init__(f"version conflict: save expected {expected}, store holds {stored}")
