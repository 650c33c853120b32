"""Exception types shared across the pipeline."""

from __future__ import annotations


class PrecisError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PrecisError):
    """Input text violates a grammar; carries the character position."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            super().__init__(f"{message} (at position {position})")
        else:
            super().__init__(message)
        self.position = position


class EmptyInputError(ParseError):
    """Query text is blank after stripping whitespace and comments."""


class AllStatementsFailedError(PrecisError):
    """Every statement of a log failed to parse."""


class UnknownKindError(PrecisError):
    """A tree path names a node kind outside the fixed vocabulary."""

    def __init__(self, kind: str):
        super().__init__(f"unknown node kind {kind!r}")
        self.kind = kind


class UndeclaredVariableError(PrecisError):
    """A predicate references a variable with no FROM binding."""

    def __init__(self, var: str):
        super().__init__(f"variable {var!r} is not declared in the FROM clause")
        self.var = var


class DuplicateLabelError(PrecisError):
    """Two statements in one library share a MATCH label."""

    def __init__(self, label: str):
        super().__init__(f"duplicate statement label {label!r}")
        self.label = label


class TypeMismatchError(PrecisError):
    """A predicate compares a value-set term with an integer term."""


class InconsistentDomainError(PrecisError):
    """A numeric widget's observed values do not all parse as numbers."""


class SchemaError(PrecisError):
    """A JSON document does not match the expected schema."""

    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{message} (at {location})")
        self.location = location
