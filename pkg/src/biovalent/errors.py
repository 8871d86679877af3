"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class BiovalentError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(BiovalentError, ValueError):
    """Array shapes or table indices do not line up."""


class InputError(BiovalentError, ValueError):
    """Input values are malformed (NaN, Inf, negative where forbidden, empty)."""


class DegenerateSectorError(BiovalentError, ValueError):
    """A sector with zero output carries flows or stressors, or a zero denominator."""

    def __init__(self, message: str, region: str | None = None, sector: str | None = None):
        super().__init__(message)
        self.region = region
        self.sector = sector


class ProductivityError(BiovalentError, ArithmeticError):
    """The Leontief system is singular or not productive."""


class UnitError(BiovalentError, ValueError):
    pass


class ConcordanceError(BiovalentError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class ParseError(BiovalentError, ValueError):
    """A file violates its schema. Carries the path, 1-based data row and column."""

    def __init__(self, message: str, path: str | None = None, row: int | None = None,
                 column: str | None = None):
        self.path = path
        self.row = row
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{': '.join([', '.join(where), message]) if where else message}")


class ConfigurationError(BiovalentError, ValueError):
    pass


class MappingError(BiovalentError, KeyError):
    def __init__(self, account_ids):
        self.account_ids = sorted(account_ids)
        super().__init__(f"unmapped accounts: {', '.join(self.account_ids)}")

    def __str__(self) -> str:
        return self.args[0]


class CoverageError(BiovalentError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class CategorizationError(BiovalentError, ValueError):
    pass


class DomainError(BiovalentError, ValueError):
    pass


class ScenarioError(BiovalentError, ValueError):
    pass


class SelectionError(BiovalentError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class StageError(BiovalentError):
    """Wraps a failure inside one pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
