"""Exception types raised across the library."""

from __future__ import annotations


class MinkembedError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(MinkembedError, ValueError):
    """Operands live in different Minkowski spaces."""


class RankDeficientRows(MinkembedError, ValueError):
    """A pairing system was handed linearly dependent rows.

    ``row_index`` is the index of the first row that is a combination
    of the rows before it.
    """

    def __init__(self, row_index: int, message: str | None = None):
        self.row_index = row_index
        super().__init__(message or f"row {row_index} depends on earlier rows")


class AffineDependenceError(MinkembedError, ValueError):
    """A point set required to be affinely independent is not."""


class PlacementError(MinkembedError):
    """Vertex placement failed; carries the offending vertex id."""

    def __init__(self, vertex, message: str):
        self.vertex = vertex
        super().__init__(f"vertex {vertex!r}: {message}")


class GenericPointError(MinkembedError):
    """Retry budget exhausted while sampling a generic point."""

    def __init__(self, attempts: int, detail: str):
        self.attempts = attempts
        self.detail = detail
        super().__init__(f"no generic point after {attempts} attempts: {detail}")


class InvalidPolyhedron(MinkembedError, ValueError):
    """Input complex failed validation; carries the defect list."""

    def __init__(self, defects):
        self.defects = list(defects)
        lines = "; ".join(str(d) for d in self.defects)
        super().__init__(f"invalid polyhedron: {lines}")


class PreconditionError(MinkembedError):
    """A pipeline precondition failed; carries a witness when known."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class ConfigError(MinkembedError, ValueError):
    """Unusable configuration (bad dimension, infeasible spec, ...)."""
