"""Exception taxonomy shared by all polyhardy modules."""

from __future__ import annotations


class PolyhardyError(Exception):
    """Base class for all errors raised by this package."""


class SizingError(PolyhardyError):
    """A requested matrix or tensor dimension exceeds a configured cap."""


class TruncationError(PolyhardyError):
    """Truncation degree too small for the requested accuracy."""


class ContractError(PolyhardyError):
    """A documented pre- or postcondition was violated."""


class RankDeficiencyError(ContractError):
    """Columns expected to be independent are numerically dependent."""

    def __init__(self, message: str, detected_rank: int):
        super().__init__(message)
        self.detected_rank = detected_rank


class NumericError(PolyhardyError):
    """A numerical backend routine failed (e.g. SVD non-convergence)."""


class AnalysisFailure(PolyhardyError):
    """A numeric assertion inside an analysis failed; carries diagnostics."""

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


class ScenarioError(PolyhardyError):
    """A scenario file or scenario description is invalid."""
