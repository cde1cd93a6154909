"""
errors.py

Exception hierarchy for LempertKit.

Every failure the library raises on purpose derives from `LempertError`, so
callers (the CLI in particular) can separate input and domain problems from
genuine bugs. Solver non-convergence is not an exception: it is reported on
the returned `GeodesicResult`.
"""


class LempertError(Exception):
    """Base class for all LempertKit errors."""


class DomainError(LempertError):
    """A point lies outside the domain, disc or half-plane it must belong to."""


class NumericalFailure(LempertError):
    """An iteration failed to converge or a value overflowed."""


class AmbiguityError(LempertError):
    """The nearest boundary point is not unique."""


class PreconditionError(LempertError):
    """An operation was called outside its documented preconditions."""


class DegenerateInputError(LempertError):
    """Coincident points, constant discs or vanishing tangential parts."""


class UnsupportedDomainError(LempertError):
    """The requested oracle does not exist for this domain variant."""


class SeedFailure(LempertError):
    """The affine seed disc could not be fitted inside the validity region."""


class CampaignFailure(LempertError):
    """Too many samples of a campaign failed to solve."""


class AuditFailure(LempertError):
    """Convexity or Levi positivity failed at a witness point."""

    def __init__(self, message: str, witness=None, value: float = float("nan")):
        super().__init__(message)
        self.witness = witness
        self.value = value


class UsageError(LempertError):
    """Malformed command-line arguments or literals."""
