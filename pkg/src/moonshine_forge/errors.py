"""Exception hierarchy shared by every module."""

from __future__ import annotations


class MoonshineError(Exception):
    """Base class; every error carries a short machine-readable ``reason``."""

    reason = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class ModulusError(MoonshineError, ValueError):
    reason = "modulus"


class ModulusCapError(MoonshineError):
    reason = "modulus-cap"


class TruncationError(MoonshineError):
    """A coefficient beyond the known truncation order was requested."""

    reason = "truncation"


class SeriesDomainError(MoonshineError, ValueError):
    """Precondition on a series operation failed (order, invertibility, shape)."""

    reason = "domain"


class NormalizationError(SeriesDomainError):
    reason = "normalization"


class CatalogError(MoonshineError):
    reason = "catalog"


class CatalogSyntaxError(CatalogError):
    reason = "catalog-syntax"


class UnknownNameError(CatalogError, KeyError):
    reason = "unknown-name"

    def __str__(self):
        return self.args[0]


class CycleError(CatalogError):
    reason = "cycle"


class NonIntegralityError(MoonshineError):
    reason = "non-integral"


class NegativityError(MoonshineError):
    reason = "negative"


class UnderDeterminedError(MoonshineError):
    reason = "under-determined"


class InconsistentError(MoonshineError):
    reason = "inconsistent"


class MissingSlotError(MoonshineError, KeyError):
    reason = "missing-slot"

    def __str__(self):
        return self.args[0]


class FamilyError(MoonshineError):
    reason = "family"
