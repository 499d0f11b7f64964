"""Exception types shared across the library."""

from __future__ import annotations


class DimensionMismatch(ValueError):
    """Coefficient vector length does not match the spectral model."""


class RepeatedRootError(ValueError):
    """A modal quadratic has a double root; the model is rejected."""


class SpectrumError(ValueError):
    """Resolvent requested at (or too close to) an eigenvalue."""


class CoverageError(ValueError):
    """A trajectory does not cover the requested time window."""


class CertificationError(RuntimeError):
    """A hypothesis certificate failed; the operation refuses to run.

    Carries the certificate bundle so callers can report which
    hypothesis failed and by how much.
    """

    def __init__(self, message, certificates=()):
        super().__init__(message)
        self.certificates = tuple(certificates)


class InstabilityError(CertificationError):
    """Some modal root has nonnegative real part (no spectral gap)."""

    def __init__(self, message, worst_mode=None, max_real_part=None):
        super().__init__(message)
        self.worst_mode = worst_mode
        self.max_real_part = max_real_part


class ContractionError(CertificationError):
    """The measured contraction number q is >= 1; Picard refuses."""

    def __init__(self, message, q=None):
        super().__init__(message)
        self.q = q


class IterationError(RuntimeError):
    """Fixed-point iteration exhausted its budget before converging."""


class ConfigError(ValueError):
    """Malformed run configuration (usage error, CLI exit code 2)."""
