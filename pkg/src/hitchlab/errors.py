"""Shared exception hierarchy.

Every module raises subclasses of :class:`LabError` for contract violations,
so callers (in particular the CLI) can distinguish bad input from genuine
numerical failure.
"""


class LabError(Exception):
    """Base class for all package errors."""


class ConfigError(LabError):
    """Invalid run configuration (CLI exit code 2)."""


class NumericalFailure(LabError):
    """A numerical procedure failed to meet its contract (CLI exit code 3)."""
