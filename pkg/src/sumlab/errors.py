"""Error types shared across the package.

Two failure families map onto the CLI exit codes: bad inputs or parameters
(exit 1) and violated mathematical hypotheses discovered at runtime, such as
a failed pigeonhole scan (exit 2).
"""


class SumlabError(Exception):
    """Base class for all package errors."""


class InputError(SumlabError, ValueError):
    """Malformed input data or out-of-range parameters (CLI exit 1)."""


class HypothesisError(SumlabError, RuntimeError):
    """A mathematical hypothesis required by an operation fails (CLI exit 2)."""
