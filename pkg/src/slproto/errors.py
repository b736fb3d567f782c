"""Error taxonomy shared by the library, service, and CLI.

Every failure raised on purpose carries a category that maps to a
process exit code and to the machine-readable error payload emitted on
stderr / in HTTP error bodies.
"""

from __future__ import annotations

EXIT_CODES = {
    "usage": 2,
    "data": 3,
    "solver": 4,
    "internal": 5,
}


class SlprotoError(Exception):
    """Base class for all deliberate failures."""

    category = "internal"

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.category]

    def payload(self) -> dict:
        """Machine-readable form, printed to stderr by the CLI."""
        return {
            "error": {
                "category": self.category,
                "message": self.message,
                "detail": self.detail,
            }
        }


class UsageError(SlprotoError):
    """Caller violated a precondition (bad flag value, bad argument)."""

    category = "usage"


class DataError(SlprotoError):
    """Input files or datasets are malformed or insufficient."""

    category = "data"


class SolverError(SlprotoError):
    """Fitting could not proceed (geometry, budget, or LP trouble)."""

    category = "solver"


class InternalError(SlprotoError):
    """A supposed impossibility happened; always a bug."""

    category = "internal"


class DegenerateGeometryError(SolverError):
    """All points coincide, or an input is too degenerate to fit."""


class BudgetExceededError(SolverError):
    """Exhaustive line search would exceed its evaluation budget."""


class IllConditionedError(SolverError):
    """Simplex pivot fell below the numerical safety threshold."""


class PrototypeGenerationError(SolverError):
    """The per-line label optimization failed; caller may fall back."""


def error_from_payload(body: dict) -> SlprotoError:
    """Rebuild a typed error from its payload (used by the CLI client)."""
    err = body.get("error", {})
    category = err.get("category", "internal")
    message = err.get("message", "unknown error")
    detail = err.get("detail") or {}
    cls = {
        "usage": UsageError,
        "data": DataError,
        "solver": SolverError,
        "internal": InternalError,
    }.get(category, InternalError)
    return cls(message, detail)
