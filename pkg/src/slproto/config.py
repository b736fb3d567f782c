"""Hyperparameter defaults and layered configuration.

Precedence when assembling a run: explicit flags > config file values >
the defaults below.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields

from .errors import DataError, UsageError

DEFAULT_K = 1
DEFAULT_EPSILON = 0.1
DEFAULT_ALGO = "recursive"
DEFAULT_BUDGET = 10_000_000
ALGOS = ("recursive", "brute")

# relative positions of the margin sample points inside each class
# interval, and the inward clamp (as a fraction of line length) that
# keeps samples strictly interior
SAMPLE_POSITIONS = (0.1, 0.3, 0.5, 0.7, 0.9)
CLAMP_DELTA = 1e-3

THREADS_ENV = "SLPROTO_THREADS"


@dataclass
class SlpConfig:
    k: int = DEFAULT_K
    epsilon: float = DEFAULT_EPSILON
    lines: int | None = None  # None means auto: n - 1
    algo: str = DEFAULT_ALGO
    budget: int = DEFAULT_BUDGET

    def validate(self) -> "SlpConfig":
        if self.k < 1:
            raise UsageError("k must be at least 1")
        if not self.epsilon > 0:
            raise UsageError("epsilon must be positive")
        if self.lines is not None and self.lines < 1:
            raise UsageError("line budget must be at least 1")
        if self.algo not in ALGOS:
            raise UsageError(f"unknown algorithm {self.algo!r}; choose from {ALGOS}")
        if self.budget < 1:
            raise UsageError("budget must be at least 1")
        return self

    def line_budget(self, n_classes: int) -> int:
        if self.lines is not None:
            return self.lines
        return max(1, n_classes - 1)

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "epsilon": self.epsilon,
            "lines": self.lines,
            "algo": self.algo,
            "budget": self.budget,
        }


def load_config_file(path: str) -> dict:
    """Read a JSON config file; unknown keys are rejected early."""
    try:
        with open(path, encoding="utf-8") as fh:
            values = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(values, dict):
        raise DataError(f"config file {path} must hold a JSON object")
    known = {f.name for f in fields(SlpConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return values


def build_config(file_values: dict | None = None, **overrides) -> SlpConfig:
    """Apply precedence: overrides (flags) > file values > defaults."""
    merged: dict = {}
    if file_values:
        merged.update(file_values)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    return SlpConfig(**merged).validate()


def thread_count() -> int:
    """Worker cap from the environment; defaults to sequential."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, value)
