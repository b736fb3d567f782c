"""Soft-label prototype fitting and classification for few-shot data."""

__version__ = "0.1.0"
