"""FastAPI service over the core fitting and evaluation package."""

from .app import create_app

__all__ = ["create_app"]
