"""HTTP facade: pydantic request/response models around the core library."""

from .app import create_app

__all__ = ["create_app"]
