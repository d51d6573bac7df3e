"""Service layer: pydantic schemas, operation handlers, FastAPI app."""

from .app import app, create_app

__all__ = ["app", "create_app"]
