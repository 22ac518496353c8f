"""Batch plotting for macrogame CSV outputs."""

from .render import RenderResult, render
from .specs import FigureSpec, SchemaError, default_specs

__all__ = ["FigureSpec", "RenderResult", "SchemaError", "default_specs", "render"]
