"""Render figures from structured-sparsity experiment CSV files."""

from .render import FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render"]
__version__ = "0.1.0"
