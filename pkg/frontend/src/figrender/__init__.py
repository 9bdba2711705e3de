"""Figure rendering for geomopt experiment CSVs."""

from .render import FigureSpec, RenderResult, SchemaError, render

__version__ = "0.1.0"
