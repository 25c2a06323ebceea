"""Chart regeneration for coexistence campaign CSV output."""

from .core import FigureSpec, SchemaError, collect_series, render, table_text

__all__ = ["FigureSpec", "SchemaError", "collect_series", "render",
           "table_text"]
