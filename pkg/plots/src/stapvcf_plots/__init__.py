"""Figure rendering for the stapvcf CSV result tables (read-only consumer)."""

from .figures import FigureSpec, RenderResult, render
from .schemas import FIGURE_KINDS, SchemaError

__version__ = "0.1.0"
