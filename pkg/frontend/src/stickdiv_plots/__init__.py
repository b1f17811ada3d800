"""Figure rendering for stickdiv CSV output."""

from .render import FIGURE_KINDS, SchemaError, build_figure, render

__version__ = "0.1.0"
