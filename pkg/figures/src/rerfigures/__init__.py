"""Panel figure rendering for rercens grid.csv outputs."""

__version__ = "0.1.0"

from .spec import FigureSpec, SchemaError, load_spec
from .render import render
