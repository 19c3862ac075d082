"""Figure rendering for monitored quantum-walk search artifacts.

Consumes the CSV/JSON files written by the qwsearch CLI; never imports the
simulation package itself.
"""

__version__ = "0.1.0"

from .render import KINDS, FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render", "KINDS", "__version__"]
