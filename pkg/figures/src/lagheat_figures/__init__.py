"""Figure rendering for lagheat CSV output.

This package only reads CSV files produced by the numerical component; it
never recomputes anything, so the numerical truth stays in one place.
"""

__version__ = "0.1.0"

from .render import FigureSpec, SchemaMismatchError, read_csv, render  # noqa: F401
