"""Figure rendering for ntnsim result directories."""

from .figures import KINDS, METRICS, FigureSpec, build_figure, render
from .io import (
    MalformedInputError,
    MissingInputError,
    PlotkitError,
    ResultBundle,
    load_results,
)

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "METRICS",
    "FigureSpec",
    "MalformedInputError",
    "MissingInputError",
    "PlotkitError",
    "ResultBundle",
    "build_figure",
    "load_results",
    "render",
]
