"""Exact q-series, Grunsky matrices, Fricke Lie algebra multiplicities and twisted denominator checks."""

from .exact import CycNumber, Rational, zeta
from .qseries import BiSeries, PSeries, format_series, parse_series

__version__ = "0.1.0"

__all__ = ["CycNumber", "Rational", "zeta", "PSeries", "BiSeries", "format_series", "parse_series"]
