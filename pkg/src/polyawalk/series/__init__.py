"""Truncated power-series algebra under exact, float, complex and interval coefficients."""
from .core import (
    Semantics,
    TruncatedSeries,
    coerce,
    eval_partial,
    linear_combine,
    multiply,
    prefix_sums,
    reciprocal,
    series_from_json,
    series_to_json,
    solve_first_return,
    solve_squared_factor,
    sqrt_set,
)
from .gaussian import GaussianRational
from .interval import Interval, e_interval, pi_interval

__all__ = [
    "GaussianRational",
    "Interval",
    "Semantics",
    "TruncatedSeries",
    "coerce",
    "e_interval",
    "eval_partial",
    "linear_combine",
    "multiply",
    "pi_interval",
    "prefix_sums",
    "reciprocal",
    "series_from_json",
    "series_to_json",
    "solve_first_return",
    "solve_squared_factor",
    "sqrt_set",
]
