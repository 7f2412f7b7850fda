"""Numerical laboratory for the Krzyz coefficient problem."""

from .measure import (
    AtomicMeasure,
    Candidate,
    candidate_from_measure,
    conjectured_extremal,
    rotate_candidate,
)
from .series import ComplexSeries, exp_series, log_series

__all__ = [
    "AtomicMeasure",
    "Candidate",
    "ComplexSeries",
    "candidate_from_measure",
    "conjectured_extremal",
    "exp_series",
    "log_series",
    "rotate_candidate",
]
