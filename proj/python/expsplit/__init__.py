"""Exponential operator splitting for 2-D parabolic problems."""

from ._core import (
    Error,
    fit_order,
    integrate,
    phi,
    problem_labels,
    reference,
    run_study,
    verify,
)

__all__ = [
    "Error",
    "fit_order",
    "integrate",
    "phi",
    "problem_labels",
    "reference",
    "run_study",
    "verify",
]
