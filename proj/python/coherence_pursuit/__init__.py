"""Coherence Pursuit: robust subspace recovery by coherence ranking."""

from ._core import (
    NumericalError,
    check_condition,
    clustering_error,
    coherence,
    cop,
    generate,
    normalize_columns,
    recovery_error,
    saliency,
    spca,
    t_delta,
    tail_f,
)

__all__ = [
    "NumericalError",
    "check_condition",
    "clustering_error",
    "coherence",
    "cop",
    "generate",
    "normalize_columns",
    "recovery_error",
    "saliency",
    "spca",
    "t_delta",
    "tail_f",
]
