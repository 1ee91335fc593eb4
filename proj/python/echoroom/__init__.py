"""Room and trajectory reconstruction from first-order echoes."""

from ._core import (
    EchoroomError,
    complete,
    echo_matrix,
    feasibility,
    parallelogram_pair,
    score,
    singular_values,
    solve,
)

__all__ = [
    "EchoroomError",
    "complete",
    "echo_matrix",
    "feasibility",
    "parallelogram_pair",
    "score",
    "singular_values",
    "solve",
]
