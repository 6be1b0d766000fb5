"""Input coercion helpers used by the estimator classes."""
from __future__ import annotations

import numpy as np

from .errors import ParameterError, StructuralError
from .indicators import IndicatorSet
from .saddle_core import BlockSaddleSystem, validate_system

__all__ = ["check_indicator_set", "check_rhs", "check_system"]


def check_system(X, *, validate: bool = True) -> BlockSaddleSystem:
    """Accept a :class:`BlockSaddleSystem` or a ``(diag_blocks, offdiag_blocks)`` pair."""
    if isinstance(X, BlockSaddleSystem):
        sys = X
    elif isinstance(X, (tuple, list)) and len(X) == 2:
        sys = BlockSaddleSystem(X[0], X[1])
    else:
        raise StructuralError(
            f"expected a BlockSaddleSystem or (diag_blocks, offdiag_blocks), got {type(X).__name__}"
        )
    if validate:
        report = validate_system(sys)
        if not report.passed:
            raise ParameterError("system fails validation:\n" + report.summary())
    return sys


def check_indicator_set(X) -> IndicatorSet:
    if isinstance(X, IndicatorSet):
        return X.validate()
    if isinstance(X, dict):
        return IndicatorSet.from_dict(X).validate()
    raise ParameterError(f"expected an IndicatorSet or dict, got {type(X).__name__}")


def check_rhs(b, n: int) -> np.ndarray:
    """Right-hand sides as a 2-D float array of shape (n_rhs, n)."""
    b = np.asarray(b, dtype=float)
    if b.ndim == 1:
        b = b[None, :]
    if b.ndim != 2 or b.shape[1] != n:
        raise StructuralError(f"right-hand sides must have {n} entries, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ParameterError("right-hand side contains non-finite values")
    return b
