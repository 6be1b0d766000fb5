"""Estimator-style wrappers so the pipeline composes with scikit-learn tooling.

``fit`` takes a :class:`BlockSaddleSystem` (or a ``(diag_blocks,
offdiag_blocks)`` pair) in place of a data matrix; fitted state ends in an
underscore and ``get_params``/``set_params``/``clone`` behave as usual.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .bounds import bounds_for, containment
from .indicators import IndicatorSet, compute_indicator_set
from .minres import minres
from .saddle_core import apply_preconditioner, build_inexact_chain
from .spectrum import preconditioned_spectrum
from .validation import check_indicator_set, check_rhs, check_system

__all__ = ["MinresSolver", "SchurPreconditioner", "SpectralBoundEstimator"]


class SchurPreconditioner(TransformerMixin, BaseEstimator):
    """Block-diagonal Schur-complement preconditioner.

    Parameters
    ----------
    strategies : str or list, default="exact"
        Approximation per level (see :class:`ApproxStrategy`), or one value
        for every level.

    Attributes
    ----------
    chain_ : SchurChain
    n_features_in_ : int
        Total dimension of the fitted system.
    """

    def __init__(self, strategies="exact"):
        self.strategies = strategies

    def fit(self, X, y=None):
        system = check_system(X)
        self.system_ = system
        self.chain_ = build_inexact_chain(system, self.strategies)
        self.n_features_in_ = system.total_dim
        return self

    def transform(self, X):
        """Apply the inverse preconditioner to every row of ``X``."""
        check_is_fitted(self, "chain_")
        X = check_array(X, ensure_2d=True)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return apply_preconditioner(self.chain_, X.T).T


class SpectralBoundEstimator(BaseEstimator):
    """Indicator intervals and eigenvalue bounds for a preconditioned system.

    ``fit`` also accepts an :class:`IndicatorSet` (or its dict form) and then
    skips the chain and indicator computation.

    Parameters
    ----------
    strategies : str or list, default="exact"
    method : {"auto", "linear", "bruteforce", "n2-closed", "n2-rect"}, default="auto"
    rtol : float, default=1e-8
        Relative slack allowed by :meth:`predict` and :meth:`score`.
    """

    def __init__(self, strategies="exact", method="auto", rtol=1e-8):
        self.strategies = strategies
        self.method = method
        self.rtol = rtol

    def fit(self, X, y=None):
        if isinstance(X, (IndicatorSet, dict)):
            self.indicators_ = check_indicator_set(X)
            self.system_ = None
            self.chain_ = None
        else:
            self.system_ = check_system(X)
            self.chain_ = build_inexact_chain(self.system_, self.strategies)
            self.indicators_ = compute_indicator_set(self.system_, self.chain_)
        self.bounds_ = bounds_for(self.indicators_, self.method)
        return self

    def predict(self, eigenvalues):
        """Boolean mask: which eigenvalues fall inside the fitted bounds."""
        check_is_fitted(self, "bounds_")
        return containment(self.bounds_, np.ravel(eigenvalues), self.rtol).inside

    def score(self, X=None, y=None):
        """Fraction of preconditioned eigenvalues of the fitted system inside the bounds."""
        check_is_fitted(self, "bounds_")
        if self.system_ is None:
            raise ValueError("score needs an estimator fitted on a system")
        spec = preconditioned_spectrum(self.system_, self.chain_)
        return float(np.mean(self.predict(spec.eigenvalues)))


class MinresSolver(BaseEstimator):
    """Preconditioned MINRES on a fitted system; ``predict(b)`` returns solutions.

    Attributes
    ----------
    reports_ : list of SolveReport
        One per right-hand side of the last :meth:`predict` call.
    """

    def __init__(self, strategies="exact", tol=1e-10, maxit=1000):
        self.strategies = strategies
        self.tol = tol
        self.maxit = maxit

    def fit(self, X, y=None):
        self.system_ = check_system(X)
        self.chain_ = build_inexact_chain(self.system_, self.strategies)
        self.n_features_in_ = self.system_.total_dim
        return self

    def predict(self, b):
        check_is_fitted(self, "chain_")
        rhs = check_rhs(b, self.n_features_in_)
        self.reports_ = [minres(self.system_, self.chain_, r, self.tol, self.maxit) for r in rhs]
        out = np.array([rep.x for rep in self.reports_])
        return out[0] if np.ndim(b) == 1 else out
