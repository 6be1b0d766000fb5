"""Preconditioned MINRES and the two-interval residual envelope."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bounds import EigenvalueBounds
from .errors import ParameterError, SpectralError, StructuralError
from .saddle_core import BlockSaddleSystem, SchurChain, apply_preconditioner, assemble_full

__all__ = ["SolveReport", "convergence_envelope", "equalize_widths", "minres", "minres_operator"]


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a MINRES solve.

    ``history[k]`` is the relative preconditioned residual after ``k``
    iterations (``history[0] == 1``). ``status`` is ``converged``, ``maxit``
    or ``breakdown`` (the Lanczos process produced a zero vector before the
    tolerance was met).
    """

    x: np.ndarray
    iterations: int
    history: np.ndarray
    converged: bool
    status: str
    wall_time: float

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "status": self.status,
            "final_relative_residual": float(self.history[-1]),
            "wall_time": self.wall_time,
        }


def minres_operator(matvec: Callable, b: np.ndarray, psolve: Callable | None = None,
                    tol: float = 1e-10, maxit: int = 1000) -> SolveReport:
    """MINRES for a symmetric operator with an SPD preconditioner.

    ``psolve(r)`` applies the inverse of the preconditioner. The residual is
    measured in the norm induced by that inverse, which is the quantity the
    method minimizes.
    """
    t0 = time.perf_counter()
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if psolve is None:
        psolve = lambda r: r  # noqa: E731
    x = np.zeros(n)
    r1 = b.copy()
    y = psolve(r1)
    beta1_sq = float(r1 @ y)
    if beta1_sq < 0:
        raise SpectralError("preconditioner is not positive definite")
    if beta1_sq == 0:
        return SolveReport(x, 0, np.array([0.0]), True, "converged", time.perf_counter() - t0)
    beta1 = np.sqrt(beta1_sq)

    eps = np.finfo(float).eps
    oldb, beta, dbar, epsln = 0.0, beta1, 0.0, 0.0
    phibar, cs, sn = beta1, -1.0, 0.0
    w = np.zeros(n)
    w2 = np.zeros(n)
    r2 = r1.copy()
    history = [1.0]
    status = "maxit"
    itn = 0
    while itn < maxit:
        itn += 1
        v = y / beta
        y = matvec(v)
        if itn >= 2:
            y = y - (beta / oldb) * r1
        alfa = float(v @ y)
        y = y - (alfa / beta) * r2
        r1, r2 = r2, y
        y = psolve(r2)
        oldb = beta
        beta_sq = float(r2 @ y)
        if beta_sq < 0:
            raise SpectralError("preconditioner is not positive definite")
        beta = np.sqrt(beta_sq)

        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(np.hypot(gbar, beta), eps)
        cs, sn = gbar / gamma, beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1, w2 = w2, w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w

        rel = phibar / beta1
        history.append(rel)
        if rel <= tol:
            status = "converged"
            break
        if beta <= eps * beta1:
            status = "breakdown"
            break
    return SolveReport(
        x, itn, np.array(history), status == "converged", status, time.perf_counter() - t0
    )


def minres(sys: BlockSaddleSystem, chain: SchurChain, b: np.ndarray,
           tol: float = 1e-10, maxit: int = 1000) -> SolveReport:
    """Solve the saddle-point system preconditioned by ``blkdiag(Ŝ_k)``."""
    b = np.asarray(b, dtype=float)
    if b.shape != (sys.total_dim,):
        raise StructuralError(f"right-hand side must have length {sys.total_dim}")
    A = assemble_full(sys)
    return minres_operator(lambda v: A @ v, b, lambda r: apply_preconditioner(chain, r), tol, maxit)


def equalize_widths(neg, pos) -> tuple[tuple[float, float], tuple[float, float]]:
    """Widen the narrower interval outward until both have the same width."""
    a, b = map(float, neg)
    c, d = map(float, pos)
    if not (a <= b < 0 < c <= d):
        raise ParameterError(f"need a <= b < 0 < c <= d, got {neg} and {pos}")
    wn, wp = b - a, d - c
    if wn > wp:
        d = c + wn
    elif wp > wn:
        a = b - wp
    return (a, b), (c, d)


def convergence_envelope(bounds, k: int) -> float:
    """Upper bound on ``||r_k|| / ||r_0||`` from a two-interval spectrum enclosure.

    ``bounds`` is an :class:`EigenvalueBounds` or a ``(neg_lb, neg_ub,
    pos_lb, pos_ub)`` tuple.
    """
    if isinstance(bounds, EigenvalueBounds):
        neg, pos = bounds.neg, bounds.pos
    else:
        a, b, c, d = bounds
        neg, pos = (a, b), (c, d)
    if k < 0:
        raise ParameterError("iteration index must be non-negative")
    (a, b), (c, d) = equalize_widths(neg, pos)
    outer = np.sqrt(abs(a * d))
    inner = np.sqrt(abs(b * c))
    rho = (outer - inner) / (outer + inner)
    return float(2.0 * rho ** (k // 2))
