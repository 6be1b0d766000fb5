"""Spectral indicator intervals of a system preconditioned by a Schur chain.

For each level the E-interval holds the extreme eigenvalues of the pencil
``(A_k, Ŝ_k)`` and the R-interval those of ``(B_k Ŝ_{k-1}^{-1} B_k^T, Ŝ_k)``.
Pencils are reduced to standard symmetric problems with the Cholesky factor
of the right-hand matrix, so no matrix square root is ever formed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ParameterError, RankDeficiencyError, SpectralError, StructuralError
from .saddle_core import BlockSaddleSystem, SchurChain

__all__ = [
    "IndicatorSet",
    "compute_E_interval",
    "compute_R_interval",
    "compute_indicator_set",
    "pencil_eigvalsh",
    "sbar_identity_residual",
]

RANK_TOL = 1e-10


def pencil_eigvalsh(M: np.ndarray, chol_lower: np.ndarray) -> np.ndarray:
    """Eigenvalues of the pencil (M, L L^T), ascending."""
    X = sla.solve_triangular(chol_lower, M, lower=True)
    C = sla.solve_triangular(chol_lower, X.T, lower=True)
    return np.linalg.eigvalsh(0.5 * (C + C.T))


def _check_level(chain: SchurChain, k: int, lo: int = 0) -> None:
    if not lo <= k <= chain.N:
        raise ParameterError(f"level {k} outside [{lo}, {chain.N}]")


def compute_E_interval(sys: BlockSaddleSystem, chain: SchurChain, k: int) -> tuple[float, float]:
    """Extreme eigenvalues of ``Ŝ_k^{-1/2} A_k Ŝ_k^{-1/2}``."""
    _check_level(chain, k)
    lam = pencil_eigvalsh(np.asarray(sys.diag_blocks[k]), chain.factors[k])
    lo, hi = float(lam[0]), float(lam[-1])
    if k > 0:
        # A_k is semi-definite; negative values are rounding noise
        lo, hi = max(lo, 0.0), max(hi, 0.0)
    return lo, hi


def compute_R_interval(sys: BlockSaddleSystem, chain: SchurChain, k: int) -> tuple[float, float]:
    """Extreme eigenvalues of ``R_k R_k^T`` (or ``R_k^T R_k`` for a growing last block)."""
    _check_level(chain, k, lo=1)
    B = np.asarray(sys.offdiag_blocks[k - 1])
    if B.shape[0] <= B.shape[1]:
        M = B @ chain.solve(k - 1, B.T)
        lam = pencil_eigvalsh(0.5 * (M + M.T), chain.factors[k])
    else:
        if not (sys.rect_tail and k == sys.N):
            raise StructuralError(
                f"B_{k} is taller than wide; only the last block of a "
                f"rectangular-tail system may grow"
            )
        M = B.T @ chain.solve(k, B)
        lam = pencil_eigvalsh(0.5 * (M + M.T), chain.factors[k - 1])
    lo, hi = float(lam[0]), float(lam[-1])
    if not lo > RANK_TOL * hi:
        raise RankDeficiencyError(
            f"R-indicator of level {k} has smallest eigenvalue {lo:.3e} "
            f"(B_{k} rank deficient)"
        )
    return lo, hi


def sbar_identity_residual(sys: BlockSaddleSystem, chain: SchurChain, k: int) -> float:
    """Relative mismatch ``||B_k Ŝ_{k-1}^{-1} B_k^T + A_k - S~_k|| / ||S~_k||``.

    Zero up to rounding for any consistently built chain.
    """
    _check_level(chain, k, lo=1)
    B = np.asarray(sys.offdiag_blocks[k - 1])
    Shat_prev = np.asarray(chain.approx_S[k - 1])
    recomputed = B @ np.linalg.solve(Shat_prev, B.T) + sys.diag_blocks[k]
    target = np.asarray(chain.perturbed_S[k])
    return float(np.linalg.norm(recomputed - target) / np.linalg.norm(target))


@dataclass(frozen=True)
class IndicatorSet:
    """Indicator intervals; ``alphaR[j]``/``betaR[j]`` refer to level ``j + 1``."""

    alphaE: tuple
    betaE: tuple
    alphaR: tuple
    betaR: tuple
    rect_tail: bool = False

    def __init__(self, alphaE, betaE, alphaR, betaR, rect_tail: bool = False):
        for name, val in (("alphaE", alphaE), ("betaE", betaE),
                          ("alphaR", alphaR), ("betaR", betaR)):
            object.__setattr__(self, name, tuple(float(x) for x in np.atleast_1d(val)))
        object.__setattr__(self, "rect_tail", bool(rect_tail))
        if len(self.alphaE) != len(self.betaE) or len(self.alphaR) != len(self.betaR):
            raise ParameterError("alpha and beta arrays must have equal length")
        if len(self.alphaR) != len(self.alphaE) - 1 or not self.alphaR:
            raise ParameterError(
                "need N+1 E-intervals and N >= 1 R-intervals"
            )

    @property
    def N(self) -> int:
        return len(self.alphaR)

    def problems(self) -> list[str]:
        """Violated invariants, empty when the set is admissible."""
        out = []
        if not self.alphaE[0] > 0:
            out.append("alphaE[0] must be positive")
        for k, (a, b) in enumerate(zip(self.alphaE, self.betaE)):
            if a < 0:
                out.append(f"alphaE[{k}] must be non-negative")
            if a > b:
                out.append(f"alphaE[{k}] > betaE[{k}]")
        for k, (a, b) in enumerate(zip(self.alphaR, self.betaR), start=1):
            if not a > 0:
                out.append(f"alphaR level {k} must be positive")
            if a > b:
                out.append(f"alphaR level {k} > betaR level {k}")
        if not all(np.isfinite(self.alphaE + self.betaE + self.alphaR + self.betaR)):
            out.append("non-finite indicator value")
        return out

    def validate(self) -> "IndicatorSet":
        bad = self.problems()
        if bad:
            raise ParameterError("invalid indicator set: " + "; ".join(bad))
        return self

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "alphaE": list(self.alphaE),
            "betaE": list(self.betaE),
            "alphaR": list(self.alphaR),
            "betaR": list(self.betaR),
            "rect_tail": self.rect_tail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IndicatorSet":
        try:
            ind = cls(d["alphaE"], d["betaE"], d["alphaR"], d["betaR"],
                      d.get("rect_tail", False))
        except KeyError as exc:
            raise ParameterError(f"indicator document lacks field {exc.args[0]!r}") from exc
        if "N" in d and int(d["N"]) != ind.N:
            raise ParameterError(f"declared N={d['N']} but arrays imply N={ind.N}")
        return ind

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def table(self, digits: int = 4) -> str:
        """One ``I_Ek [lo, hi]`` / ``I_Rk [lo, hi]`` row per interval."""
        rows = [(f"I_E{k}", a, b) for k, (a, b) in enumerate(zip(self.alphaE, self.betaE))]
        rows += [(f"I_R{k}", a, b) for k, (a, b) in enumerate(zip(self.alphaR, self.betaR), start=1)]
        return "\n".join(f"{name:<5} [{a:.{digits}g}, {b:.{digits}g}]" for name, a, b in rows) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "IndicatorSet":
        return cls.from_dict(json.loads(text))


def compute_indicator_set(sys: BlockSaddleSystem, chain: SchurChain) -> IndicatorSet:
    if chain.dims != sys.dims:
        raise StructuralError("chain does not match system dimensions")
    E = [compute_E_interval(sys, chain, k) for k in range(sys.N + 1)]
    R = [compute_R_interval(sys, chain, k) for k in range(1, sys.N + 1)]
    if not E[0][0] > 0:
        raise SpectralError("E-indicator of level 0 is not positive")
    return IndicatorSet(
        alphaE=[e[0] for e in E],
        betaE=[e[1] for e in E],
        alphaR=[r[0] for r in R],
        betaR=[r[1] for r in R],
        rect_tail=sys.rect_tail,
    )
