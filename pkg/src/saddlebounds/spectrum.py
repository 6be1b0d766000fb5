"""Exact spectrum of the preconditioned matrix at desk scale."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ParameterError, SpectralError, StructuralError, ZeroGapWarning
from .saddle_core import BlockSaddleSystem, SchurChain, assemble_full

__all__ = ["SpectrumReport", "extremal_eigs", "preconditioned_spectrum"]

MAX_DIM = 5000
ZERO_GAP_TOL = 1e-12


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    extremal: tuple
    zero_gap: float
    n_negative: int

    def to_dict(self) -> dict:
        return {
            "n": int(self.eigenvalues.size),
            "n_negative": self.n_negative,
            "extremal": list(self.extremal),
            "zero_gap": self.zero_gap,
            "eigenvalues": [float(x) for x in self.eigenvalues],
        }


def extremal_eigs(spectrum) -> tuple[float, float, float, float]:
    """(most negative, least negative, least positive, most positive)."""
    lam = spectrum.eigenvalues if isinstance(spectrum, SpectrumReport) else np.asarray(spectrum)
    neg, pos = lam[lam < 0], lam[lam > 0]
    if neg.size == 0 or pos.size == 0:
        raise SpectralError("spectrum is single-signed; the saddle-point matrix was mis-assembled")
    return float(neg.min()), float(neg.max()), float(pos.min()), float(pos.max())


def preconditioned_spectrum(sys: BlockSaddleSystem, chain: SchurChain) -> SpectrumReport:
    """Eigenvalues of the pencil (𝒜, 𝒫) via the Cholesky factors of 𝒫."""
    if sys.total_dim > MAX_DIM:
        raise ParameterError(f"total dimension {sys.total_dim} exceeds the dense limit {MAX_DIM}")
    if chain.dims != sys.dims:
        raise StructuralError("chain does not match system dimensions")
    L = sla.block_diag(*chain.factors)
    M = assemble_full(sys)
    X = sla.solve_triangular(L, M, lower=True)
    C = sla.solve_triangular(L, X.T, lower=True)
    lam = np.linalg.eigvalsh(0.5 * (C + C.T))
    lam.setflags(write=False)
    gap = float(np.min(np.abs(lam)))
    if gap < ZERO_GAP_TOL:
        warnings.warn(
            f"preconditioned matrix has an eigenvalue within {gap:.2e} of zero",
            ZeroGapWarning,
        )
    ext = extremal_eigs(lam)
    return SpectrumReport(lam, ext, gap, int(np.sum(lam < 0)))
