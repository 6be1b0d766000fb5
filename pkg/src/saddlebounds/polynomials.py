"""Parametric three-term polynomial sequence and its roots.

    U_0 = 1
    U_1 = λ - γE[0]
    U_{k+1} = (λ + (-1)^{k+1} γE[k]) U_k - γR[k] U_{k-1}

``γR[k]`` here is the coupling parameter of level ``k`` (levels are 1-based,
so it lives at ``gamma_R[k - 1]`` in the arrays). ``U_k`` is the
characteristic polynomial of a k×k symmetric tridiagonal matrix with
diagonal ``(-1)^j γE[j]`` and off-diagonals ``sqrt(γR)``; roots are computed
as its eigenvalues by Sturm-sequence bisection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotARootError, NumericalFailure, ParameterError

__all__ = [
    "GammaAssignment",
    "RootSet",
    "eval_U",
    "eval_U_sequence",
    "partial_derivative_U",
    "root_sensitivity_sign",
    "roots_U",
    "sturm_count",
    "tridiagonal_eigvalsh",
    "tridiagonal_realization",
    "wronskian_a",
]

BISECTION_TOL = 1e-13
ROOT_ACCEPT_TOL = 1e-8


@dataclass(frozen=True)
class GammaAssignment:
    """One concrete choice of the E- and R-parameters.

    ``gammaE`` has one entry per level ``0..N``; ``gammaR`` one per coupling
    ``1..N``.
    """

    gammaE: tuple
    gammaR: tuple

    def __init__(self, gammaE, gammaR=()):
        gE = tuple(float(x) for x in np.atleast_1d(np.asarray(gammaE, dtype=float)))
        gR = tuple(float(x) for x in np.atleast_1d(np.asarray(gammaR, dtype=float)))
        if not gE:
            raise ParameterError("gammaE must not be empty")
        if len(gR) != len(gE) - 1:
            raise ParameterError(
                f"gammaR must have one entry fewer than gammaE "
                f"({len(gE)} E-parameters, {len(gR)} R-parameters)"
            )
        object.__setattr__(self, "gammaE", gE)
        object.__setattr__(self, "gammaR", gR)

    @property
    def N(self) -> int:
        return len(self.gammaE) - 1

    def truncated(self, degree: int) -> "GammaAssignment":
        """Parameters that ``U_degree`` actually depends on."""
        return GammaAssignment(self.gammaE[:degree], self.gammaR[:degree - 1])

    def as_tuple(self) -> tuple:
        """Interleaved (γE0, γE1, γR1, γE2, γR2, ...) ordering."""
        out = [self.gammaE[0]]
        for j in range(1, len(self.gammaE)):
            out += [self.gammaE[j], self.gammaR[j - 1]]
        return tuple(out)


def _check_degree(k: int, gamma: GammaAssignment) -> None:
    if k < 0:
        raise ParameterError(f"degree must be non-negative, got {k}")
    if k > len(gamma.gammaE) or k - 1 > len(gamma.gammaR):
        raise ParameterError(
            f"degree {k} needs {k} E-parameters and {k - 1} R-parameters"
        )


def eval_U_sequence(k: int, lam, gamma: GammaAssignment) -> np.ndarray:
    """Values ``U_0(λ), ..., U_k(λ)`` stacked along the first axis."""
    _check_degree(k, gamma)
    lam = np.asarray(lam, dtype=float)
    out = np.empty((k + 1,) + lam.shape)
    out[0] = 1.0
    if k >= 1:
        out[1] = lam - gamma.gammaE[0]
    for j in range(1, k):
        out[j + 1] = (lam + (-1) ** (j + 1) * gamma.gammaE[j]) * out[j] - gamma.gammaR[j - 1] * out[j - 1]
    return out


def eval_U(k: int, lam, gamma: GammaAssignment):
    """Evaluate ``U_k`` at ``lam`` (scalar or array)."""
    val = eval_U_sequence(k, lam, gamma)[k]
    return float(val) if np.ndim(val) == 0 else val


def _eval_with_derivative(k: int, lam, gamma: GammaAssignment):
    """(U_j, U_j') for j = 0..k via the differentiated recurrence."""
    _check_degree(k, gamma)
    lam = np.asarray(lam, dtype=float)
    U = np.empty((k + 1,) + lam.shape)
    D = np.zeros_like(U)
    U[0] = 1.0
    if k >= 1:
        U[1] = lam - gamma.gammaE[0]
        D[1] = 1.0
    for j in range(1, k):
        shift = lam + (-1) ** (j + 1) * gamma.gammaE[j]
        gr = gamma.gammaR[j - 1]
        U[j + 1] = shift * U[j] - gr * U[j - 1]
        D[j + 1] = U[j] + shift * D[j] - gr * D[j - 1]
    return U, D


def tridiagonal_realization(k: int, gamma: GammaAssignment) -> np.ndarray:
    """Symmetric tridiagonal matrix whose characteristic polynomial is ``U_k``."""
    if k < 1:
        raise ParameterError("tridiagonal realization needs k >= 1")
    _check_degree(k, gamma)
    gR = np.asarray(gamma.gammaR[:k - 1], dtype=float)
    if np.any(gR <= 0):
        raise ParameterError("gammaR entries must be positive")
    d = np.array([(-1) ** j * gamma.gammaE[j] for j in range(k)])
    T = np.diag(d)
    off = np.sqrt(gR)
    T[np.arange(k - 1), np.arange(1, k)] = off
    T[np.arange(1, k), np.arange(k - 1)] = off
    return T


def sturm_count(diag: np.ndarray, off_sq: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below ``x``.

    ``diag`` has shape (..., k), ``off_sq`` (..., k-1) holds the squared
    off-diagonals, and ``x`` broadcasts against ``diag[..., :1]``-shaped
    leading axes with an arbitrary trailing axis of shifts.
    """
    k = diag.shape[-1]
    scale = 1.0 + (np.max(np.abs(off_sq)) if off_sq.size else 0.0)
    pivmin = np.finfo(float).tiny * scale
    q = diag[..., 0:1] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, k):
        q = diag[..., i:i + 1] - x - off_sq[..., i - 1:i] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def tridiagonal_eigvalsh(diag, off_sq, tol: float = BISECTION_TOL) -> np.ndarray:
    """All eigenvalues of (batched) symmetric tridiagonal matrices, ascending.

    Bisection on Sturm counts inside Gershgorin brackets; every eigenvalue is
    bracketed to width ``tol`` (or a few ulps at large magnitude).
    """
    diag = np.asarray(diag, dtype=float)
    off_sq = np.asarray(off_sq, dtype=float)
    k = diag.shape[-1]
    e = np.sqrt(off_sq)
    radius = np.zeros_like(diag)
    if k > 1:
        radius[..., :-1] += e
        radius[..., 1:] += e
    lo = np.min(diag - radius, axis=-1, keepdims=True)
    hi = np.max(diag + radius, axis=-1, keepdims=True)
    width = float(np.max(hi - lo)) if diag.size else 0.0
    lo = lo - 1e-12 * (1 + np.abs(lo))
    hi = hi + 1e-12 * (1 + np.abs(hi))
    target = np.arange(k)
    a = np.broadcast_to(lo, diag.shape).copy()
    b = np.broadcast_to(hi, diag.shape).copy()
    mag = max(float(np.max(np.abs(np.concatenate([lo, hi], axis=-1)))), 1.0) if diag.size else 1.0
    eff_tol = max(tol, 4 * np.finfo(float).eps * mag)
    n_iter = int(np.ceil(np.log2(max(width + 2e-12 * mag, eff_tol) / eff_tol))) + 2
    for _ in range(min(n_iter, 200)):
        mid = 0.5 * (a + b)
        above = sturm_count(diag, off_sq, mid) > target
        b = np.where(above, mid, b)
        a = np.where(above, a, mid)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class RootSet:
    degree: int
    roots: np.ndarray
    neg_count: int
    pos_count: int

    @property
    def largest_negative(self) -> float:
        neg = self.roots[self.roots < 0]
        return float(neg[-1]) if neg.size else float("nan")

    @property
    def smallest_positive(self) -> float:
        pos = self.roots[self.roots > 0]
        return float(pos[0]) if pos.size else float("nan")

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "roots": [float(r) for r in self.roots],
            "neg_count": self.neg_count,
            "pos_count": self.pos_count,
        }


def _newton_polish(k: int, roots: np.ndarray, gamma: GammaAssignment, steps: int = 2) -> np.ndarray:
    """A couple of Newton steps on the recurrence, kept only where |U| drops.

    Bisection leaves each root within ``BISECTION_TOL``; steps longer than a
    few times that are rejected so a root can never jump to a neighbour.
    """
    x = roots.copy()
    for _ in range(steps):
        U, D = _eval_with_derivative(k, x, gamma)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = U[k] / D[k]
        cand = x - step
        ok = np.isfinite(step) & (np.abs(step) <= 10 * BISECTION_TOL * np.maximum(1.0, np.abs(x)))
        better = np.abs(eval_U_sequence(k, cand, gamma)[k]) < np.abs(U[k])
        x = np.where(ok & better, cand, x)
    return np.sort(x)


def roots_U(k: int, gamma: GammaAssignment) -> RootSet:
    """All ``k`` real roots of ``U_k``, ascending."""
    if k < 1:
        raise ParameterError("roots_U needs k >= 1")
    _check_degree(k, gamma)
    gR = np.asarray(gamma.gammaR[:k - 1], dtype=float)
    if np.any(gR <= 0):
        raise ParameterError(
            "gammaR entries must be strictly positive for distinct real roots"
        )
    d = np.array([(-1) ** j * gamma.gammaE[j] for j in range(k)])
    r = _newton_polish(k, tridiagonal_eigvalsh(d, gR), gamma)
    r.setflags(write=False)
    return RootSet(k, r, int(np.sum(r < 0)), int(np.sum(r > 0)))


def _gamma_R_product(gamma: GammaAssignment, m: int, k: int) -> float:
    # γR^(i) for i = m+1..k
    return float(np.prod(gamma.gammaR[m:k])) if k > m else 1.0


def _require_root(k_plus_1: int, xi: float, gamma: GammaAssignment) -> None:
    val = eval_U(k_plus_1, xi, gamma)
    if abs(val) > ROOT_ACCEPT_TOL * max(1.0, abs(xi) ** k_plus_1):
        raise NotARootError(
            f"{xi!r} is not a root of U_{k_plus_1} (value {val:.3e})"
        )


def partial_derivative_U(k_plus_1: int, m: int, which: str, xi: float,
                         gamma: GammaAssignment) -> float:
    """Closed-form ``∂U_{k+1}/∂γ^{(m)}`` at a root ``xi`` of ``U_{k+1}``.

    ``which='E'`` differentiates with respect to ``γE[m]`` (``0 <= m <= k``),
    ``which='R'`` with respect to the level-m coupling (``1 <= m <= k``).
    """
    k = k_plus_1 - 1
    which = which.upper()
    if which not in ("E", "R"):
        raise ParameterError("which must be 'E' or 'R'")
    lo = 0 if which == "E" else 1
    if not lo <= m <= k:
        raise ParameterError(f"m must lie in [{lo}, {k}] for U_{k_plus_1}, got {m}")
    _require_root(k_plus_1, xi, gamma)
    U = eval_U_sequence(k, xi, gamma)
    if U[k] == 0.0:
        raise NumericalFailure(f"U_{k} vanishes at a root of U_{k_plus_1}")
    prod = _gamma_R_product(gamma, m, k)
    if which == "E":
        return float((-1) ** (m + 1) * U[m] ** 2 / U[k] * prod)
    return float(-U[m] * U[m - 1] / U[k] * prod)


def root_sensitivity_sign(k_plus_1: int, m: int, which: str, root_index: int,
                          gamma: GammaAssignment) -> int:
    """Sign of the derivative of the ``root_index``-th root of ``U_{k+1}``
    with respect to the chosen parameter, from the implicit function theorem.
    """
    rs = roots_U(k_plus_1, gamma)
    xi = float(rs.roots[root_index])
    dU_dgamma = partial_derivative_U(k_plus_1, m, which, xi, gamma)
    _, D = _eval_with_derivative(k_plus_1, xi, gamma)
    dU_dlam = float(D[k_plus_1])
    if dU_dlam == 0.0:
        raise NumericalFailure("repeated root encountered")
    return int(-np.sign(dU_dgamma) * np.sign(dU_dlam))


def wronskian_a(k_plus_1: int, lam, gamma: GammaAssignment):
    """``U_k U'_{k+1} - U'_k U_{k+1}``; strictly positive for admissible γ."""
    k = k_plus_1 - 1
    if k < 0:
        raise ParameterError("wronskian_a needs k+1 >= 1")
    U, D = _eval_with_derivative(k_plus_1, lam, gamma)
    val = U[k] * D[k + 1] - D[k] * U[k + 1]
    return float(val) if np.ndim(val) == 0 else val
