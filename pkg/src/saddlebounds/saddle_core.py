"""Block-tridiagonal multiple saddle-point systems and their Schur-complement
preconditioners.

The system matrix has diagonal blocks ``(-1)**k * A[k]`` and sub-diagonal
blocks ``B[k]`` (``B[k]`` maps level ``k-1`` to level ``k``)::

    [ A0   B1^T              ]
    [ B1  -A1   B2^T         ]
    [      B2    A2   ...    ]
    [            ...  ±AN    ]

A :class:`SchurChain` holds the exact complements ``S_k``, the perturbed
complements ``S~_k = A_k + B_k Ŝ_{k-1}^{-1} B_k^T`` built from the previous
approximation, and the approximations ``Ŝ_k`` themselves, each factored once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import (
    ParameterError,
    SingularApproximationError,
    SpectralError,
    StructuralError,
)

__all__ = [
    "ApproxStrategy",
    "BlockSaddleSystem",
    "CheckResult",
    "SchurChain",
    "ValidationReport",
    "apply_preconditioner",
    "assemble_full",
    "build_exact_schur_chain",
    "build_inexact_chain",
    "validate_system",
]

DEFINITENESS_TOL = 1e-10
RANK_TOL = 1e-10


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BlockSaddleSystem:
    """Blocks of a multiple saddle-point matrix.

    Parameters
    ----------
    diag_blocks : sequence of (n_k, n_k) arrays
        ``A_0, ..., A_N``.
    offdiag_blocks : sequence of (n_k, n_{k-1}) arrays
        ``B_1, ..., B_N``.
    """

    diag_blocks: tuple
    offdiag_blocks: tuple

    def __init__(self, diag_blocks: Sequence, offdiag_blocks: Sequence):
        A = tuple(_frozen(a) for a in diag_blocks)
        B = tuple(_frozen(b) for b in offdiag_blocks)
        if len(A) < 2:
            raise StructuralError("need at least two diagonal blocks (N >= 1)")
        if len(B) != len(A) - 1:
            raise StructuralError(
                f"{len(A)} diagonal blocks require {len(A) - 1} off-diagonal "
                f"blocks, got {len(B)}"
            )
        for k, a in enumerate(A):
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise StructuralError(f"A_{k} must be square, got shape {a.shape}")
        for k, b in enumerate(B, start=1):
            expected = (A[k].shape[0], A[k - 1].shape[0])
            if b.shape != expected:
                raise StructuralError(
                    f"B_{k} has shape {b.shape}, expected {expected} "
                    f"from A_{k} and A_{k - 1}"
                )
        object.__setattr__(self, "diag_blocks", A)
        object.__setattr__(self, "offdiag_blocks", B)

    @property
    def N(self) -> int:
        return len(self.offdiag_blocks)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(a.shape[0] for a in self.diag_blocks)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.dims)])

    @property
    def total_dim(self) -> int:
        return int(sum(self.dims))

    @property
    def rect_tail(self) -> bool:
        """True when only the last level grows (n_N > n_{N-1})."""
        n = self.dims
        growing = [k for k in range(1, len(n)) if n[k] > n[k - 1]]
        return growing == [self.N]

    @property
    def standard_shape(self) -> bool:
        n = self.dims
        return all(n[k] <= n[k - 1] for k in range(1, len(n)))

    def split(self, v: np.ndarray) -> list[np.ndarray]:
        """Partition a vector (or the rows of a matrix) by level."""
        v = np.asarray(v)
        if v.shape[0] != self.total_dim:
            raise StructuralError(
                f"vector of length {v.shape[0]} does not match total "
                f"dimension {self.total_dim}"
            )
        off = self.offsets
        return [v[off[k]:off[k + 1]] for k in range(self.N + 1)]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        lines = [
            f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.6g} {c.detail}".rstrip()
            for c in self.checks
        ]
        return "\n".join(lines)


def validate_system(sys: BlockSaddleSystem, tol: float = DEFINITENESS_TOL) -> ValidationReport:
    """Check the definiteness, rank and shape hypotheses on ``sys``.

    Dimension mismatches are caught earlier, when the system is built, and
    raise :class:`StructuralError`; this function only reports spectral and
    shape conditions.
    """
    checks = []
    for k, a in enumerate(sys.diag_blocks):
        asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        scale = max(float(np.max(np.abs(a))) if a.size else 0.0, 1.0)
        checks.append(CheckResult(f"A_{k} symmetric", asym <= tol * scale, asym))
        lam = np.linalg.eigvalsh(0.5 * (a + a.T))
        lmin = float(lam[0])
        norm = float(np.max(np.abs(lam)))
        need_pd = k == 0 or (sys.rect_tail and k == sys.N)
        if need_pd:
            ok = lmin > tol * norm and lmin > 0
            checks.append(CheckResult(
                f"A_{k} positive definite", ok, lmin,
                "" if ok else f"A_{k} not positive definite",
            ))
        else:
            ok = lmin >= -tol * norm
            checks.append(CheckResult(
                f"A_{k} positive semi-definite", ok, lmin,
                "" if ok else f"A_{k} not positive semi-definite",
            ))
    for k, b in enumerate(sys.offdiag_blocks, start=1):
        s = np.linalg.svd(b, compute_uv=False)
        rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
        full = min(b.shape)
        checks.append(CheckResult(
            f"B_{k} full rank", rank == full, float(rank), f"(need {full})",
        ))
    if sys.standard_shape:
        checks.append(CheckResult("shape", True, 0.0, "standard"))
    elif sys.rect_tail and sys.N == 2:
        checks.append(CheckResult("shape", True, 1.0, "rectangular-tail"))
    else:
        checks.append(CheckResult(
            "shape", False, 1.0,
            "n_k <= n_{k-1} violated (rectangular tail only supported as the "
            "last block of an N = 2 system)",
        ))
    return ValidationReport(tuple(checks))


def assemble_full(sys: BlockSaddleSystem) -> np.ndarray:
    """Dense symmetric saddle-point matrix with diagonal blocks ``(-1)^k A_k``."""
    off = sys.offsets
    M = np.zeros((sys.total_dim, sys.total_dim))
    for k, a in enumerate(sys.diag_blocks):
        M[off[k]:off[k + 1], off[k]:off[k + 1]] = (-1) ** k * a
    for k, b in enumerate(sys.offdiag_blocks, start=1):
        M[off[k]:off[k + 1], off[k - 1]:off[k]] = b
        M[off[k - 1]:off[k], off[k]:off[k + 1]] = b.T
    return M


# ---------------------------------------------------------------------------
# approximation strategies


@dataclass(frozen=True)
class ApproxStrategy:
    """How to approximate the perturbed Schur complement at one level.

    ``kind`` is one of ``exact``, ``jacobi``, ``scaled_identity`` (param
    ``c``) or ``spectral_window`` (params ``lo``, ``hi``).
    """

    kind: str = "exact"
    params: tuple = ()

    KINDS = ("exact", "jacobi", "scaled_identity", "spectral_window")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ParameterError(f"unknown approximation strategy {self.kind!r}")
        if self.kind == "scaled_identity":
            if len(self.params) != 1 or not self.params[0] > 0:
                raise ParameterError("scaled_identity needs one positive scale c")
        if self.kind == "spectral_window":
            if len(self.params) != 2:
                raise ParameterError("spectral_window needs (lo, hi)")
            lo, hi = self.params
            if not lo > 0 or lo > hi:
                raise ParameterError(
                    f"spectral_window requires 0 < lo <= hi, got ({lo}, {hi})"
                )

    @classmethod
    def exact(cls) -> "ApproxStrategy":
        return cls("exact")

    @classmethod
    def jacobi(cls) -> "ApproxStrategy":
        return cls("jacobi")

    @classmethod
    def scaled_identity(cls, c: float) -> "ApproxStrategy":
        return cls("scaled_identity", (float(c),))

    @classmethod
    def spectral_window(cls, lo: float, hi: float) -> "ApproxStrategy":
        return cls("spectral_window", (float(lo), float(hi)))

    @classmethod
    def parse(cls, text: str) -> "ApproxStrategy":
        """Parse ``exact``, ``jacobi``, ``scaled_identity:c`` or ``window:lo:hi``."""
        if isinstance(text, ApproxStrategy):
            return text
        head, *rest = text.strip().split(":")
        head = {"window": "spectral_window", "identity": "scaled_identity"}.get(head, head)
        try:
            params = tuple(float(x) for x in rest)
        except ValueError as exc:
            raise ParameterError(f"bad strategy parameters in {text!r}") from exc
        return cls(head, params)

    def __str__(self) -> str:
        if not self.params:
            return self.kind
        return ":".join([self.kind, *(repr(p) for p in self.params)])

    def approximate(self, target: np.ndarray) -> np.ndarray:
        """Return Ŝ approximating the SPD matrix ``target``."""
        n = target.shape[0]
        if self.kind == "exact":
            return target.copy()
        if self.kind == "jacobi":
            d = np.diag(target).copy()
            if np.any(d == 0):
                raise SingularApproximationError(
                    "jacobi approximation of a matrix with a zero diagonal entry"
                )
            return np.diag(d)
        if self.kind == "scaled_identity":
            return self.params[0] * np.eye(n)
        return _window_blend(target, *self.params)


def _window_blend(target: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Ŝ = c1*T + c2*I such that eig(Ŝ^{-1} T) spans exactly [lo, hi].

    T and Ŝ share eigenvectors, so each eigenvalue t of T maps to
    t / (c1 t + c2); the two coefficients are fixed by sending t_min to lo
    and t_max to hi.
    """
    t = np.linalg.eigvalsh(target)
    tmin, tmax = float(t[0]), float(t[-1])
    if tmin <= 0:
        raise SpectralError("spectral_window target must be positive definite")
    n = target.shape[0]
    if tmax - tmin <= 1e-14 * tmax:
        # target is a multiple of the identity: the window collapses to its midpoint
        return target * (2.0 / (lo + hi))
    c1 = (tmax / hi - tmin / lo) / (tmax - tmin)
    c2 = tmin * tmax * (1.0 / lo - 1.0 / hi) / (tmax - tmin)
    return c1 * target + c2 * np.eye(n)


# ---------------------------------------------------------------------------
# Schur chains


def _cholesky(mat: np.ndarray, what: str) -> np.ndarray:
    try:
        return sla.cholesky(mat, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"{what} is not positive definite") from exc


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


@dataclass(frozen=True)
class SchurChain:
    """Exact, perturbed and approximate Schur complements of a system.

    ``perturbed_S[k]`` is the matrix that ``approx_S[k]`` approximates;
    ``perturbed_S[0]`` is ``A_0``. ``factors[k]`` is the lower Cholesky
    factor of ``approx_S[k]``.
    """

    exact_S: tuple
    perturbed_S: tuple
    approx_S: tuple
    strategies: tuple
    factors: tuple = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.approx_S) - 1

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.shape[0] for s in self.approx_S)

    @property
    def is_exact(self) -> bool:
        return all(s.kind == "exact" for s in self.strategies)

    def solve(self, k: int, rhs: np.ndarray) -> np.ndarray:
        """Ŝ_k^{-1} rhs using the stored factor."""
        return sla.cho_solve((self.factors[k], True), rhs)


def _exact_complements(sys: BlockSaddleSystem) -> list[np.ndarray]:
    S = [np.array(sys.diag_blocks[0])]
    for k in range(1, sys.N + 1):
        B = sys.offdiag_blocks[k - 1]
        L = _cholesky(S[k - 1], f"S_{k - 1}")
        X = sla.cho_solve((L, True), B.T)
        S.append(_sym(sys.diag_blocks[k] + B @ X))
    _cholesky(S[-1], f"S_{sys.N}")
    return S


def _freeze_all(mats) -> tuple:
    return tuple(_frozen(m) for m in mats)


def build_exact_schur_chain(sys: BlockSaddleSystem) -> SchurChain:
    """Chain with Ŝ_k = S~_k = S_k at every level."""
    S = _exact_complements(sys)
    factors = [_cholesky(s, f"S_{k}") for k, s in enumerate(S)]
    frozen = _freeze_all(S)
    return SchurChain(
        exact_S=frozen,
        perturbed_S=frozen,
        approx_S=frozen,
        strategies=tuple(ApproxStrategy.exact() for _ in S),
        factors=_freeze_all(factors),
    )


def _normalize_strategies(strategies, n_levels: int) -> list[ApproxStrategy]:
    if strategies is None:
        strategies = "exact"
    if isinstance(strategies, (str, ApproxStrategy)):
        strategies = [strategies] * n_levels
    strategies = [ApproxStrategy.parse(s) for s in strategies]
    if len(strategies) != n_levels:
        raise ParameterError(
            f"expected {n_levels} per-level strategies, got {len(strategies)}"
        )
    return strategies


def build_inexact_chain(sys: BlockSaddleSystem, strategies=None) -> SchurChain:
    """Chain whose level-k target is built from the previous approximation.

    ``strategies`` is a single strategy (applied at every level) or one per
    level; strings are parsed with :meth:`ApproxStrategy.parse`.
    """
    strategies = _normalize_strategies(strategies, sys.N + 1)
    exact = _exact_complements(sys)
    targets, approx, factors = [], [], []
    for k in range(sys.N + 1):
        if k == 0:
            target = np.array(sys.diag_blocks[0])
        else:
            B = sys.offdiag_blocks[k - 1]
            X = sla.cho_solve((factors[k - 1], True), B.T)
            target = _sym(sys.diag_blocks[k] + B @ X)
        S_hat = _sym(strategies[k].approximate(target))
        factors.append(_cholesky(S_hat, f"approximation of level {k}"))
        targets.append(target)
        approx.append(S_hat)
    return SchurChain(
        exact_S=_freeze_all(exact),
        perturbed_S=_freeze_all(targets),
        approx_S=_freeze_all(approx),
        strategies=tuple(strategies),
        factors=_freeze_all(factors),
    )


def apply_preconditioner(chain: SchurChain, v: np.ndarray) -> np.ndarray:
    """Blockwise Ŝ_k^{-1} v_k. Accepts a vector or a matrix of columns."""
    v = np.asarray(v, dtype=float)
    dims = chain.dims
    total = sum(dims)
    if v.shape[0] != total:
        raise StructuralError(
            f"vector of length {v.shape[0]} does not match preconditioner size {total}"
        )
    out = np.empty_like(v)
    start = 0
    for k, n in enumerate(dims):
        out[start:start + n] = chain.solve(k, v[start:start + n])
        start += n
    return out
