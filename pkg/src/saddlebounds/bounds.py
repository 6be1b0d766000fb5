"""Eigenvalue inclusion intervals from indicator sets.

Every eigenvalue of the preconditioned matrix lies in
``[neg_lb, neg_ub] ∪ [pos_lb, pos_ub]``. The endpoints are extreme roots of
the polynomials ``U_1 .. U_{N+1}`` with the parameters pinned at interval
endpoints. The monotonicity of the roots in each parameter singles out four
corner assignments, so the linear algorithm needs one root computation per
degree instead of a sweep over all ``2^(2N+1)`` corners; the sweep is kept
as :func:`compute_bounds_bruteforce` to cross-check it.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .indicators import IndicatorSet
from .polynomials import GammaAssignment, roots_U

__all__ = [
    "ContainmentReport",
    "EigenvalueBounds",
    "bounds_n2_closed",
    "bounds_for",
    "bounds_n2_rect",
    "compute_bounds",
    "compute_bounds_bruteforce",
    "containment",
    "corner_assignments",
]

BRUTEFORCE_MAX_N = 6
CONTAINMENT_RTOL = 1e-8
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class EigenvalueBounds:
    neg: tuple
    pos: tuple
    extra: tuple | None = None
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "neg", tuple(float(x) for x in self.neg))
        object.__setattr__(self, "pos", tuple(float(x) for x in self.pos))
        if self.extra is not None:
            object.__setattr__(self, "extra", tuple(float(x) for x in self.extra))

    @property
    def endpoints(self) -> np.ndarray:
        """``(neg_lb, neg_ub, pos_lb, pos_ub)``."""
        return np.array([*self.neg, *self.pos])

    def intervals(self) -> list[tuple[float, float]]:
        out = [self.neg, self.pos]
        if self.extra is not None:
            out.append(self.extra)
        return out

    def is_consistent(self) -> bool:
        a, b = self.neg
        c, d = self.pos
        ok = a <= b < 0 < c <= d
        if self.extra is not None:
            ok = ok and 0 < self.extra[0] <= self.extra[1]
        return ok

    def to_dict(self) -> dict:
        d = {"neg": list(self.neg), "pos": list(self.pos)}
        if self.extra is not None:
            d["extra"] = list(self.extra)
        d["provenance"] = self.provenance
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EigenvalueBounds":
        return cls(d["neg"], d["pos"], d.get("extra"), d.get("provenance", {}))


# ---------------------------------------------------------------------------
# corners


def _alternate(first, second, n):
    return [first[j] if j % 2 == 0 else second[j] for j in range(n)]


def corner_assignments(ind: IndicatorSet) -> dict[str, GammaAssignment]:
    """The four corners ``negLB, negUB, posLB, posUB``.

    E-parameters alternate between the interval ends level by level; the
    R-parameters sit at the upper ends for the two outer endpoints and
    alternate for the two inner ones.
    """
    aE, bE, aR, bR = ind.alphaE, ind.betaE, ind.alphaR, ind.betaR
    nE, nR = ind.N + 1, ind.N
    E_low_first = _alternate(aE, bE, nE)
    E_high_first = _alternate(bE, aE, nE)
    return {
        "negLB": GammaAssignment(E_low_first, bR),
        "negUB": GammaAssignment(E_high_first, _alternate(aR, bR, nR)),
        "posLB": GammaAssignment(E_low_first, _alternate(bR, aR, nR)),
        "posUB": GammaAssignment(E_high_first, bR),
    }


def _check_indicators(ind: IndicatorSet, *, rect_ok: bool = False) -> None:
    ind.validate()
    if ind.rect_tail and not rect_ok:
        raise ParameterError(
            "indicator set describes a rectangular-tail system; use bounds_n2_rect"
        )


def _ties(values: dict[int, float], best: float) -> list[int]:
    return sorted(
        d for d, v in values.items()
        if abs(v - best) <= _TIE_RTOL * max(1.0, abs(best))
    )


def compute_bounds(ind: IndicatorSet) -> EigenvalueBounds:
    """Linear corner algorithm."""
    _check_indicators(ind)
    N = ind.N
    corners = corner_assignments(ind)
    top = N + 1
    neg_lb = float(roots_U(top, corners["negLB"]).roots[0])
    pos_ub = float(roots_U(top, corners["posUB"]).roots[-1])

    neg_candidates: dict[int, float] = {}
    for deg in range(2, top + 1, 2):
        r = roots_U(deg, corners["negUB"].truncated(deg))
        if r.neg_count == 0:
            warnings.warn(f"U_{deg} has no negative root at the negUB corner; skipped")
            continue
        neg_candidates[deg] = r.largest_negative
    pos_candidates: dict[int, float] = {}
    for deg in range(1, top + 1, 2):
        r = roots_U(deg, corners["posLB"].truncated(deg))
        if r.pos_count == 0:
            warnings.warn(f"U_{deg} has no positive root at the posLB corner; skipped")
            continue
        pos_candidates[deg] = r.smallest_positive
    if not neg_candidates or not pos_candidates:
        raise ParameterError("indicator set admits no inner bound candidates")
    neg_ub = max(neg_candidates.values())
    pos_lb = min(pos_candidates.values())

    provenance = {
        "method": "linear",
        "neg_lb": {"degrees": [top], "corner": "negLB",
                   "gamma": list(corners["negLB"].as_tuple())},
        "neg_ub": {"degrees": _ties(neg_candidates, neg_ub), "corner": "negUB",
                   "gamma": list(corners["negUB"].as_tuple())},
        "pos_lb": {"degrees": _ties(pos_candidates, pos_lb), "corner": "posLB",
                   "gamma": list(corners["posLB"].as_tuple())},
        "pos_ub": {"degrees": [top], "corner": "posUB",
                   "gamma": list(corners["posUB"].as_tuple())},
    }
    return EigenvalueBounds((neg_lb, neg_ub), (pos_lb, pos_ub), None, provenance)


def _batched_tridiagonal_roots(gE: np.ndarray, gR: np.ndarray) -> np.ndarray:
    """Roots of U_k for a batch of parameter rows via dense LAPACK eigvalsh."""
    batch, k = gE.shape
    T = np.zeros((batch, k, k))
    idx = np.arange(k)
    T[:, idx, idx] = gE * (-1.0) ** idx
    if k > 1:
        off = np.sqrt(gR)
        T[:, idx[:-1], idx[1:]] = off
        T[:, idx[1:], idx[:-1]] = off
    return np.linalg.eigvalsh(T)


def compute_bounds_bruteforce(ind: IndicatorSet) -> EigenvalueBounds:
    """Envelope over every corner of the parameter box and every degree.

    Roots are taken from a dense symmetric eigensolver, independent of the
    bisection used by :func:`compute_bounds`.
    """
    _check_indicators(ind)
    N = ind.N
    if N > BRUTEFORCE_MAX_N:
        raise ParameterError(f"brute-force corner sweep limited to N <= {BRUTEFORCE_MAX_N}")
    aE, bE = np.array(ind.alphaE), np.array(ind.betaE)
    aR, bR = np.array(ind.alphaR), np.array(ind.betaR)
    best = {"neg_lb": np.inf, "neg_ub": -np.inf, "pos_lb": np.inf, "pos_ub": -np.inf}
    where: dict[str, list[int]] = {key: [] for key in best}

    def update(key, value, deg, better):
        if not np.isfinite(value):
            return
        tie = np.isclose(value, best[key], rtol=_TIE_RTOL, atol=0)
        if tie and deg not in where[key]:
            where[key].append(deg)
        elif not tie and better(value, best[key]):
            where[key] = [deg]
        if better(value, best[key]):
            best[key] = value

    for deg in range(1, N + 2):
        bits = np.array(list(itertools.product((0, 1), repeat=2 * deg - 1)), dtype=bool)
        bits = bits.reshape(-1, 2 * deg - 1)
        eb, rb = bits[:, :deg], bits[:, deg:]
        gE = np.where(eb, bE[:deg], aE[:deg])
        gR = np.where(rb, bR[:deg - 1], aR[:deg - 1])
        r = _batched_tridiagonal_roots(gE, gR)
        neg = np.where(r < 0, r, -np.inf)
        pos = np.where(r > 0, r, np.inf)
        update("neg_lb", float(r.min()), deg, lambda a, b: a < b)
        update("pos_ub", float(r.max()), deg, lambda a, b: a > b)
        update("neg_ub", float(neg.max()), deg, lambda a, b: a > b)
        update("pos_lb", float(pos.min()), deg, lambda a, b: a < b)

    provenance = {"method": "bruteforce", "corners": 2 ** (2 * N + 1)}
    provenance.update({key: {"degrees": sorted(v)} for key, v in where.items()})
    return EigenvalueBounds(
        (best["neg_lb"], best["neg_ub"]), (best["pos_lb"], best["pos_ub"]), None, provenance
    )


# ---------------------------------------------------------------------------
# N = 2 closed forms


def _polish(coeffs: np.ndarray, x: float, steps: int = 3) -> float:
    dcoeffs = np.polyder(coeffs)
    for _ in range(steps):
        d = np.polyval(dcoeffs, x)
        if d == 0:
            break
        x = x - np.polyval(coeffs, x) / d
    return float(x)


def _quadratic_roots(e0: float, e1: float, r1: float) -> tuple[float, float]:
    # U_2 = λ² + (e1 - e0) λ - (e0 e1 + r1)
    p = e1 - e0
    q = -(e0 * e1 + r1)
    disc = np.sqrt(p * p - 4 * q)
    big = -0.5 * (p + np.copysign(disc, p)) if p != 0 else 0.5 * disc
    if big == 0:
        return (-0.5 * disc, 0.5 * disc)
    return tuple(sorted((big, q / big)))


def _cubic_coeffs(e0, e1, r1, e2, r2) -> np.ndarray:
    # U_3 = (λ - e2) U_2 - r2 U_1
    return np.array([
        1.0,
        e1 - e0 - e2,
        -(e0 * e1 + r1) - e2 * (e1 - e0) - r2,
        e2 * (e0 * e1 + r1) + r2 * e0,
    ])


def _cubic_roots(e0, e1, r1, e2, r2) -> np.ndarray:
    c = _cubic_coeffs(e0, e1, r1, e2, r2)
    raw = np.sort(np.roots(c).real)
    return np.array([_polish(c, x) for x in raw])


def bounds_n2_closed(ind: IndicatorSet) -> EigenvalueBounds:
    """Explicit double saddle-point formulas (three blocks)."""
    _check_indicators(ind)
    if ind.N != 2:
        raise ParameterError(f"closed-form bounds need N = 2, got N = {ind.N}")
    aE, bE, aR, bR = ind.alphaE, ind.betaE, ind.alphaR, ind.betaR
    neg_lb = _cubic_roots(aE[0], bE[1], bR[0], aE[2], bR[1])[0]
    neg_ub = _quadratic_roots(bE[0], aE[1], aR[0])[0]
    cubic_pos = _cubic_roots(aE[0], bE[1], bR[0], aE[2], aR[1])
    pos_lb = min(aE[0], float(cubic_pos[cubic_pos > 0][0]))
    pos_ub = _cubic_roots(bE[0], aE[1], bR[0], bE[2], bR[1])[-1]
    return EigenvalueBounds(
        (neg_lb, neg_ub), (pos_lb, pos_ub), None, {"method": "n2-closed"}
    )


def bounds_n2_rect(ind: IndicatorSet) -> EigenvalueBounds:
    """Double saddle-point bounds when the last block grows (n_2 > n_1).

    The last R-interval is that of ``R_2^T R_2``. Eigenvalues lie in
    ``[αE0, βE0] ∪ [αE2, βE2] ∪ I_3`` where ``I_3`` collects the roots of
    ``U_3``. ``extra`` keeps the middle interval; ``pos`` is the hull of
    every positive piece.
    """
    ind.validate()
    if ind.N != 2:
        raise ParameterError(f"rectangular-tail bounds need N = 2, got N = {ind.N}")
    if not ind.rect_tail:
        raise ParameterError("rectangular-tail bounds need an indicator set with rect_tail set")
    aE, bE, aR, bR = ind.alphaE, ind.betaE, ind.alphaR, ind.betaR
    corners = {
        "negLB": GammaAssignment([aE[0], bE[1], aE[2]], [bR[0], bR[1]]),
        "negUB": GammaAssignment([bE[0], aE[1], bE[2]], [aR[0], aR[1]]),
        "posLB": [GammaAssignment([aE[0], bE[1], aE[2]], [r1, r2])
                  for r1 in (aR[0], bR[0]) for r2 in (aR[1], bR[1])],
        "posUB": GammaAssignment([bE[0], aE[1], bE[2]], [bR[0], bR[1]]),
    }
    neg_lb = float(roots_U(3, corners["negLB"]).roots[0])
    neg_ub = roots_U(3, corners["negUB"]).largest_negative
    # the minimising R-corner for the smallest positive root depends on the data
    cubic_pos_lb = min(roots_U(3, g).smallest_positive for g in corners["posLB"])
    cubic_pos_ub = float(roots_U(3, corners["posUB"]).roots[-1])
    pos_lb = min(aE[0], aE[2], cubic_pos_lb)
    pos_ub = max(bE[0], bE[2], cubic_pos_ub)
    provenance = {
        "method": "n2-rect",
        "hulled": True,
        "I1": [aE[0], bE[0]],
        "I_E2": [aE[2], bE[2]],
        "I3_pos": [cubic_pos_lb, cubic_pos_ub],
        "corners": {
            name: [list(c.as_tuple()) for c in g] if isinstance(g, list) else list(g.as_tuple())
            for name, g in corners.items()
        },
    }
    return EigenvalueBounds((neg_lb, neg_ub), (pos_lb, pos_ub), (aE[2], bE[2]), provenance)


# ---------------------------------------------------------------------------
# containment


@dataclass(frozen=True)
class ContainmentReport:
    eigenvalues: np.ndarray
    inside: np.ndarray
    slack: np.ndarray
    rtol: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.inside))

    @property
    def n_outside(self) -> int:
        return int(np.sum(~self.inside))

    @property
    def min_slack(self) -> float:
        return float(np.min(self.slack)) if self.slack.size else float("inf")

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n_eigenvalues": int(self.eigenvalues.size),
            "n_outside": self.n_outside,
            "min_slack": self.min_slack,
            "rtol": self.rtol,
            "outside": [float(x) for x in self.eigenvalues[~self.inside]],
        }


def containment(bounds: EigenvalueBounds, eigenvalues, rtol: float = CONTAINMENT_RTOL) -> ContainmentReport:
    """Check every eigenvalue against the closed inclusion intervals.

    Each endpoint is relaxed outward by ``rtol * |endpoint|``. ``slack`` is
    the distance to the nearest endpoint of the best interval (negative when
    outside).
    """
    lam = np.atleast_1d(np.asarray(eigenvalues, dtype=float))
    inside = np.zeros(lam.shape, dtype=bool)
    slack = np.full(lam.shape, -np.inf)
    for lo, hi in bounds.intervals():
        ok = (lam >= lo - rtol * abs(lo)) & (lam <= hi + rtol * abs(hi))
        inside |= ok
        slack = np.maximum(slack, np.minimum(lam - lo, hi - lam))
    return ContainmentReport(lam, inside, slack, rtol)


METHODS = {
    "linear": compute_bounds,
    "bruteforce": compute_bounds_bruteforce,
    "n2-closed": bounds_n2_closed,
    "n2-rect": bounds_n2_rect,
}


def bounds_for(ind: IndicatorSet, method: str = "auto") -> EigenvalueBounds:
    """Dispatch by method name; ``auto`` picks ``n2-rect`` for growing-tail sets."""
    if method == "auto":
        method = "n2-rect" if ind.rect_tail else "linear"
    try:
        fn = METHODS[method]
    except KeyError as exc:
        raise ParameterError(f"unknown bounds method {method!r}; choose from {sorted(METHODS)}") from exc
    return fn(ind)
