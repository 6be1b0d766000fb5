"""Random test systems, indicator-controlled preconditioners and suite runs.

Systems follow the recipe of the synthetic experiments: block sizes near
``50 + 10 * U(0, 1)`` with non-increasing sizes, symmetrized Gaussian
diagonal blocks shifted to (semi-)definiteness, and Gaussian couplings.
Approximate complements are affine blends ``c1 * target + c2 * I`` whose
pencil spectrum fills a requested window exactly.
"""
from __future__ import annotations

import csv
import io
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds import compute_bounds, containment
from .errors import ParameterError, SpectralError
from .indicators import compute_indicator_set
from .saddle_core import ApproxStrategy, BlockSaddleSystem, SchurChain, build_inexact_chain
from .spectrum import preconditioned_spectrum

__all__ = [
    "GRIDS",
    "SuiteConfig",
    "SuiteResult",
    "controlled_chain",
    "default_workers",
    "random_rect_system",
    "random_system",
    "run_case",
    "run_suite",
    "write_suite_csv",
    "write_suite_svg",
]

# candidate interval ends: (alphas, betas)
GRIDS = {
    "table1": {2: ((0.1, 0.3, 0.9), (1.2, 1.8, 5.0)), "default": ((0.1, 0.9), (1.2, 5.0))},
    "smoke": {"default": ((0.1, 0.9), (1.2, 5.0))},
}

ENDPOINT_CLASSES = ("neg_lb", "neg_ub", "pos_lb", "pos_ub")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _draw_dim(rng, base: int, jitter: int) -> int:
    return int(np.rint(base + jitter * rng.random()))


def _shifted_symmetric(rng, n: int, margin: float) -> np.ndarray:
    G = rng.standard_normal((n, n))
    A = 0.5 * (G + G.T)
    lam = np.linalg.eigvalsh(A)
    norm = float(np.max(np.abs(lam)))
    return A + (abs(lam[0]) + margin * norm) * np.eye(n)


def _full_rank_gaussian(rng, shape, k: int) -> np.ndarray:
    for _ in range(10):
        B = rng.standard_normal(shape)
        s = np.linalg.svd(B, compute_uv=False)
        if np.sum(s > 1e-10 * s[0]) == min(shape):
            return B
    raise SpectralError(f"could not draw a full-rank B_{k} in 10 attempts")


def random_system(N: int, seed=None, *, zero_tail: bool = False, base_dim: int = 50,
                  jitter: int = 10, pd_margin: float = 1e-3,
                  psd_margin: float = 0.0) -> BlockSaddleSystem:
    """Random standard-shape system with ``N + 1`` levels.

    ``zero_tail`` sets ``A_k = 0`` for ``k >= 1``. ``A_0`` is shifted by
    ``|λ_min| + pd_margin * ||A_0||``; the other blocks by
    ``|λ_min| + psd_margin * ||A_k||`` (semi-definite by default).
    """
    if N < 1:
        raise ParameterError("N must be at least 1")
    rng = _rng(seed)
    dims = [_draw_dim(rng, base_dim, jitter)]
    for _ in range(N):
        n = _draw_dim(rng, base_dim, jitter)
        while n > dims[-1]:
            n = _draw_dim(rng, base_dim, jitter)
        dims.append(n)
    A = [_shifted_symmetric(rng, dims[0], pd_margin)]
    for k in range(1, N + 1):
        if zero_tail:
            A.append(np.zeros((dims[k], dims[k])))
        else:
            A.append(_shifted_symmetric(rng, dims[k], psd_margin))
    B = [_full_rank_gaussian(rng, (dims[k], dims[k - 1]), k) for k in range(1, N + 1)]
    return BlockSaddleSystem(A, B)


def random_rect_system(seed=None, *, base_dim: int = 30, jitter: int = 10,
                       tail_extra: int = 10) -> BlockSaddleSystem:
    """N = 2 system whose last block is larger than the middle one.

    ``A_2`` is shifted to be positive definite so the system stays
    invertible.
    """
    rng = _rng(seed)
    n0 = _draw_dim(rng, base_dim, jitter)
    n1 = _draw_dim(rng, base_dim // 2, jitter // 2)
    n2 = n1 + tail_extra + _draw_dim(rng, 0, jitter // 2)
    A = [
        _shifted_symmetric(rng, n0, 1e-3),
        _shifted_symmetric(rng, n1, 0.0),
        _shifted_symmetric(rng, n2, 0.5),
    ]
    B = [_full_rank_gaussian(rng, (n1, n0), 1), _full_rank_gaussian(rng, (n2, n1), 2)]
    return BlockSaddleSystem(A, B)


def controlled_chain(sys: BlockSaddleSystem, windows: Sequence[tuple[float, float]]) -> SchurChain:
    """Chain whose level-k approximation puts eig(Ŝ_k^{-1} S~_k) exactly in ``windows[k]``.

    At level 0 this pins the E-interval; at level k >= 1 it pins the
    spectrum of ``R_k R_k^T + E_k``, which is the R-interval when ``A_k = 0``.
    """
    if len(windows) != sys.N + 1:
        raise ParameterError(f"need {sys.N + 1} windows, got {len(windows)}")
    strategies = []
    for k, (lo, hi) in enumerate(windows):
        if not (0 < lo <= hi):
            raise ParameterError(f"window {k} = [{lo}, {hi}] must satisfy 0 < lo <= hi")
        strategies.append(ApproxStrategy.spectral_window(lo, hi))
    return build_inexact_chain(sys, strategies)


# ---------------------------------------------------------------------------
# suites


def default_workers() -> int:
    env = os.environ.get("SADDLEBOUNDS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SuiteConfig:
    """Grid of indicator windows to sweep.

    ``alphas``/``betas`` are the candidate lower/upper interval ends shared
    by the E-interval of level 0 and every R-interval. ``stride`` keeps every
    ``stride``-th combination (reduced grids).
    """

    N: int
    alphas: tuple = (0.1, 0.9)
    betas: tuple = (1.2, 5.0)
    runs: int = 1
    seed: int = 42
    base_dim: int = 50
    jitter: int = 10
    stride: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise ParameterError("N must be at least 1")
        for name, vals in (("alphas", self.alphas), ("betas", self.betas)):
            if not all(v > 0 for v in vals) or list(vals) != sorted(set(vals)):
                raise ParameterError(f"{name} must be positive and strictly increasing")
        if max(self.alphas) > min(self.betas):
            raise ParameterError("every alpha must lie below every beta")
        if self.runs < 1 or self.stride < 1:
            raise ParameterError("runs and stride must be positive")

    @classmethod
    def from_grid(cls, N: int, grid: str = "table1", **kw) -> "SuiteConfig":
        try:
            table = GRIDS[grid]
        except KeyError as exc:
            raise ParameterError(f"unknown grid {grid!r}; choose from {sorted(GRIDS)}") from exc
        alphas, betas = table.get(N, table["default"])
        return cls(N, alphas, betas, **kw)

    @property
    def n_endpoints(self) -> int:
        return 2 * (self.N + 1)

    def combinations(self) -> list[tuple[int, tuple[float, ...]]]:
        """(combo_id, endpoints) with endpoints ordered αE0, βE0, αR1, βR1, ..."""
        choices = [self.alphas if j % 2 == 0 else self.betas for j in range(self.n_endpoints)]
        combos = list(enumerate(itertools.product(*choices)))
        return combos[::self.stride]


def run_case(N: int, endpoints: Sequence[float], combo_id: int, run: int, seed: int,
             base_dim: int = 50, jitter: int = 10) -> dict:
    """Generate one system for a window combination and compare spectrum with bounds."""
    ss = np.random.SeedSequence(seed, spawn_key=(combo_id, run))
    rng = np.random.default_rng(ss)
    sys = random_system(N, rng, zero_tail=True, base_dim=base_dim, jitter=jitter)
    windows = [(endpoints[2 * k], endpoints[2 * k + 1]) for k in range(N + 1)]
    chain = controlled_chain(sys, windows)
    ind = compute_indicator_set(sys, chain)
    bounds = compute_bounds(ind)
    spec = preconditioned_spectrum(sys, chain)
    report = containment(bounds, spec.eigenvalues)
    e = spec.extremal
    mu = bounds.endpoints
    row = {"combo_id": combo_id, "run": run}
    names = ["alphaE0", "betaE0"]
    for k in range(1, N + 1):
        names += [f"alphaR{k}", f"betaR{k}"]
    row.update(dict(zip(names, (float(x) for x in endpoints))))
    row.update({
        "eig_neg_min": e[0], "eig_neg_max": e[1], "eig_pos_min": e[2], "eig_pos_max": e[3],
        "mu_neg_lb": mu[0], "mu_neg_ub": mu[1], "mu_pos_lb": mu[2], "mu_pos_ub": mu[3],
        "contained": int(report.passed),
        "slack_neg_lb": e[0] - mu[0],
        "slack_neg_ub": mu[1] - e[1],
        "slack_pos_lb": e[2] - mu[2],
        "slack_pos_ub": mu[3] - e[3],
    })
    return row


def _run_case_star(args):
    return run_case(*args)


@dataclass
class SuiteResult:
    config: SuiteConfig
    rows: list = field(default_factory=list)

    @property
    def n_failures(self) -> int:
        return sum(1 for r in self.rows if not r["contained"])

    @property
    def passed(self) -> bool:
        return self.n_failures == 0

    def summary(self) -> dict:
        out = {"cases": len(self.rows), "failures": self.n_failures}
        for cls in ENDPOINT_CLASSES:
            s = np.array([r[f"slack_{cls}"] for r in self.rows])
            side = cls.split("_")[0]
            width = np.array([r[f"mu_{side}_ub"] - r[f"mu_{side}_lb"] for r in self.rows])
            rel = s / np.where(width > 0, width, np.inf)
            out[cls] = {
                "min_slack": float(s.min()),
                "max_slack": float(s.max()),
                "mean_slack": float(s.mean()),
                "min_relative_slack": float(rel.min()),
            }
        return out


def run_suite(config: SuiteConfig, workers: int | None = None) -> SuiteResult:
    """Every (combination, run) case, merged in combination order."""
    tasks = [
        (config.N, endpoints, combo_id, run, config.seed, config.base_dim, config.jitter)
        for combo_id, endpoints in config.combinations()
        for run in range(config.runs)
    ]
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(tasks) < 2:
        rows = [_run_case_star(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_case_star, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    rows.sort(key=lambda r: (r["combo_id"], r["run"]))
    return SuiteResult(config, rows)


def write_suite_csv(result: SuiteResult, path=None) -> str:
    """CSV text of the suite rows (floats in round-trip repr); also written to ``path``."""
    buf = io.StringIO()
    if result.rows:
        fields = list(result.rows[0])
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for r in result.rows:
            writer.writerow([repr(float(r[f])) if isinstance(r[f], float) else r[f] for f in fields])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def write_suite_svg(result: SuiteResult, path) -> None:
    """Ordered scatter of extremal eigenvalues (dots) against their bounds (lines)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "saddlebounds"
    pairs = [
        ("eig_neg_min", "mu_neg_lb", "smallest negative"),
        ("eig_neg_max", "mu_neg_ub", "largest negative"),
        ("eig_pos_min", "mu_pos_lb", "smallest positive"),
        ("eig_pos_max", "mu_pos_ub", "largest positive"),
    ]
    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    for ax, (eig, mu, title) in zip(axes.flat, pairs):
        e = np.array([r[eig] for r in result.rows])
        m = np.array([r[mu] for r in result.rows])
        order = np.lexsort((e, m))
        ax.plot(np.arange(len(m)), m[order], "r-", lw=1.2, label="bound")
        ax.plot(np.arange(len(e)), e[order], "b.", ms=3, label="eigenvalue")
        ax.set_title(title)
        ax.set_xlabel("test case (ordered)")
    axes.flat[0].legend(loc="best")
    fig.suptitle(f"N = {result.config.N}: extremal eigenvalues vs bounds")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
