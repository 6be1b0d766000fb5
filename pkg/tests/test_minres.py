import numpy as np
import pytest

from saddlebounds import (
    ParameterError,
    assemble_full,
    build_exact_schur_chain,
    build_inexact_chain,
    compute_bounds,
    compute_indicator_set,
    convergence_envelope,
    equalize_widths,
    minres,
    minres_operator,
    random_system,
)

from conftest import random_spd


def test_spd_with_exact_preconditioner_one_step(rng):
    A = random_spd(rng, 12)
    b = rng.standard_normal(12)
    rep = minres_operator(lambda v: A @ v, b, lambda r: np.linalg.solve(A, r), tol=1e-12)
    assert rep.iterations == 1 and rep.converged
    np.testing.assert_allclose(rep.x, np.linalg.solve(A, b), rtol=1e-10)


def test_zero_rhs():
    sys = random_system(1, 2, base_dim=6, jitter=1)
    rep = minres(sys, build_exact_schur_chain(sys), np.zeros(sys.total_dim))
    assert rep.iterations == 0 and rep.converged
    assert not rep.x.any()


def test_recovers_all_ones():
    sys = random_system(2, 42, base_dim=30, jitter=5)
    x_true = np.ones(sys.total_dim)
    b = assemble_full(sys) @ x_true
    rep = minres(sys, build_exact_schur_chain(sys), b, tol=1e-14, maxit=2000)
    assert rep.converged
    assert np.max(np.abs(rep.x - x_true)) <= 1e-8
    assert rep.history[0] == 1.0
    assert np.all(np.diff(rep.history) <= 1e-15)


def test_maxit_status():
    sys = random_system(2, 43, base_dim=20, jitter=5)
    b = assemble_full(sys) @ np.ones(sys.total_dim)
    rep = minres(sys, build_inexact_chain(sys, "jacobi"), b, tol=1e-14, maxit=3)
    assert rep.status == "maxit" and rep.iterations == 3 and not rep.converged
    assert len(rep.history) == 4


def test_envelope_examples():
    assert convergence_envelope((-2, -1, 1, 2), 4) == pytest.approx(2 / 9, rel=1e-14)
    assert convergence_envelope((-2, -1, 1, 2), 0) == 2.0
    assert convergence_envelope((-2, -1, 1, 2), 1) == 2.0
    with pytest.raises(ParameterError):
        convergence_envelope((-2, -1, 1, 2), -1)


def test_equalize_widths():
    assert equalize_widths((-3, -1), (1, 2)) == ((-3, -1), (1, 3))
    assert equalize_widths((-1.5, -1), (0.5, 2)) == ((-2.5, -1), (0.5, 2))
    with pytest.raises(ParameterError):
        equalize_widths((-1, 1), (2, 3))


def test_tighter_bounds_never_raise_envelope(rng):
    for _ in range(50):
        a, b = -np.sort(rng.uniform(0.1, 5, 2))[::-1]
        c, d = np.sort(rng.uniform(0.1, 5, 2))
        shrink = rng.uniform(0, 0.5, 4)
        inner = (a + shrink[0] * (b - a) / 2, b - shrink[1] * (b - a) / 2,
                 c + shrink[2] * (d - c) / 2, d - shrink[3] * (d - c) / 2)
        for k in range(0, 30, 3):
            assert convergence_envelope(inner, k) <= convergence_envelope((a, b, c, d), k) * (1 + 1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_history_below_envelope(seed):
    N = 1 + seed % 3
    sys = random_system(N, 500 + seed, base_dim=15, jitter=5)
    chain = build_inexact_chain(sys, ["window:0.3:2.5"] + ["jacobi"] * N)
    bounds = compute_bounds(compute_indicator_set(sys, chain))
    b = np.random.default_rng(seed).standard_normal(sys.total_dim)
    rep = minres(sys, chain, b, tol=1e-12, maxit=3000)
    for k, h in enumerate(rep.history):
        env = convergence_envelope(bounds, k)
        if env >= 1e-10:
            assert h <= env * (1 + 1e-6)


def test_iterations_drop_as_window_tightens():
    # with A_k = 0 below the first level the exact chain clusters the spectrum,
    # so preconditioner quality dominates the iteration count
    sys = random_system(2, 42, zero_tail=True)
    b = assemble_full(sys) @ np.ones(sys.total_dim)
    counts = []
    for strat in ("window:0.25:4", "window:0.9:1.1", "exact"):
        rep = minres(sys, build_inexact_chain(sys, strat), b, tol=1e-14, maxit=5000)
        assert rep.converged
        counts.append(rep.iterations)
    assert counts[0] > counts[1] > counts[2]


def test_report_dict_fields():
    sys = random_system(1, 3, base_dim=5, jitter=1)
    rep = minres(sys, build_exact_schur_chain(sys), np.ones(sys.total_dim))
    assert set(rep.to_dict()) == {"iterations", "converged", "status", "final_relative_residual", "wall_time"}
