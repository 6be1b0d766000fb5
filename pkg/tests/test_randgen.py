import numpy as np
import pytest

from saddlebounds import ApproxStrategy, ParameterError, random_system, validate_system
from saddlebounds.indicators import pencil_eigvalsh
from saddlebounds.randgen import (
    SuiteConfig,
    controlled_chain,
    default_workers,
    run_suite,
    write_suite_csv,
    write_suite_svg,
)

from conftest import random_spd


def test_same_seed_same_system():
    a, b = random_system(3, 123), random_system(3, 123)
    assert a.dims == b.dims
    for x, y in zip(a.diag_blocks + a.offdiag_blocks, b.diag_blocks + b.offdiag_blocks):
        assert np.array_equal(x, y)


def test_dims_policy():
    for seed in range(30):
        dims = random_system(4, seed, zero_tail=True).dims
        assert all(50 <= n <= 60 for n in dims)
        assert all(dims[k] >= dims[k + 1] for k in range(4))


def test_hundred_draws_validate():
    for seed in range(100):
        sys = random_system(4, seed, base_dim=20, jitter=10)
        assert validate_system(sys).passed, seed


def test_zero_tail():
    sys = random_system(3, 8, zero_tail=True, base_dim=6, jitter=2)
    assert all(not a.any() for a in sys.diag_blocks[1:])
    assert np.linalg.eigvalsh(sys.diag_blocks[0])[0] > 0


def test_window_endpoints_hit_exactly(rng):
    T = random_spd(rng, 10)
    S = ApproxStrategy.spectral_window(1, 1).approximate(T)
    np.testing.assert_allclose(S, T, atol=1e-12)
    S = ApproxStrategy.spectral_window(0.5, 1.5).approximate(T)
    lam = pencil_eigvalsh(T, np.linalg.cholesky(S))
    assert lam[0] >= 0.5 - 1e-8 and lam[-1] <= 1.5 + 1e-8
    np.testing.assert_allclose((lam[0], lam[-1]), (0.5, 1.5), atol=1e-10)


def test_controlled_chain_checks_windows():
    sys = random_system(2, 1, zero_tail=True, base_dim=6, jitter=1)
    with pytest.raises(ParameterError):
        controlled_chain(sys, [(0.5, 1.5)] * 2)
    with pytest.raises(ParameterError):
        controlled_chain(sys, [(0.5, 1.5), (2.0, 1.0), (0.5, 1.5)])


@pytest.mark.parametrize("N,grid,count", [(2, "table1", 729), (3, "table1", 256), (4, "table1", 1024), (2, "smoke", 64)])
def test_grid_sizes(N, grid, count):
    assert len(SuiteConfig.from_grid(N, grid).combinations()) == count


def test_config_validation():
    with pytest.raises(ParameterError):
        SuiteConfig(2, alphas=(0.5,), betas=(0.4,))
    with pytest.raises(ParameterError):
        SuiteConfig.from_grid(2, "huge")
    assert len(SuiteConfig.from_grid(4, "table1", stride=16).combinations()) == 64


@pytest.fixture(scope="module")
def smoke():
    cfg = SuiteConfig.from_grid(2, "smoke", runs=1, seed=7, base_dim=20, jitter=5)
    return cfg, run_suite(cfg, workers=1)


def test_smoke_suite_contains_everything(smoke):
    _, res = smoke
    assert len(res.rows) == 64
    assert res.passed
    summary = res.summary()
    for cls in ("neg_lb", "pos_lb", "pos_ub"):
        assert summary[cls]["min_relative_slack"] <= 0.05
        assert summary[cls]["min_slack"] >= 0


def test_suite_csv_reproducible(smoke, tmp_path):
    cfg, res = smoke
    again = run_suite(cfg, workers=2)
    text = write_suite_csv(res, tmp_path / "a.csv")
    assert text == write_suite_csv(again)
    assert (tmp_path / "a.csv").read_text() == text
    assert text.splitlines()[0].startswith("combo_id,run,alphaE0,betaE0,alphaR1,betaR1")


def test_suite_svg_deterministic(smoke, tmp_path):
    _, res = smoke
    write_suite_svg(res, tmp_path / "a.svg")
    write_suite_svg(res, tmp_path / "b.svg")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
    assert b"<svg" in (tmp_path / "a.svg").read_bytes()


def test_worker_env(monkeypatch):
    monkeypatch.setenv("SADDLEBOUNDS_THREADS", "3")
    assert default_workers() == 3
    monkeypatch.delenv("SADDLEBOUNDS_THREADS")
    assert default_workers() >= 1
