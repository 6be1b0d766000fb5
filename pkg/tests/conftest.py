from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_spd(rng, n, cond_shift=0.5):
    G = rng.standard_normal((n, n))
    return G @ G.T / n + cond_shift * np.eye(n)


def random_gamma(rng, n_levels, zero_e_prob=0.0):
    """Admissible parameters: γE0 > 0, γE_k >= 0, γR > 0 (log-uniform spread)."""
    from saddlebounds import GammaAssignment

    gE = 10.0 ** rng.uniform(-1.5, 0.7, n_levels)
    if zero_e_prob:
        gE[1:][rng.random(n_levels - 1) < zero_e_prob] = 0.0
    gR = 10.0 ** rng.uniform(-1.5, 0.7, n_levels - 1)
    return GammaAssignment(gE, gR)


def random_indicators(rng, N, zero_e_prob=0.25, rect_tail=False):
    """Random admissible IndicatorSet with log-uniform interval ends."""
    from saddlebounds import IndicatorSet

    def interval(n, allow_zero):
        ends = np.sort(10.0 ** rng.uniform(-2, 0.8, (n, 2)), axis=1)
        if allow_zero:
            z = rng.random(n) < zero_e_prob
            ends[z, 0] = 0.0
            ends[z & (rng.random(n) < 0.5), 1] = 0.0
        return ends

    E = interval(N + 1, True)
    E[0] = np.sort(10.0 ** rng.uniform(-2, 0.8, 2))
    R = interval(N, False)
    return IndicatorSet(E[:, 0], E[:, 1], R[:, 0], R[:, 1], rect_tail).validate()


def hp_root_shift(k, gamma, which, m, delta=1e-6, dps=40):
    """Root displacement of U_k when one parameter grows by ``delta``.

    Both root sets are Newton-refined in ``dps``-digit arithmetic starting from
    the double-precision roots, so displacements far below 1e-13 stay visible.
    """
    import mpmath
    from saddlebounds import roots_U

    with mpmath.workdps(dps):
        gE = [mpmath.mpf(x) for x in gamma.gammaE]
        gR = [mpmath.mpf(x) for x in gamma.gammaR]
        gE2, gR2 = list(gE), list(gR)
        if which == "E":
            gE2[m] += mpmath.mpf(delta)
        else:
            gR2[m - 1] += mpmath.mpf(delta)

        def refine(x, e, r):
            x = mpmath.mpf(x)
            for _ in range(60):
                u_prev, u = mpmath.mpf(1), x - e[0]
                d_prev, d = mpmath.mpf(0), mpmath.mpf(1)
                for j in range(1, k):
                    s = x + (-1) ** (j + 1) * e[j]
                    u_prev, u, d_prev, d = u, s * u - r[j - 1] * u_prev, d, u + s * d - r[j - 1] * d_prev
                step = u / d
                x -= step
                if abs(step) < mpmath.mpf(10) ** (-dps + 5):
                    break
            return x

        start = roots_U(k, gamma).roots
        return np.array([float(refine(x, gE2, gR2) - refine(x, gE, gR)) for x in start])


def hp_param_fd(k, xi, gamma, which, m, h=1e-6, dps=40):
    """Central difference of U_k(xi) in one parameter, evaluated in ``dps`` digits."""
    import mpmath

    with mpmath.workdps(dps):
        x = mpmath.mpf(xi)

        def U(delta):
            e = [mpmath.mpf(v) for v in gamma.gammaE]
            r = [mpmath.mpf(v) for v in gamma.gammaR]
            if which == "E":
                e[m] += delta
            else:
                r[m - 1] += delta
            u_prev, u = mpmath.mpf(1), x - e[0]
            for j in range(1, k):
                u_prev, u = u, (x + (-1) ** (j + 1) * e[j]) * u - r[j - 1] * u_prev
            return u

        step = mpmath.mpf(h)
        return float((U(step) - U(-step)) / (2 * step))
