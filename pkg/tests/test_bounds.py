import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from saddlebounds import (
    EigenvalueBounds,
    GammaAssignment,
    IndicatorSet,
    ParameterError,
    bounds_for,
    bounds_n2_closed,
    bounds_n2_rect,
    compute_bounds,
    compute_bounds_bruteforce,
    containment,
    corner_assignments,
    roots_U,
)
from saddlebounds.randgen import SuiteConfig

from conftest import FIXTURES, random_indicators

PHI = (1 + np.sqrt(5)) / 2
DEGEN_N1 = IndicatorSet([1, 0], [1, 0], [1], [1])
DEGEN_N2 = IndicatorSet([1, 0, 0], [1, 0, 0], [1, 1], [1, 1])


def load_table(tag):
    return IndicatorSet.from_json((FIXTURES / f"table_delta_{tag}.json").read_text())


def test_n1_classical_bounds():
    b = compute_bounds(DEGEN_N1)
    np.testing.assert_allclose(b.neg, (1 - PHI, 1 - PHI), atol=1e-12)
    np.testing.assert_allclose(b.pos, (1, PHI), atol=1e-12)
    assert b.is_consistent()


def test_n2_degenerate_bounds():
    cubic = np.sort(np.roots([1, -1, -2, 1]).real)
    b = compute_bounds(DEGEN_N2)
    np.testing.assert_allclose(b.neg, (cubic[0], 1 - PHI), atol=1e-12)
    np.testing.assert_allclose(b.pos, (cubic[1], cubic[2]), atol=1e-12)
    np.testing.assert_allclose(b.endpoints, [-1.2470, -0.6180, 0.4450, 1.8019], atol=5e-5)


def test_degenerate_corners_coincide():
    corners = corner_assignments(DEGEN_N2)
    assert len(set(corners.values())) == 1


def test_n2_corner_layout():
    ind = IndicatorSet([0.1, 0.2, 0.3], [1.1, 1.2, 1.3], [0.4, 0.5], [1.4, 1.5])
    c = corner_assignments(ind)
    # interleaved order (γE0, γE1, γR1, γE2, γR2)
    assert c["negLB"].as_tuple() == (0.1, 1.2, 1.4, 0.3, 1.5)
    assert c["posUB"].as_tuple() == (1.1, 0.2, 1.4, 1.3, 1.5)


def test_bruteforce_degenerate_identical():
    for ind in (DEGEN_N1, DEGEN_N2):
        np.testing.assert_allclose(compute_bounds_bruteforce(ind).endpoints,
                                   compute_bounds(ind).endpoints, atol=1e-12)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_linear_equals_bruteforce(N):
    rng = np.random.default_rng(1000 + N)
    for _ in range(100):
        ind = random_indicators(rng, N)
        lin = compute_bounds(ind).endpoints
        bf = compute_bounds_bruteforce(ind).endpoints
        assert np.max(np.abs(lin - bf)) <= 1e-10


def test_table1_grid_corners_n2():
    cfg = SuiteConfig.from_grid(2, "table1")
    combos = cfg.combinations()
    assert len(combos) == 729
    for _, ends in combos[::7]:
        ind = IndicatorSet([ends[0], 0, 0], [ends[1], 0, 0], ends[2::2], ends[3::2])
        assert np.max(np.abs(compute_bounds(ind).endpoints - compute_bounds_bruteforce(ind).endpoints)) <= 1e-10


def test_closed_form_examples():
    cubic = np.sort(np.roots([1, -1, -2, 1]).real)
    assert bounds_n2_closed(DEGEN_N2).pos[0] == pytest.approx(min(1.0, cubic[1]), abs=1e-12)
    ind = IndicatorSet([0.2, 0.1, 0.0], [1.7, 0.6, 0.4], [0.3, 0.2], [2.0, 1.1])
    quad = roots_U(2, GammaAssignment([1.7, 0.1], [0.3]))
    assert bounds_n2_closed(ind).neg[1] == pytest.approx(quad.largest_negative, abs=1e-12)
    with pytest.raises(ParameterError):
        bounds_n2_closed(DEGEN_N1)


def test_closed_form_equals_linear():
    rng = np.random.default_rng(77)
    for _ in range(100):
        ind = random_indicators(rng, 2)
        np.testing.assert_allclose(bounds_n2_closed(ind).endpoints, compute_bounds(ind).endpoints,
                                   rtol=0, atol=1e-12)


@pytest.mark.parametrize("tag,lb,ub", [
    ("1e-3", 0.0101, 1.6958),
    ("1e-4", 0.0424, 1.6706),
    ("1e-5", 0.2565, 1.6859),
    ("1e-6", 0.9601, 1.5241),
])
def test_rect_table_rows(tag, lb, ub):
    b = bounds_n2_rect(load_table(tag))
    assert abs(b.pos[0] - lb) <= 1e-2
    assert abs(b.pos[1] - ub) <= 1e-2
    assert b.extra == (0.9976, 1.0001)
    assert b.provenance["hulled"]
    assert b.is_consistent()


def test_rect_cubic_endpoints_match_full_corner_sweep(rng):
    for _ in range(60):
        lo = 10 ** rng.uniform(-4, 0.3, 5)
        hi = lo * 10 ** rng.uniform(1e-3, 2, 5)
        ind = IndicatorSet(lo[:3], hi[:3], lo[3:], hi[3:], rect_tail=True)
        roots = []
        for bits in itertools.product((0, 1), repeat=5):
            e = [(lo, hi)[bits[i]][i] for i in range(3)]
            r = [(lo, hi)[bits[3 + i]][3 + i] for i in range(2)]
            roots.append(roots_U(3, GammaAssignment(e, r)).roots)
        neg_lb = min(r[0] for r in roots)
        neg_ub = max(r[r < 0].max() for r in roots)
        pos_lb = min(r[r > 0].min() for r in roots)
        pos_ub = max(r[-1] for r in roots)
        b = bounds_n2_rect(ind)
        np.testing.assert_allclose(b.neg, (neg_lb, neg_ub), rtol=1e-10, atol=0)
        np.testing.assert_allclose(b.provenance["I3_pos"], (pos_lb, pos_ub), rtol=1e-10, atol=0)


def test_rect_requires_flag_and_n2():
    with pytest.raises(ParameterError):
        bounds_n2_rect(DEGEN_N2)
    with pytest.raises(ParameterError):
        compute_bounds(load_table("1e-3"))
    assert bounds_for(load_table("1e-3")).provenance["method"] == "n2-rect"
    assert bounds_for(DEGEN_N2).provenance["method"] == "linear"
    with pytest.raises(ParameterError):
        bounds_for(DEGEN_N2, "quartic")


def test_containment_closed_intervals():
    b = compute_bounds(DEGEN_N1)
    assert containment(b, b.endpoints).passed
    rep = containment(b, [0.0])
    assert not rep.passed and rep.n_outside == 1
    assert not containment(b, [1.7]).passed
    assert containment(b, [PHI * (1 + 5e-9)]).passed


def _widen(rng, ind):
    """Enlarge one randomly chosen interval, keeping admissibility."""
    aE, bE, aR, bR = (list(v) for v in (ind.alphaE, ind.betaE, ind.alphaR, ind.betaR))
    f_lo, f_hi = rng.uniform(0.3, 1.0), rng.uniform(1.0, 3.0)
    if rng.random() < 0.5:
        j = rng.integers(len(aE))
        aE[j] *= f_lo
        bE[j] = bE[j] * f_hi if bE[j] > 0 else rng.uniform(0, 1)
    else:
        j = rng.integers(len(aR))
        aR[j] *= f_lo
        bR[j] *= f_hi
    return IndicatorSet(aE, bE, aR, bR).validate()


def test_widening_never_shrinks():
    rng = np.random.default_rng(5)
    for _ in range(100):
        inner = random_indicators(rng, int(rng.integers(1, 5)))
        outer = _widen(rng, inner)
        bi, bo = compute_bounds(inner), compute_bounds(outer)
        tol = 1e-12
        assert bo.neg[0] <= bi.neg[0] + tol and bo.neg[1] >= bi.neg[1] - tol
        assert bo.pos[0] <= bi.pos[0] + tol and bo.pos[1] >= bi.pos[1] - tol


def test_extreme_roots_grow_with_degree():
    rng = np.random.default_rng(9)
    for _ in range(50):
        N = int(rng.integers(1, 6))
        ind = random_indicators(rng, N)
        c = corner_assignments(ind)
        top = N + 1
        lo_top = roots_U(top, c["negLB"]).roots[0]
        hi_top = roots_U(top, c["posUB"]).roots[-1]
        for k in range(1, top):
            assert lo_top < roots_U(k, c["negLB"]).roots[0]
            assert hi_top > roots_U(k, c["posUB"]).roots[-1]


def test_provenance_records_degrees():
    b = compute_bounds(DEGEN_N1)
    assert b.provenance["pos_lb"]["degrees"] == [1]
    assert b.provenance["neg_lb"]["degrees"] == [2]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_bounds_json_round_trip(N, seed):
    b = compute_bounds(random_indicators(np.random.default_rng(seed), N))
    again = EigenvalueBounds.from_dict(json.loads(json.dumps(b.to_dict())))
    assert again == b
    assert again.provenance == json.loads(json.dumps(b.provenance))
