import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq
from scipy.stats import norm

from faultgraph.ensembles import Constant, ErSpec, RggSpec, RigSpec
from faultgraph.exact import exact_breakdown_small
from faultgraph.graph import is_k_connected
from faultgraph.montecarlo import (
    CHUNK,
    EstimateRequest,
    FixedSurvivors,
    _count_chunk_coupled,
    estimate_breakdown,
    estimate_breakdown_conditional,
    pool_for_ratio,
    sample_trial_graph,
    sweep,
    wilson_interval,
)


def score_interval(x, n, conf):
    # numeric inversion of the score test |p_hat - p| / sqrt(p(1-p)/n) = z
    z = norm.ppf(0.5 + conf / 2)
    ph = x / n

    def f(p):
        return abs(ph - p) - z * math.sqrt(p * (1 - p) / n)

    tiny = 1e-13  # f < 0 just beside p_hat
    lo = 0.0 if x == 0 else brentq(f, 1e-15, ph - tiny, xtol=1e-15)
    hi = 1.0 if x == n else brentq(f, ph + tiny, 1 - 1e-15, xtol=1e-15)
    return lo, hi


# --- Wilson interval ---------------------------------------------------------------

def test_wilson_examples():
    lo, hi = wilson_interval(50, 100, 0.95)
    assert lo == pytest.approx(0.4038, abs=1e-3) and hi == pytest.approx(0.5962, abs=1e-3)
    assert wilson_interval(0, 40)[0] == 0.0
    assert wilson_interval(40, 40)[1] == 1.0
    with pytest.raises(ValueError):
        wilson_interval(5, 3)


@given(st.integers(1, 5000), st.data(), st.sampled_from([0.8, 0.95, 0.99]))
def test_wilson_matches_score_inversion(n, data, conf):
    x = data.draw(st.integers(0, n))
    lo, hi = wilson_interval(x, n, conf)
    rlo, rhi = score_interval(x, n, conf)
    assert lo == pytest.approx(rlo, abs=1e-9) and hi == pytest.approx(rhi, abs=1e-9)
    assert 0 <= lo <= x / n <= hi <= 1


# --- point estimates -----------------------------------------------------------------

def test_trivial_estimates():
    est = estimate_breakdown(EstimateRequest(ErSpec(20, 1.0), 1, 0.0, trials=300, master_seed=1))
    assert est.p_hat == 0.0 and est.successes == 0
    for spec in (ErSpec(30, 0.5), RigSpec(30, 50, Constant(5)), RggSpec(30, 0.3)):
        est = estimate_breakdown(EstimateRequest(spec, 2, 1.0, trials=300, master_seed=1))
        assert est.p_hat == 1.0


def test_request_validation():
    with pytest.raises(ValueError):
        EstimateRequest(ErSpec(5, 0.5), 0, 0.1)
    with pytest.raises(ValueError):
        EstimateRequest(ErSpec(5, 0.5), 1, 1.1)
    with pytest.raises(ValueError):
        EstimateRequest(ErSpec(5, 0.5), 1, 0.1, trials=0)
    with pytest.raises(ValueError):
        estimate_breakdown(EstimateRequest(ErSpec(5, 0.5), 1, 0.1, conditioning=FixedSurvivors(2)))
    with pytest.raises(ValueError):
        estimate_breakdown_conditional(EstimateRequest(ErSpec(5, 0.5), 1, 0.1))


def inside99(est, target):
    lo, hi = wilson_interval(est.successes, est.trials, 0.99)
    return lo <= target <= hi


def test_matches_exact_annealed():
    req = EstimateRequest(ErSpec(5, 0.5), 1, 0.3, trials=20_000, master_seed=2)
    assert inside99(estimate_breakdown(req), exact_breakdown_small(ErSpec(5, 0.5), 1, 0.3))


def test_matches_exact_conditional():
    req = EstimateRequest(ErSpec(6, 0.6), 1, 0.0, trials=20_000, master_seed=3,
                          conditioning=FixedSurvivors(4))
    exact = exact_breakdown_small(ErSpec(6, 0.6), 1, 0.0, conditioning=FixedSurvivors(4))
    assert inside99(estimate_breakdown_conditional(req), exact)


def test_conditional_edges():
    req = EstimateRequest(ErSpec(8, 0.7), 1, 0.5, trials=500, master_seed=4,
                          conditioning=FixedSurvivors(0))
    assert estimate_breakdown_conditional(req).p_hat == 1.0
    with pytest.raises(ValueError):
        estimate_breakdown_conditional(EstimateRequest(ErSpec(8, 0.7), 1, 0.5,
                                                       conditioning=FixedSurvivors(9)))


def test_oracle_lattice():
    inside = total = 0
    for n in (3, 4, 5, 6):
        for p in (0.3, 0.7):
            for eps in (0.1, 0.4):
                for k in (1, 2):
                    req = EstimateRequest(ErSpec(n, p), k, eps, trials=4000,
                                          master_seed=100 * n + k)
                    inside += inside99(estimate_breakdown(req), exact_breakdown_small(ErSpec(n, p), k, eps))
                    total += 1
    assert inside >= 0.95 * total


def test_thread_count_does_not_matter():
    req = EstimateRequest(ErSpec(300, 0.02), 2, 0.2, trials=3 * CHUNK + 17, master_seed=5)
    assert estimate_breakdown(req, threads=1) == estimate_breakdown(req, threads=3)
    rows1 = sweep(req, "p", [0.01, 0.02, 0.04], couple=True, threads=1)
    rows2 = sweep(req, "p", [0.01, 0.02, 0.04], couple=True, threads=2)
    assert rows1 == rows2


def test_trial_stream_reproducible():
    req = EstimateRequest(ErSpec(40, 0.1), 1, 0.3, trials=50, master_seed=6)
    hits = sum(not is_k_connected(sample_trial_graph(req, t), 1) for t in range(50))
    assert hits == estimate_breakdown(req).successes


def test_quenched_differs_but_is_valid():
    req = EstimateRequest(ErSpec(60, 0.08), 1, 0.3, trials=400, master_seed=7, quenched=True)
    est = estimate_breakdown(req)
    assert 0 <= est.ci_low <= est.p_hat <= est.ci_high <= 1


# --- sweeps ------------------------------------------------------------------------------

def test_single_point_sweep_matches_estimate():
    req = EstimateRequest(ErSpec(100, 0.05), 1, 0.2, trials=600, master_seed=8)
    row, = sweep(req, "p", [0.05])
    assert row.estimate == estimate_breakdown(req)
    assert row.as_dict()["axis_name"] == "p" and row.n == 100


def test_epsilon_endpoints():
    req = EstimateRequest(ErSpec(200, 0.2), 1, 0.0, trials=300, master_seed=9)
    rows = sweep(req, "epsilon", [0.0, 1.0])
    assert [r.estimate.p_hat for r in rows] == [0.0, 1.0]


@pytest.mark.parametrize("axis,spec,values", [
    ("p", ErSpec(150, 0.01), [0.01, 0.02, 0.03, 0.05]),
    ("r", RggSpec(150, 0.05), [0.05, 0.1, 0.15, 0.2]),
    ("epsilon", ErSpec(150, 0.04), [0.6, 0.4, 0.2, 0.0]),
])
def test_coupled_indicator_monotone_per_trial(axis, spec, values):
    req = EstimateRequest(spec, 1, 0.3, trials=CHUNK, master_seed=10)
    hits = _count_chunk_coupled(req, axis, tuple(values), 0, CHUNK)
    assert all(a >= b for a, b in zip(hits, hits[1:]))
    rows = sweep(req, axis, values, couple=True)
    p = [r.estimate.p_hat for r in rows]
    assert p == sorted(p, reverse=True)


def test_coupled_point_matches_marginal_law():
    # each coupled point is still a correct estimate of its own parameter
    req = EstimateRequest(ErSpec(5, 0.1), 1, 0.3, trials=20_000, master_seed=11)
    for row in sweep(req, "p", [0.2, 0.6], couple=True):
        assert inside99(row.estimate, exact_breakdown_small(ErSpec(5, row.axis_value), 1, 0.3))


def test_sweep_errors():
    req = EstimateRequest(ErSpec(10, 0.5), 1, 0.1, trials=10)
    with pytest.raises(ValueError, match="empty"):
        sweep(req, "p", [])
    with pytest.raises(ValueError, match="point 1"):
        sweep(req, "p", [0.5, 1.5])
    with pytest.raises(ValueError):
        sweep(req, "r", [0.1])
    with pytest.raises(ValueError):
        sweep(req, "n", [10], couple=True)


def test_ratio_axis_and_n_axis():
    spec = RigSpec(100, 500, Constant(10))
    assert pool_for_ratio(spec, 0.2) == 500
    req = EstimateRequest(spec, 1, 0.2, trials=200, master_seed=12)
    rows = sweep(req, "ratio", [0.05, 0.2])
    assert [r.axis_value for r in rows] == [0.05, 0.2]
    rows = sweep(EstimateRequest(ErSpec(10, 0.5), 1, 0.1, trials=50), "n", [5, 10, 20])
    assert [r.n for r in rows] == [5, 10, 20]


def test_estimates_in_unit_interval():
    rng = np.random.default_rng(13)
    for _ in range(10):
        req = EstimateRequest(ErSpec(int(rng.integers(2, 40)), float(rng.random())),
                              int(rng.integers(1, 4)), float(rng.random()), trials=97,
                              master_seed=int(rng.integers(0, 2**63)))
        e = estimate_breakdown(req)
        assert 0 <= e.ci_low <= e.p_hat <= e.ci_high <= 1
