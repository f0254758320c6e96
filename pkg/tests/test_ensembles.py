import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faultgraph.ensembles import (
    Constant,
    ErSpec,
    General,
    PointSet,
    RggSpec,
    RigSpec,
    _decode_pairs,
    rgg_from_points,
    sample,
    sample_er,
    sample_points,
    sample_rgg,
    sample_rig,
    spec_from_dict,
    spec_to_dict,
)
from faultgraph.graph import Graph
from faultgraph.rng import stream


def within(freq_hits, trials, p, sigmas=3.0):
    sd = math.sqrt(p * (1 - p) / trials)
    return abs(freq_hits / trials - p) <= sigmas * sd


# --- ER ----------------------------------------------------------------------------

def test_er_trivial():
    rng = stream(1)
    assert sample_er(ErSpec(2, 1.0), rng).edges().tolist() == [[0, 1]]
    assert sample_er(ErSpec(5, 0.0), rng).edge_count == 0
    assert sample_er(ErSpec(6, 1.0), rng) == Graph.complete(6)
    assert sample_er(ErSpec(0, 0.5), rng).node_count == 0


def test_decode_pairs_exhaustive():
    n = 300
    idx = np.arange(n * (n - 1) // 2, dtype=np.int64)
    i, j = _decode_pairs(idx)
    expect = [(a, b) for b in range(n) for a in range(b)]
    assert list(zip(i.tolist(), j.tolist())) == expect


def test_er_triangle_frequency():
    trials = 100_000
    rng = stream(11)
    hits = sum(sample_er(ErSpec(3, 0.5), rng).edge_count == 3 for _ in range(trials))
    assert within(hits, trials, 1 / 8)


def test_er_edge_count_mean():
    n, p, trials = 40, 0.1, 10_000
    rng = stream(12)
    counts = np.array([sample_er(ErSpec(n, p), rng).edge_count for _ in range(trials)])
    m = n * (n - 1) // 2
    sd = math.sqrt(m * p * (1 - p) / trials)
    assert abs(counts.mean() - m * p) <= 3 * sd


def test_er_pair_marginals_uniform():
    # every pair index equally likely: chi-square over the 45 pairs of n=10
    from scipy.stats import chisquare

    rng = stream(13)
    n, p = 10, 0.2
    counts = np.zeros((n, n))
    for _ in range(20_000):
        e = sample_er(ErSpec(n, p), rng).edges()
        counts[e[:, 0], e[:, 1]] += 1
    obs = counts[np.triu_indices(n, 1)]
    assert chisquare(obs).pvalue > 0.001


def test_er_deterministic():
    a = sample_er(ErSpec(500, 0.02), stream(5, 1, 2))
    b = sample_er(ErSpec(500, 0.02), stream(5, 1, 2))
    c = sample_er(ErSpec(500, 0.02), stream(5, 1, 3))
    assert a == b and a != c


# --- RIG ---------------------------------------------------------------------------

def test_rig_trivial():
    rng = stream(2)
    assert sample_rig(RigSpec(4, 1, Constant(1)), rng) == Graph.complete(4)
    assert sample_rig(RigSpec(3, 2, Constant(2)), rng) == Graph.complete(3)
    with pytest.raises(ValueError):
        RigSpec(3, 2, Constant(3))


def test_rig_edge_probability():
    # disjoint pairs (0,1), (2,3), ... are independent; each is an edge with prob 1/100
    n, samples = 2000, 1000
    rng = stream(21)
    hits = 0
    for _ in range(samples):
        g = sample_rig(RigSpec(n, 100, Constant(1)), rng)
        hits += sum(g.has_edge(2 * i, 2 * i + 1) for i in range(n // 2))
    assert within(hits, samples * (n // 2), 0.01)


def test_rig_edge_probability_general_rings():
    # Pr[two rings of size K1, K2 from a pool of P intersect] = 1 - C(P-K1, K2)/C(P, K2)
    pool = 30
    dist = General(((2, 0.5), (4, 0.5)))
    rng = stream(22)
    samples, n = 3000, 200
    hits = 0
    for _ in range(samples):
        g = sample_rig(RigSpec(n, pool, dist), rng)
        hits += sum(g.has_edge(2 * i, 2 * i + 1) for i in range(n // 2))
    p = 0.0
    for a, qa in dist.pmf:
        for b, qb in dist.pmf:
            p += qa * qb * (1 - math.comb(pool - a, b) / math.comb(pool, b))
    assert within(hits, samples * (n // 2), p)


def test_rig_rings_are_uniform_subsets():
    from faultgraph import _kernels
    from scipy.stats import chisquare

    rng = stream(23)
    pool, size, reps = 12, 4, 20_000
    counts = np.zeros(pool)
    for _ in range(reps):
        keys, _ = _kernels.key_rings(pool, np.array([size], dtype=np.int64), rng.random(size))
        assert len(set(keys.tolist())) == size
        counts[keys] += 1
    assert chisquare(counts).pvalue > 0.001


def test_general_pmf_validation():
    with pytest.raises(ValueError, match="sums"):
        General(((1, 0.5), (2, 0.4)))
    d = General(((1, 0.25), (3, 0.75)))
    assert d.mean() == 2.5 and d.variance() == pytest.approx(0.75)


# --- RGG ---------------------------------------------------------------------------

def test_points():
    rng = stream(3)
    assert len(sample_points(0, rng)) == 0
    (x, y), = [sample_points(1, rng)[0]]
    assert 0 <= x <= 1 and 0 <= y <= 1
    pts = sample_points(100_000, rng)
    sd = math.sqrt(1 / 12 / 100_000)
    assert abs(pts.xs.mean() - 0.5) <= 3 * sd and abs(pts.ys.mean() - 0.5) <= 3 * sd


def test_point_csv_round_trip():
    pts = sample_points(20, stream(4))
    back = PointSet.from_csv(pts.to_csv())
    assert np.array_equal(back.xs, pts.xs) and np.array_equal(back.ys, pts.ys)


def test_rgg_trivial():
    pts = sample_points(30, stream(6))
    assert rgg_from_points(pts, math.sqrt(2)) == Graph.complete(30)
    assert rgg_from_points(pts, 1e-12).edge_count == 0
    line = PointSet([0.0, 0.5, 1.0], [0.0, 0.0, 0.0])
    assert rgg_from_points(line, 0.5) == Graph.path(3)
    g, pts = sample_rgg(RggSpec(2, math.sqrt(2)), stream(7))
    assert g.edge_count == 1
    g, pts = sample_rgg(RggSpec(0, 0.1), stream(7))
    assert g.node_count == 0 and len(pts) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100), st.floats(0.01, 0.6), st.integers(0, 2**32))
def test_rgg_matches_direct_distances(n, r, seed):
    pts = sample_points(n, stream(seed))
    g = rgg_from_points(pts, r)
    dx = pts.xs[:, None] - pts.xs[None, :]
    dy = pts.ys[:, None] - pts.ys[None, :]
    adj = (dx * dx + dy * dy <= r * r) & ~np.eye(n, dtype=bool)
    iu = np.triu_indices(n, 1)
    expect = np.stack([iu[0][adj[iu]], iu[1][adj[iu]]], axis=1)
    assert np.array_equal(g.edges(), expect.reshape(-1, 2))


def test_rgg_permutation_invariance():
    pts = sample_points(300, stream(8))
    perm = stream(9).permutation(300)
    g = rgg_from_points(pts, 0.08)
    h = rgg_from_points(PointSet(pts.xs[perm], pts.ys[perm]), 0.08)
    assert np.array_equal(np.sort(g.degrees()), np.sort(h.degrees()))
    assert np.array_equal(g.degrees()[perm], h.degrees())


def test_rgg_two_point_edge_probability():
    # disjoint pairs of i.i.d. points are independent two-point graphs
    r, n, samples = 0.3, 400, 500
    hits = 0
    for t in range(samples):
        g, _ = sample_rgg(RggSpec(n, r), stream(10, t))
        hits += sum(g.has_edge(2 * i, 2 * i + 1) for i in range(n // 2))
    p = math.pi * r * r - 8 * r**3 / 3 + r**4 / 2
    assert within(hits, samples * (n // 2), p)


# --- homogeneity ----------------------------------------------------------------------

@pytest.mark.parametrize("spec", [ErSpec(12, 0.25), RigSpec(12, 40, Constant(4)), RggSpec(12, 0.35)])
def test_nodes_exchangeable(spec):
    # node-i.i.d. ensembles: the degree of the first and of the last node share one law
    from scipy.stats import ks_2samp

    first, last, pair_first, pair_last = [], [], 0, 0
    trials = 4000
    for t in range(trials):
        g = sample(spec, stream(30, t))
        d = g.degrees()
        first.append(int(d[0]))
        last.append(int(d[-1]))
        pair_first += g.has_edge(0, 1)
        pair_last += g.has_edge(spec.n - 2, spec.n - 1)
    assert ks_2samp(first, last).pvalue > 0.001
    sd = math.sqrt(2 * 0.25 / trials)
    assert abs(pair_first - pair_last) / trials <= 4 * sd


def test_spec_dict_round_trip():
    for spec in (ErSpec(10, 0.3), RggSpec(5, 0.2), RigSpec(7, 30, Constant(3)),
                 RigSpec(7, 30, General(((2, 0.5), (3, 0.5))))):
        assert spec_from_dict(spec_to_dict(spec)) == spec
    with pytest.raises(ValueError):
        spec_from_dict({"family": "ba"})
