import math
from itertools import combinations, product

import networkx as nx
import pytest

from faultgraph.ensembles import ErSpec
from faultgraph.exact import (
    exact_breakdown_small,
    exact_conditional_profile,
    verify_mixture_identity,
)
from faultgraph.graph import ConnectivityPolicy
from faultgraph.montecarlo import FixedSurvivors


def naive_breakdown(n, p, k, eps):
    # independent oracle: networkx connectivity over every (graph, fault set) pair
    pairs = list(combinations(range(n), 2))
    total = 0.0
    for bits in product((0, 1), repeat=len(pairs)):
        w_graph = math.prod(p if b else 1 - p for b in bits)
        g = nx.Graph()
        g.add_nodes_from(range(n))
        g.add_edges_from(pr for pr, b in zip(pairs, bits) if b)
        for alive in product((0, 1), repeat=n):
            w = w_graph * math.prod(1 - eps if a else eps for a in alive)
            h = g.subgraph([v for v in range(n) if alive[v]])
            s = h.number_of_nodes()
            ok = s >= k + 1 and nx.node_connectivity(h) >= k
            total += w * (not ok)
    return total


@pytest.mark.parametrize("p", [0.0, 0.3, 0.5, 1.0])
def test_two_nodes(p):
    assert exact_breakdown_small(ErSpec(2, p), 1, 0.0) == pytest.approx(1 - p, abs=1e-15)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
def test_three_nodes(p):
    expect = 1 - p**3 - 3 * p**2 * (1 - p)
    assert exact_breakdown_small(ErSpec(3, p), 1, 0.0) == pytest.approx(expect, abs=1e-15)


@pytest.mark.parametrize("eps", [0.1, 0.3, 0.7])
def test_complete_triangle_under_faults(eps):
    # a single survivor is not 1-connected under the default convention
    expect = eps**3 + 3 * eps**2 * (1 - eps)
    assert exact_breakdown_small(ErSpec(3, 1.0), 1, eps) == pytest.approx(expect, abs=1e-15)
    # the vacuous convention keeps single survivors and the empty graph connected
    vac = exact_breakdown_small(ErSpec(3, 1.0), 1, eps, policy=ConnectivityPolicy.EMPTY_CONNECTED)
    assert vac == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("n,p,k,eps", [(3, 0.4, 1, 0.2), (4, 0.5, 1, 0.3), (4, 0.7, 2, 0.1),
                                       (4, 0.6, 3, 0.05)])
def test_against_naive_enumeration(n, p, k, eps):
    assert exact_breakdown_small(ErSpec(n, p), k, eps) == pytest.approx(
        naive_breakdown(n, p, k, eps), abs=1e-13)


def test_conditional_matches_smaller_ensemble():
    # homogeneity: the order-s survival ensemble of G(n, p) is G(s, p)
    profile = exact_conditional_profile(ErSpec(5, 0.6), 2)
    for s in range(6):
        direct = exact_breakdown_small(ErSpec(s, 0.6), 2, 0.0) if s else 1.0
        assert profile[s] == pytest.approx(direct, abs=1e-14)
        cond = exact_breakdown_small(ErSpec(5, 0.6), 2, 0.4, conditioning=FixedSurvivors(s))
        assert cond == pytest.approx(profile[s], abs=1e-15)


def test_mixture_identity_examples():
    assert verify_mixture_identity(ErSpec(4, 0.5), 1, 0.3).abs_error <= 1e-12
    assert verify_mixture_identity(ErSpec(5, 0.3), 2, 0.5).abs_error <= 1e-12
    rep = verify_mixture_identity(ErSpec(4, 0.5), 1, 0.0)
    assert rep.lhs == pytest.approx(exact_conditional_profile(ErSpec(4, 0.5), 1)[4], abs=1e-15)


def test_guards():
    with pytest.raises(ValueError, match="n <= 6"):
        exact_breakdown_small(ErSpec(7, 0.5), 1, 0.1)
    with pytest.raises(ValueError):
        exact_breakdown_small(ErSpec(3, 0.5), 0, 0.1)
    with pytest.raises(ValueError):
        exact_breakdown_small(ErSpec(3, 0.5), 1, 0.1, conditioning=FixedSurvivors(4))
