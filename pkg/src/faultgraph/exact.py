"""Exact breakdown probabilities for tiny ER ensembles by full enumeration.

All 2^M labeled graphs are weighted by p^|E| (1-p)^(M-|E|) and every fault
subset by its Bernoulli weight (or uniformly over the C(n, s) subsets for the
conditional version). Connectivity of each induced subgraph is decided by the
brute-force oracle, never by the flow-based checker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .ensembles import ErSpec
from .faults import binomial_pmf
from .graph import DEFAULT_POLICY, ConnectivityPolicy, Graph, is_k_connected_bruteforce
from .montecarlo import FixedSurvivors

EXACT_MAX_NODES = 6


def _pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


@lru_cache(maxsize=None)
def _breakdown_table(s: int, k: int, policy: ConnectivityPolicy) -> np.ndarray:
    """Indicator (not k-connected) for every labeled graph on s nodes, indexed by edge mask."""
    pairs = _pairs(s)
    out = np.empty(1 << len(pairs), dtype=np.float64)
    for mask in range(out.shape[0]):
        us = [a for b, (a, _) in enumerate(pairs) if mask >> b & 1]
        vs = [c for b, (_, c) in enumerate(pairs) if mask >> b & 1]
        g = Graph.from_edges(s, us, vs)
        out[mask] = 0.0 if is_k_connected_bruteforce(g, k, policy) else 1.0
    out.flags.writeable = False
    return out


def _graph_weights(n: int, p: float) -> np.ndarray:
    m = n * (n - 1) // 2
    masks = np.arange(1 << m, dtype=np.int64)
    edges = np.zeros(masks.shape, dtype=np.int64)
    for b in range(m):
        edges += (masks >> b) & 1
    w = np.power(p, edges) * np.power(1.0 - p, m - edges)
    return w / math.fsum(w)  # products of rounded powers can total 1 + O(ulp)


@lru_cache(maxsize=64)
def _subset_values(n: int, p: float, k: int, policy: ConnectivityPolicy) -> dict[tuple, float]:
    """For every survivor subset S: sum over graphs G of P(G) * [G[S] not k-connected]."""
    pairs = _pairs(n)
    index = {pr: b for b, pr in enumerate(pairs)}
    masks = np.arange(1 << len(pairs), dtype=np.int64)
    weights = _graph_weights(n, p)
    values = {}
    for s in range(n + 1):
        table = _breakdown_table(s, k, policy)
        for alive in combinations(range(n), s):
            induced = np.zeros(masks.shape, dtype=np.int64)
            for j, (a, b) in enumerate(combinations(alive, 2)):
                induced |= ((masks >> index[(a, b)]) & 1) << j
            values[alive] = math.fsum(weights * table[induced])
    return values


def _check(spec: ErSpec, k: int, epsilon: float) -> None:
    if spec.n > EXACT_MAX_NODES:
        raise ValueError(f"exact enumeration limited to n <= {EXACT_MAX_NODES}, got {spec.n}")
    if k < 1:
        raise ValueError("k must be positive")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")


def exact_breakdown_small(spec: ErSpec, k: int, epsilon: float,
                          conditioning: FixedSurvivors | None = None,
                          policy: ConnectivityPolicy = DEFAULT_POLICY) -> float:
    """Exact P(survival graph not k-connected) for G(n, p) with n <= 6."""
    _check(spec, k, epsilon)
    n = spec.n
    values = _subset_values(n, spec.p, k, policy)
    if conditioning is not None:
        s = conditioning.s
        if not 0 <= s <= n:
            raise ValueError(f"survivor count {s} outside [0, {n}]")
        terms = [v for alive, v in values.items() if len(alive) == s]
        return min(1.0, math.fsum(terms) / math.comb(n, s))
    kappa = 1.0 - epsilon
    return min(1.0, math.fsum(v * epsilon ** (n - len(alive)) * kappa ** len(alive)
                     for alive, v in values.items()))


def exact_conditional_profile(spec: ErSpec, k: int,
                              policy: ConnectivityPolicy = DEFAULT_POLICY) -> list[float]:
    """Exact order-s breakdown probability for every s in 0..n."""
    _check(spec, k, 0.0)
    n = spec.n
    values = _subset_values(n, spec.p, k, policy)
    return [min(1.0, math.fsum(v for alive, v in values.items() if len(alive) == s) / math.comb(n, s))
            for s in range(n + 1)]


@dataclass(frozen=True)
class MixtureReport:
    lhs: float
    rhs: float
    abs_error: float


def verify_mixture_identity(spec: ErSpec, k: int, epsilon: float,
                            policy: ConnectivityPolicy = DEFAULT_POLICY) -> MixtureReport:
    """Joint breakdown probability against its binomial mixture over survivor counts."""
    _check(spec, k, epsilon)
    lhs = exact_breakdown_small(spec, k, epsilon, policy=policy)
    profile = exact_conditional_profile(spec, k, policy)
    kappa = 1.0 - epsilon
    rhs = math.fsum(binomial_pmf(s, spec.n, kappa) * q for s, q in enumerate(profile))
    return MixtureReport(lhs, rhs, abs(lhs - rhs))
