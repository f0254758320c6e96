"""Node fault process: i.i.d. node failures and survival graphs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, _induced_by_mask


@dataclass(frozen=True)
class FaultSpec:
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")

    @property
    def kappa(self) -> float:
        return 1.0 - self.epsilon


@dataclass(frozen=True)
class FaultTrial:
    fault_set: np.ndarray  # sorted failed node indices of the original graph
    survivor_count: int
    survival_graph: Graph

    def to_json(self) -> str:
        return json.dumps({"fault_set": self.fault_set.tolist(), "s": self.survivor_count})


def _trial(g: Graph, failed: np.ndarray) -> FaultTrial:
    survival = _induced_by_mask(g, ~failed)
    return FaultTrial(np.flatnonzero(failed), survival.node_count, survival)


def sample_survival(g: Graph, spec: FaultSpec, rng: np.random.Generator) -> FaultTrial:
    """Each node fails independently with probability ``spec.epsilon``."""
    failed = rng.random(g.node_count) < spec.epsilon
    return _trial(g, failed)


def sample_survival_conditional(g: Graph, s: int, rng: np.random.Generator) -> FaultTrial:
    """Exactly ``s`` survivors; every (n - s)-subset of nodes is equally likely to fail."""
    n = g.node_count
    if not 0 <= s <= n:
        raise ValueError(f"survivor count {s} outside [0, {n}]")
    failed = np.zeros(n, dtype=bool)
    failed[rng.choice(n, size=n - s, replace=False)] = True
    return _trial(g, failed)


# Loader's saddle-point evaluation of the binomial pmf.

_S0, _S1, _S2, _S3, _S4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)
_STIRLERR_SMALL = [0.0] + [
    math.lgamma(m + 1.0) - (m + 0.5) * math.log(m) + m - _HALF_LOG_2PI for m in range(1, 16)
]


def _stirlerr(m: int) -> float:
    # log(m!) - log(sqrt(2 pi m) (m/e)^m)
    if m <= 15:
        return _STIRLERR_SMALL[m]
    mm = float(m) * m
    if m > 500:
        return (_S0 - _S1 / mm) / m
    if m > 80:
        return (_S0 - (_S1 - _S2 / mm) / mm) / m
    if m > 35:
        return (_S0 - (_S1 - (_S2 - _S3 / mm) / mm) / mm) / m
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / mm) / mm) / mm) / mm) / m


def _bd0(x: float, mu: float) -> float:
    # x log(x/mu) + mu - x, without cancellation near x = mu
    if abs(x - mu) < 0.1 * (x + mu):
        v = (x - mu) / (x + mu)
        s = (x - mu) * v
        ej = 2 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / mu) + mu - x


def binomial_pmf(s: int, n: int, kappa: float) -> float:
    """C(n, s) (1 - kappa)^(n - s) kappa^s, evaluated in log space."""
    if not 0 <= s <= n:
        raise ValueError(f"s={s} outside [0, n={n}]")
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("kappa must lie in [0, 1]")
    p, q = kappa, 1.0 - kappa
    if p == 0.0:
        return 1.0 if s == 0 else 0.0
    if q == 0.0:
        return 1.0 if s == n else 0.0
    if n <= 60:
        # exact integer coefficient; a handful of roundings at most
        direct = math.comb(n, s) * p**s * q ** (n - s)
        if direct > 1e-280:
            return direct
    if s == 0:
        lc = -_bd0(n, n * q) - n * p if p < 0.1 else n * math.log(q)
        return math.exp(lc)
    if s == n:
        lc = -_bd0(n, n * p) - n * q if q < 0.1 else n * math.log(p)
        return math.exp(lc)
    lc = (_stirlerr(n) - _stirlerr(s) - _stirlerr(n - s)
          - _bd0(s, n * p) - _bd0(n - s, n * q))
    lf = math.log(2 * math.pi) + math.log(s) + math.log1p(-s / n)
    return math.exp(lc - 0.5 * lf)
