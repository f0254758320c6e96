"""Monte Carlo estimation of the network breakdown probability.

A trial draws a fresh graph from the ensemble, then a fresh fault set, and
records a breakdown when the survival graph is not k-connected. Trial ``j``
of sweep point ``i`` always uses ``rng.stream(master_seed, i, j)``, and trials
are reduced by integer summation, so results do not depend on the worker
count or on scheduling.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from statistics import NormalDist
from typing import Sequence

import numpy as np

from . import _kernels
from .ensembles import (
    EnsembleSpec,
    ErSpec,
    RggSpec,
    RigSpec,
    er_edges,
    rig_edges,
    sample_points,
    with_n,
)
from .graph import DEFAULT_POLICY, ConnectivityPolicy, Graph, is_k_connected
from .rng import check_seed, stream

CHUNK = 250
AXES = ("p", "r", "ratio", "epsilon", "n")


@dataclass(frozen=True)
class FixedSurvivors:
    s: int


@dataclass(frozen=True)
class EstimateRequest:
    ensemble: EnsembleSpec
    k: int
    epsilon: float
    trials: int = 10_000
    master_seed: int = 0
    conditioning: FixedSurvivors | None = None
    confidence: float = 0.95
    policy: ConnectivityPolicy = DEFAULT_POLICY
    quenched: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")
        check_seed(self.master_seed)
        if self.conditioning is not None and not 0 <= self.conditioning.s <= self.ensemble.n:
            raise ValueError(
                f"survivor count {self.conditioning.s} outside [0, {self.ensemble.n}]")


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    successes: int
    trials: int
    ci_low: float
    ci_high: float
    confidence: float
    master_seed: int


@dataclass(frozen=True)
class SweepRow:
    axis_name: str
    axis_value: float
    n: int
    k: int
    epsilon: float
    estimate: Estimate

    def as_dict(self) -> dict:
        e = self.estimate
        return {
            "axis_name": self.axis_name, "axis_value": self.axis_value, "n": self.n,
            "k": self.k, "epsilon": self.epsilon, "trials": e.trials,
            "successes": e.successes, "p_hat": e.p_hat, "ci_low": e.ci_low,
            "ci_high": e.ci_high, "seed": e.master_seed,
        }


SWEEP_COLUMNS = ("axis_name", "axis_value", "n", "k", "epsilon", "trials", "successes",
                 "p_hat", "ci_low", "ci_high", "seed")


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError("need 0 <= successes <= trials and trials >= 1")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2) / (1 + z2n)
    half = z * math.sqrt(p * (1 - p) / trials + z2n / (4 * trials)) / (1 + z2n)
    low = 0.0 if successes == 0 else max(0.0, min(p, center - half))
    high = 1.0 if successes == trials else min(1.0, max(p, center + half))
    return low, high


def _make_estimate(successes: int, trials: int, confidence: float, seed: int) -> Estimate:
    low, high = wilson_interval(successes, trials, confidence)
    return Estimate(successes / trials, successes, trials, low, high, confidence, seed)


# --- single trial pieces -------------------------------------------------------

def _base_draw(spec: EnsembleSpec, rng: np.random.Generator):
    """Edges (us, vs) for ER/RIG; for RGG the points, since edges are built on survivors."""
    if isinstance(spec, ErSpec):
        return er_edges(spec.n, spec.p, rng)
    if isinstance(spec, RigSpec):
        return rig_edges(spec, rng)
    if isinstance(spec, RggSpec):
        return sample_points(spec.n, rng)
    raise TypeError(f"unknown ensemble spec {spec!r}")


def _failed_mask(n: int, epsilon: float, cond: FixedSurvivors | None,
                 rng: np.random.Generator) -> np.ndarray:
    if cond is None:
        return rng.random(n) < epsilon
    failed = np.zeros(n, dtype=bool)
    failed[rng.choice(n, size=n - cond.s, replace=False)] = True
    return failed


def _restrict(alive: np.ndarray, us: np.ndarray, vs: np.ndarray):
    relabel = np.cumsum(alive) - 1
    keep = alive[us] & alive[vs]
    return int(alive.sum()), relabel[us[keep]], relabel[vs[keep]]


def _survival_edges(spec: EnsembleSpec, base, alive: np.ndarray):
    if isinstance(spec, RggSpec):
        xs, ys = base.xs[alive], base.ys[alive]
        us, vs = _kernels.rgg_edges(xs, ys, float(spec.radius))
        return int(alive.sum()), us, vs
    us, vs = base
    return _restrict(alive, us, vs)


def _breaks(s: int, us: np.ndarray, vs: np.ndarray, k: int, policy: ConnectivityPolicy) -> bool:
    """True when the survival graph on ``s`` nodes with edges (us, vs) is not k-connected."""
    if s <= k:
        if policy is ConnectivityPolicy.EMPTY_DISCONNECTED:
            return True
        return us.shape[0] != s * (s - 1) // 2
    if k == 1:
        return _kernels.component_count(s, us, vs) != 1
    return not is_k_connected(Graph.from_edges(s, us, vs), k, policy)


def _count_chunk(req: EstimateRequest, point: int, start: int, stop: int) -> int:
    spec = req.ensemble
    n = spec.n
    fixed = None
    if req.quenched:
        fixed = _base_draw(spec, stream(req.master_seed, point))
    hits = 0
    for j in range(start, stop):
        rng = stream(req.master_seed, point, j)
        base = fixed if fixed is not None else _base_draw(spec, rng)
        alive = ~_failed_mask(n, req.epsilon, req.conditioning, rng)
        s, us, vs = _survival_edges(spec, base, alive)
        hits += _breaks(s, us, vs, req.k, req.policy)
    return hits


def _count_chunk_coupled(req: EstimateRequest, axis: str, values: tuple, start: int,
                         stop: int) -> list[int]:
    """Trial j shares one stream across every axis point (monotone coupling)."""
    spec = req.ensemble
    n = spec.n
    hits = [0] * len(values)
    top = max(values)
    for j in range(start, stop):
        rng = stream(req.master_seed, 0, j)
        if axis == "p":
            us, vs = er_edges(n, top, rng)
            alive = ~_failed_mask(n, req.epsilon, req.conditioning, rng)
            marks = rng.random(us.shape[0]) * top
            s, su, sv = _restrict(alive, us, vs)
            smarks = marks[alive[us] & alive[vs]]
            for i, p in enumerate(values):
                sel = smarks < p
                hits[i] += _breaks(s, su[sel], sv[sel], req.k, req.policy)
        elif axis == "r":
            pts = sample_points(n, rng)
            alive = ~_failed_mask(n, req.epsilon, req.conditioning, rng)
            xs, ys = pts.xs[alive], pts.ys[alive]
            s = xs.shape[0]
            su, sv = _kernels.rgg_edges(xs, ys, float(top))
            dx = xs[su] - xs[sv]
            dy = ys[su] - ys[sv]
            d2 = dx * dx + dy * dy
            for i, r in enumerate(values):
                sel = d2 <= r * r
                hits[i] += _breaks(s, su[sel], sv[sel], req.k, req.policy)
        elif axis == "epsilon":
            base = _base_draw(spec, rng)
            u = rng.random(n)
            for i, eps in enumerate(values):
                s, su, sv = _survival_edges(spec, base, ~(u < eps))
                hits[i] += _breaks(s, su, sv, req.k, req.policy)
        else:
            raise ValueError(f"coupling not supported on axis {axis!r}")
    return hits


# --- execution -----------------------------------------------------------------

def default_threads() -> int:
    return os.cpu_count() or 1


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(a, min(a + CHUNK, trials)) for a in range(0, trials, CHUNK)]


def _run(fn, tasks: list[tuple], threads: int | None) -> list:
    threads = default_threads() if threads is None else threads
    if threads < 1:
        raise ValueError("threads must be at least 1")
    if threads == 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as pool:
        futures = [pool.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]


def estimate_breakdown(req: EstimateRequest, threads: int | None = 1) -> Estimate:
    """Annealed estimate of P(survival graph not k-connected)."""
    if req.conditioning is not None:
        raise ValueError("use estimate_breakdown_conditional for fixed survivor counts")
    return _estimate_point(req, 0, threads)


def estimate_breakdown_conditional(req: EstimateRequest, threads: int | None = 1) -> Estimate:
    """Estimate for the order-s survival ensemble (exactly s survivors per trial)."""
    if req.conditioning is None:
        raise ValueError("conditional estimate needs FixedSurvivors")
    return _estimate_point(req, 0, threads)


def _estimate_point(req: EstimateRequest, point: int, threads: int | None) -> Estimate:
    tasks = [(req, point, a, b) for a, b in _chunks(req.trials)]
    hits = sum(_run(_count_chunk, tasks, threads))
    return _make_estimate(hits, req.trials, req.confidence, req.master_seed)


def apply_axis(req: EstimateRequest, axis: str, value) -> EstimateRequest:
    """Copy of ``req`` with one parameter replaced."""
    spec = req.ensemble
    if axis == "epsilon":
        return replace(req, epsilon=float(value))
    if axis == "n":
        n = int(value)
        if n != value:
            raise ValueError(f"node count must be an integer, got {value}")
        return replace(req, ensemble=with_n(spec, n))
    if axis == "p":
        if not isinstance(spec, ErSpec):
            raise ValueError("axis 'p' needs an ER ensemble")
        return replace(req, ensemble=ErSpec(spec.n, float(value)))
    if axis == "r":
        if not isinstance(spec, RggSpec):
            raise ValueError("axis 'r' needs an RGG ensemble")
        return replace(req, ensemble=RggSpec(spec.n, float(value)))
    if axis == "ratio":
        if not isinstance(spec, RigSpec):
            raise ValueError("axis 'ratio' needs an RIG ensemble")
        return replace(req, ensemble=RigSpec(spec.n, pool_for_ratio(spec, float(value)),
                                             spec.key_dist))
    raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")


def pool_for_ratio(spec: RigSpec, ratio: float) -> int:
    """Pool size whose E[X]^2 / P_n is closest to ``ratio`` (rounded, at least max ring size)."""
    if not ratio > 0:
        raise ValueError("ratio must be positive")
    mean = spec.key_dist.mean()
    pool = max(int(round(mean * mean / ratio)), max(spec.key_dist.support()))
    return pool


def sweep(base: EstimateRequest, axis: str, values: Sequence[float], couple: bool = False,
          threads: int | None = 1) -> list[SweepRow]:
    """One estimate per axis value, rows in axis order.

    Uncoupled points use independent streams keyed by the point index. With
    ``couple=True`` every point reuses the same per-trial stream: for the p and
    r axes the graphs are nested, so each trial's breakdown indicator is
    non-increasing along the axis.
    """
    values = list(values)
    if not values:
        raise ValueError("sweep axis is empty")
    reqs = []
    for i, v in enumerate(values):
        try:
            reqs.append(apply_axis(base, axis, v))
        except (ValueError, TypeError) as exc:
            raise ValueError(f"axis point {i} ({axis}={v!r}): {exc}") from exc
    if couple:
        if axis not in ("p", "r", "epsilon"):
            raise ValueError(f"coupling not supported on axis {axis!r}")
        if base.quenched:
            raise ValueError("coupled sweeps are annealed only")
        tasks = [(base, axis, tuple(float(v) for v in values), a, b)
                 for a, b in _chunks(base.trials)]
        hits = np.sum(np.array(_run(_count_chunk_coupled, tasks, threads), dtype=np.int64),
                      axis=0)
        ests = [_make_estimate(int(h), base.trials, base.confidence, base.master_seed)
                for h in hits]
    else:
        tasks = [(r, i, a, b) for i, r in enumerate(reqs) for a, b in _chunks(r.trials)]
        counts = _run(_count_chunk, tasks, threads)
        per_point = [0] * len(reqs)
        for (_, i, _, _), c in zip(tasks, counts):
            per_point[i] += c
        ests = [_make_estimate(h, r.trials, r.confidence, r.master_seed)
                for h, r in zip(per_point, reqs)]
    return [SweepRow(axis, v, r.ensemble.n, r.k, r.epsilon, e)
            for v, r, e in zip(values, reqs, ests)]


def sample_trial_graph(req: EstimateRequest, trial: int, point: int = 0) -> Graph:
    """The survival graph of one annealed trial, rebuilt from its stream (for debugging)."""
    rng = stream(req.master_seed, point, trial)
    base = _base_draw(req.ensemble, rng)
    alive = ~_failed_mask(req.ensemble.n, req.epsilon, req.conditioning, rng)
    s, us, vs = _survival_edges(req.ensemble, base, alive)
    return Graph.from_edges(s, us, vs)

