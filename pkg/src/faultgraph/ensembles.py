"""Samplers for the homogeneous random graph families.

ER graphs G(n, p), generalized random intersection graphs G(n, P_n, D) and
random geometric graphs on the unit square. Every sampler is a pure function
of its spec and the ``numpy.random.Generator`` passed in.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .graph import Graph


@dataclass(frozen=True)
class ErSpec:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class Constant:
    """Every node holds exactly ``size`` keys."""

    size: int

    def support(self) -> list[int]:
        return [self.size]

    def mean(self) -> float:
        return float(self.size)

    def variance(self) -> float:
        return 0.0

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.full(n, self.size, dtype=np.int64)


@dataclass(frozen=True)
class General:
    """Key-ring sizes drawn from an explicit pmf ``((size, prob), ...)``."""

    pmf: tuple

    def __post_init__(self):
        pmf = tuple((int(s), float(q)) for s, q in self.pmf)
        object.__setattr__(self, "pmf", pmf)
        if not pmf:
            raise ValueError("pmf must not be empty")
        if any(q < 0 for _, q in pmf):
            raise ValueError("pmf probabilities must be non-negative")
        if len({s for s, _ in pmf}) != len(pmf):
            raise ValueError("pmf sizes must be distinct")
        total = math.fsum(q for _, q in pmf)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"pmf sums to {total!r}, not 1")

    def support(self) -> list[int]:
        return [s for s, q in self.pmf if q > 0]

    def mean(self) -> float:
        return math.fsum(s * q for s, q in self.pmf)

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum(q * (s - mu) ** 2 for s, q in self.pmf)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        sizes = np.array([s for s, _ in self.pmf], dtype=np.int64)
        probs = np.array([q for _, q in self.pmf])
        return rng.choice(sizes, size=n, p=probs / probs.sum())


KeyDistribution = Union[Constant, General]


@dataclass(frozen=True)
class RigSpec:
    n: int
    pool_size: int
    key_dist: KeyDistribution

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.pool_size < 1:
            raise ValueError("pool_size must be at least 1")
        for s in self.key_dist.support():
            if not 1 <= s <= self.pool_size:
                raise ValueError(f"key-ring size {s} outside [1, pool_size={self.pool_size}]")

    @property
    def ratio(self) -> float:
        """E[X]^2 / P_n, the parameter the RIG thresholds are stated in."""
        return self.key_dist.mean() ** 2 / self.pool_size


@dataclass(frozen=True)
class RggSpec:
    n: int
    radius: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if not self.radius > 0:
            raise ValueError("radius must be positive")


EnsembleSpec = Union[ErSpec, RigSpec, RggSpec]


class PointSet:
    """Points in the unit square, stored as parallel coordinate arrays."""

    __slots__ = ("xs", "ys")

    def __init__(self, xs, ys):
        xs = np.asarray(xs, dtype=float).ravel()
        ys = np.asarray(ys, dtype=float).ravel()
        if xs.shape != ys.shape:
            raise ValueError("coordinate arrays differ in length")
        if xs.size and (xs.min() < 0 or xs.max() > 1 or ys.min() < 0 or ys.max() > 1):
            raise ValueError("points must lie in the unit square")
        self.xs = xs
        self.ys = ys

    def __len__(self):
        return self.xs.shape[0]

    def __getitem__(self, i):
        return float(self.xs[i]), float(self.ys[i])

    def subset(self, mask: np.ndarray) -> "PointSet":
        return PointSet(self.xs[mask], self.ys[mask])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y"])
        for x, y in zip(self.xs.tolist(), self.ys.tolist()):
            w.writerow([repr(x), repr(y)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PointSet":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["x", "y"]:
            raise ValueError("expected header 'x,y'")
        xs = [float(r[0]) for r in rows[1:] if r]
        ys = [float(r[1]) for r in rows[1:] if r]
        return cls(xs, ys)


def _decode_pairs(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # pair (i, j), i < j, has index j(j-1)/2 + i
    j = np.floor((1.0 + np.sqrt(1.0 + 8.0 * idx.astype(np.float64))) / 2.0).astype(np.int64)
    j -= (j * (j - 1) // 2 > idx)
    j += ((j + 1) * j // 2 <= idx)
    i = idx - j * (j - 1) // 2
    return i, j


def er_edges(n: int, p: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Edge endpoints of G(n, p) by geometric skipping over the pair index."""
    total = n * (n - 1) // 2
    if p <= 0.0 or total == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    mean = total * p
    chunk = int(mean + 5.0 * math.sqrt(mean) + 16)
    found = []
    last = -1
    while True:
        pos = last + np.cumsum(rng.geometric(p, size=chunk))
        if pos[-1] >= total:
            found.append(pos[pos < total])
            break
        found.append(pos)
        last = int(pos[-1])
    idx = np.concatenate(found)
    return _decode_pairs(idx)


def sample_er(spec: ErSpec, rng: np.random.Generator) -> Graph:
    us, vs = er_edges(spec.n, spec.p, rng)
    return Graph.from_edges(spec.n, us, vs)


def rig_edges(spec: RigSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    sizes = spec.key_dist.draw(rng, spec.n)
    uniforms = rng.random(int(sizes.sum()))
    keys, owner = _kernels.key_rings(spec.pool_size, sizes, uniforms)
    us, vs = _kernels.shared_key_pairs(keys, owner)
    if us.size:
        code = np.unique(us * spec.n + vs)
        us, vs = code // spec.n, code % spec.n
    return us, vs


def sample_rig(spec: RigSpec, rng: np.random.Generator) -> Graph:
    us, vs = rig_edges(spec, rng)
    return Graph.from_edges(spec.n, us, vs)


def sample_points(n: int, rng: np.random.Generator) -> PointSet:
    if n < 0:
        raise ValueError("n must be non-negative")
    xy = rng.random((n, 2))
    return PointSet(xy[:, 0], xy[:, 1])


def rgg_from_points(points: PointSet, r: float) -> Graph:
    """Closed-ball graph: i ~ j iff the Euclidean distance is at most ``r``."""
    if not r > 0:
        raise ValueError("radius must be positive")
    us, vs = _kernels.rgg_edges(points.xs, points.ys, float(r))
    return Graph.from_edges(len(points), us, vs)


def sample_rgg(spec: RggSpec, rng: np.random.Generator) -> tuple[Graph, PointSet]:
    pts = sample_points(spec.n, rng)
    return rgg_from_points(pts, spec.radius), pts


def sample(spec: EnsembleSpec, rng: np.random.Generator) -> Graph:
    if isinstance(spec, ErSpec):
        return sample_er(spec, rng)
    if isinstance(spec, RigSpec):
        return sample_rig(spec, rng)
    if isinstance(spec, RggSpec):
        return sample_rgg(spec, rng)[0]
    raise TypeError(f"unknown ensemble spec {spec!r}")


def spec_to_dict(spec: EnsembleSpec) -> dict:
    if isinstance(spec, ErSpec):
        return {"family": "er", "n": spec.n, "p": spec.p}
    if isinstance(spec, RggSpec):
        return {"family": "rgg", "n": spec.n, "radius": spec.radius}
    if isinstance(spec, RigSpec):
        kd = spec.key_dist
        if isinstance(kd, Constant):
            dist = {"kind": "constant", "size": kd.size}
        else:
            dist = {"kind": "general", "pmf": [[s, q] for s, q in kd.pmf]}
        return {"family": "rig", "n": spec.n, "pool_size": spec.pool_size, "key_dist": dist}
    raise TypeError(f"unknown ensemble spec {spec!r}")


def spec_from_dict(d: dict) -> EnsembleSpec:
    family = d.get("family")
    if family == "er":
        return ErSpec(int(d["n"]), float(d["p"]))
    if family == "rgg":
        return RggSpec(int(d["n"]), float(d["radius"]))
    if family == "rig":
        kd = d["key_dist"]
        if kd["kind"] == "constant":
            dist = Constant(int(kd["size"]))
        elif kd["kind"] == "general":
            dist = General(tuple((int(s), float(q)) for s, q in kd["pmf"]))
        else:
            raise ValueError(f"unknown key distribution kind {kd['kind']!r}")
        return RigSpec(int(d["n"]), int(d["pool_size"]), dist)
    raise ValueError(f"unknown family {family!r}")


def with_n(spec: EnsembleSpec, n: int) -> EnsembleSpec:
    if isinstance(spec, ErSpec):
        return ErSpec(n, spec.p)
    if isinstance(spec, RigSpec):
        return RigSpec(n, spec.pool_size, spec.key_dist)
    return RggSpec(n, spec.radius)
