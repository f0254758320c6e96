"""Mean-field (cavity) approximation of the k=1 breakdown probability for G(n, p).

The approximation replaces the graph by a tree with the same degree
distribution. I_tilde is the smallest fixed point of

    I = [1 - p (1 - eps) (1 - I)]^(n - 2)

and the breakdown estimate is

    P_mf = 1 - [1 - (1 - eps) {1 - p (1 - eps) (1 - I_tilde)}^(n - 1)]^n.

The exponents are used literally, so at eps = 1 the estimate is 0 even though
an empty survival graph counts as broken elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, last_iterate: float, residual: float):
        super().__init__(f"{message} (last iterate {last_iterate!r}, residual {residual!r})")
        self.last_iterate = last_iterate
        self.residual = residual


@dataclass(frozen=True)
class MeanFieldSpec:
    n: int
    p: float
    epsilon: float
    tolerance: float = 1e-12
    max_iterations: int = 10**6

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")

    @property
    def a(self) -> float:
        return self.p * (1.0 - self.epsilon)


@dataclass(frozen=True)
class MeanFieldSolution:
    i_tilde: float
    residual: float
    iterations: int
    method: str  # "iteration" or "bisection"


def _power(a: float, i: float, e: int) -> float:
    # (1 - a (1 - i))^e in log space
    base = a * (1.0 - i)
    if base >= 1.0:
        return 0.0 if e > 0 else 1.0
    return math.exp(e * math.log1p(-base))


def mf_rhs(spec: MeanFieldSpec, i: float) -> float:
    return _power(spec.a, i, spec.n - 2)


def _residual(spec: MeanFieldSpec, i: float) -> float:
    return abs(i - mf_rhs(spec, i))


def _bracket(spec: MeanFieldSpec, lo: float, steps: int = 4096) -> tuple[float, float]:
    # f(I) = I - RHS(I) is negative below the smallest root and f(1) = 0
    h = (1.0 - lo) / steps
    prev = lo
    for j in range(1, steps + 1):
        x = 1.0 if j == steps else lo + j * h
        if x - mf_rhs(spec, x) >= 0.0:
            return prev, x
        prev = x
    return prev, 1.0


def _bisect(spec: MeanFieldSpec, lo: float, hi: float) -> tuple[float, int]:
    count = 0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        count += 1
        if mid - mf_rhs(spec, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    # hi always satisfies f >= 0; pick whichever end has the smaller residual
    best = min((lo, hi), key=lambda x: _residual(spec, x))
    return best, count


def solve_fixed_point(spec: MeanFieldSpec) -> MeanFieldSolution:
    """Smallest root of I = RHS(I) on [0, 1].

    Iterates from 0; the map is non-decreasing, so the iterates increase to
    the smallest fixed point. Slow convergence near tangency falls back to a
    grid bracket above the last iterate followed by bisection.
    """
    tol = spec.tolerance
    i = 0.0
    for it in range(1, spec.max_iterations + 1):
        nxt = mf_rhs(spec, i)
        if nxt < i:
            # rounding noise at the fixed point; iterates can only increase
            break
        step = nxt - i
        i = nxt
        if step <= tol and _residual(spec, i) <= tol:
            return MeanFieldSolution(i, _residual(spec, i), it, "iteration")
    else:
        it = spec.max_iterations
    if _residual(spec, i) <= tol:
        return MeanFieldSolution(i, _residual(spec, i), it, "iteration")
    lo, hi = _bracket(spec, i)
    root, extra = _bisect(spec, lo, hi)
    res = _residual(spec, root)
    if res > tol:
        raise ConvergenceError("fixed point not resolved to tolerance", root, res)
    return MeanFieldSolution(root, res, it + extra, "bisection")


def breakdown_from_fixed_point(spec: MeanFieldSpec, i_tilde: float) -> float:
    kappa = 1.0 - spec.epsilon
    inner = kappa * _power(spec.a, i_tilde, spec.n - 1)
    if inner >= 1.0:
        return 1.0
    return min(1.0, max(0.0, -math.expm1(spec.n * math.log1p(-inner))))


def mf_breakdown(spec: MeanFieldSpec) -> float:
    return breakdown_from_fixed_point(spec, solve_fixed_point(spec).i_tilde)
