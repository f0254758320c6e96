"""Closed-form thresholds, limits and bounds for the node fault model.

Regimes are reported from a signed finite-n offset. The asymptotic statements
behind them need the offset to diverge, so at a fixed n the label is a
heuristic, and every regime report says so.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .faults import binomial_pmf

PAPER = "paper"
STANDARD = "standard"
VARIANTS = (PAPER, STANDARD)

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"

FINITE_N_NOTE = "finite-n heuristic: the asymptotic regimes require the offset to diverge"


def _check_nk(n: int, k: int) -> None:
    if n < 3:
        raise ValueError("n must be at least 3 so that ln ln n is defined")
    if k < 1:
        raise ValueError("k must be positive")


def _check_kappa(kappa: float) -> None:
    if kappa == 0:
        raise ValueError("threshold diverges at kappa = 0")
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _classify(offset: float, scale: float) -> str:
    # offsets within rounding of zero count as critical
    if abs(offset) <= 1e-9 * max(1.0, scale):
        return CRITICAL
    return SUPERCRITICAL if offset > 0 else SUBCRITICAL


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    offset: float
    note: str = FINITE_N_NOTE


# --- ER ---------------------------------------------------------------------------

def er_threshold(n: int, k: int, kappa: float) -> float:
    """p* = (ln n + (k-1) ln ln n) / (kappa n)."""
    _check_nk(n, k)
    _check_kappa(kappa)
    ln = math.log(n)
    return (ln + (k - 1) * math.log(ln)) / (kappa * n)


def er_limit_at_threshold(k: int, kappa: float, variant: str = PAPER) -> float:
    """Limiting breakdown probability at p = p*.

    ``paper``: 1 - exp(-kappa^(1/(k-1)!)); ``standard``: 1 - exp(-kappa/(k-1)!).
    The two agree for k <= 2.
    """
    if k < 1:
        raise ValueError("k must be positive")
    _check_kappa(kappa)
    _check_variant(variant)
    f = math.factorial(k - 1)
    inner = kappa ** (1.0 / f) if variant == PAPER else kappa / f
    return -math.expm1(-inner)


def er_regime(p: float, n: int, k: int, kappa: float) -> RegimeReport:
    """Offset omega = kappa n p - ln n - (k-1) ln ln n and its sign."""
    _check_nk(n, k)
    _check_kappa(kappa)
    ln = math.log(n)
    offset = kappa * n * p - ln - (k - 1) * math.log(ln)
    return RegimeReport(_classify(offset, ln), offset)


def bollobas_min_degree_limit(m: int, c: float, variant: str = PAPER) -> tuple[float, float]:
    """Limits of Pr[min degree = m] and Pr[min degree = m+1] at p = (ln n + m ln ln n + c)/n."""
    if m < 0:
        raise ValueError("m must be non-negative")
    _check_variant(variant)
    f = math.factorial(m)
    inner = math.exp(-c / f) if variant == PAPER else math.exp(-c) / f
    upper = math.exp(-inner)
    return 1.0 - upper, upper


# --- RIG --------------------------------------------------------------------------

def rig_threshold(n: int, k: int, kappa: float) -> float:
    """Critical E[X]^2 / P_n; numerically identical to the ER threshold."""
    return er_threshold(n, k, kappa)


@dataclass(frozen=True)
class RigDiagnostic:
    mean_ratio: float      # E[X] / sqrt(ln n), want >= 1
    variance_ratio: float  # Var[X] n (ln n)^2 / E[X]^2, want <= 1
    mean_ok: bool
    variance_ok: bool
    note: str = "heuristic: the RIG hypotheses are asymptotic and have no exact finite-n form"

    @property
    def passed(self) -> bool:
        return self.mean_ok and self.variance_ok


def rig_conditions_check(mean_key: float, var_key: float, n: int) -> RigDiagnostic:
    if not mean_key > 0:
        raise ValueError("mean key-ring size must be positive")
    if var_key < 0:
        raise ValueError("variance must be non-negative")
    if n < 2:
        raise ValueError("n must be at least 2")
    ln = math.log(n)
    mean_ratio = mean_key / math.sqrt(ln)
    variance_ratio = var_key * n * ln * ln / (mean_key * mean_key)
    return RigDiagnostic(mean_ratio, variance_ratio, mean_ratio >= 1.0, variance_ratio <= 1.0)


def rig_regime(ratio: float, n: int, k: int, kappa: float) -> RegimeReport:
    """Same offset as :func:`er_regime` with E[X]^2/P_n in place of p."""
    return er_regime(ratio, n, k, kappa)


def zhao_limit(alpha_star: float, k: int) -> float:
    """Limiting probability that G(n, P_n, D) is k-connected when alpha_n -> alpha_star."""
    if k < 1:
        raise ValueError("k must be positive")
    if alpha_star == math.inf:
        return 1.0
    if alpha_star == -math.inf or -alpha_star > 700:
        return 0.0
    return math.exp(-math.exp(-alpha_star) / math.factorial(k - 1))


# --- RGG --------------------------------------------------------------------------

def penrose_limit(c: float) -> float:
    """Limit of Pr[min degree >= 1] at r_n = sqrt((ln n + c)/(pi n))."""
    if c == math.inf:
        return 1.0
    if c == -math.inf or -c > 700:
        return 0.0
    return math.exp(-math.exp(-c))


def wan_xi(k: int, c: float) -> float:
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        gap = math.sqrt(math.exp(-c) + math.pi / 4) - math.sqrt(math.pi) / 2
        if not gap > 0:
            raise ValueError(f"xi undefined at c={c}")
        return -2.0 * math.log(gap)
    return 2.0 * math.log(math.sqrt(math.pi) / (2 ** (k - 1) * math.factorial(k))) + 2.0 * c


def wan_radius(n: int, k: int, c: float) -> float:
    """r_n = sqrt((ln n + (2k-1) ln ln n + xi) / (pi n)) with the k-dependent xi."""
    _check_nk(n, k)
    ln = math.log(n)
    num = ln + (2 * k - 1) * math.log(ln) + wan_xi(k, c)
    if num <= 0:
        raise ValueError("radius undefined: negative numerator")
    return math.sqrt(num / (math.pi * n))


def rgg_xi(k: int) -> float:
    if k < 1:
        raise ValueError("k must be positive")
    if k <= 2:
        return 0.0
    return 2.0 * math.log(math.sqrt(math.pi) / (2 ** (k - 2) * math.factorial(k - 1)))


def _rgg_numerator(n: int, k: int) -> float:
    ln = math.log(n)
    return ln + max(2 * k - 3, 0) * math.log(ln) + rgg_xi(k)


def rgg_threshold_radius(n: int, k: int, kappa: float) -> float:
    """r* = sqrt((ln n + [2k-3]_+ ln ln n + xi) / (kappa pi n))."""
    _check_nk(n, k)
    _check_kappa(kappa)
    num = _rgg_numerator(n, k)
    if num <= 0:
        raise ValueError("radius undefined: negative numerator")
    return math.sqrt(num / (kappa * math.pi * n))


def rgg_regime(r: float, n: int, k: int, kappa: float) -> RegimeReport:
    """Offset kappa pi n r^2 - (ln n + [2k-3]_+ ln ln n + xi)."""
    _check_nk(n, k)
    _check_kappa(kappa)
    offset = kappa * math.pi * n * r * r - _rgg_numerator(n, k)
    return RegimeReport(_classify(offset, math.log(n)), offset)


def rgg_limit_at_threshold(k: int, kappa: float) -> float:
    if k < 1:
        raise ValueError("k must be positive")
    _check_kappa(kappa)
    if k == 1:
        return -math.expm1(-kappa)
    if k == 2:
        return -math.expm1(-math.sqrt(kappa * (kappa + math.pi)))
    return -math.expm1(-math.sqrt(kappa))


# --- typical set and the two-sided bounds -------------------------------------------

@dataclass(frozen=True)
class TypicalSetSpec:
    """Survivor counts within delta*n of kappa*n; delta defaults to n^(-1/3)."""

    n: int
    kappa: float
    delta: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError("kappa must lie in [0, 1]")
        if self.delta is None:
            object.__setattr__(self, "delta", self.n ** (-1.0 / 3.0))
        elif not self.delta > 0:
            raise ValueError("delta must be positive")
        elif self.delta * math.sqrt(self.n) < 1.0:
            warnings.warn(f"delta*sqrt(n) = {self.delta * math.sqrt(self.n):.3g} is small; "
                          "the typicality bound may not hold", stacklevel=2)

    @property
    def slack(self) -> float:
        """1 / (2 n delta)."""
        return 1.0 / (2.0 * self.n * self.delta)

    @property
    def s_minus(self) -> int:
        return max(0, _ceil((self.kappa - self.delta) * self.n))

    @property
    def s_plus(self) -> int:
        return min(self.n, _floor((self.kappa + self.delta) * self.n))


def _snap(x: float) -> float:
    # (kappa -/+ delta) * n picks up rounding noise; integers stay integers
    r = round(x)
    return float(r) if abs(x - r) <= 1e-9 * max(1.0, abs(x)) else x


def _ceil(x: float) -> int:
    return math.ceil(_snap(x))


def _floor(x: float) -> int:
    return math.floor(_snap(x))


def typical_range(spec: TypicalSetSpec) -> tuple[int, int]:
    lo, hi = spec.s_minus, spec.s_plus
    if lo > hi:
        raise ValueError(f"typical range is empty: s_minus={lo} > s_plus={hi}")
    return lo, hi


@dataclass(frozen=True)
class TypicalityReport:
    mass: float
    lower_bound: float

    @property
    def holds(self) -> bool:
        return self.lower_bound <= self.mass <= 1.0


def typicality_mass(spec: TypicalSetSpec) -> TypicalityReport:
    """Exact binomial mass of the typical range and the bound 1 - 1/(2 n delta)."""
    lo, hi = typical_range(spec)
    mass = math.fsum(binomial_pmf(s, spec.n, spec.kappa) for s in range(lo, hi + 1))
    return TypicalityReport(min(mass, 1.0), 1.0 - spec.slack)


def lemma1_bounds(spec: TypicalSetSpec, conditional_probs: dict[int, float]) -> tuple[float, float]:
    """Lower and upper bounds on the breakdown probability from order-s values on the typical range."""
    lo, hi = typical_range(spec)
    missing = [s for s in range(lo, hi + 1) if s not in conditional_probs]
    if missing:
        raise ValueError(f"conditional probabilities missing for s in {missing}")
    vals = [conditional_probs[s] for s in range(lo, hi + 1)]
    if any(not 0.0 <= v <= 1.0 for v in vals):
        raise ValueError("conditional probabilities must lie in [0, 1]")
    slack = spec.slack
    lower = min(1.0, max(0.0, (1.0 - slack) * min(vals)))
    upper = min(1.0, max(0.0, slack + max(vals)))
    return lower, upper


# --- combined prediction ------------------------------------------------------------

FAMILIES = ("er", "rig", "rgg")


@dataclass(frozen=True)
class TheoryPrediction:
    family: str
    n: int
    k: int
    epsilon: float
    threshold_value: float
    limit_breakdown: float
    variant: str = PAPER
    limit_standard: float | None = None
    regime: str | None = None
    offset: float | None = None
    xi: float | None = None

    @property
    def kappa(self) -> float:
        return 1.0 - self.epsilon

    def as_dict(self) -> dict:
        d = {
            "family": self.family, "n": self.n, "k": self.k, "epsilon": self.epsilon,
            "threshold": self.threshold_value, "regime": self.regime, "offset": self.offset,
            "limit_paper": self.limit_breakdown,
            "limit_standard": self.limit_standard,
        }
        if self.family == "rgg":
            d["xi"] = self.xi
        return d


def predict(family: str, n: int, k: int, epsilon: float, value: float | None = None) -> TheoryPrediction:
    """Threshold, both limit variants and, if ``value`` is given, the regime of that parameter.

    ``value`` is p for ER, E[X]^2/P_n for RIG and the radius for RGG. RGG has a
    single limit form, reported under both variant names.
    """
    if family not in FAMILIES:
        raise ValueError(f"unsupported family {family!r}; choose from {FAMILIES}")
    kappa = 1.0 - epsilon
    if family == "rgg":
        threshold = rgg_threshold_radius(n, k, kappa)
        paper = standard = rgg_limit_at_threshold(k, kappa)
        report = rgg_regime(value, n, k, kappa) if value is not None else None
        xi = rgg_xi(k)
    else:
        threshold = er_threshold(n, k, kappa)
        paper = er_limit_at_threshold(k, kappa, PAPER)
        standard = er_limit_at_threshold(k, kappa, STANDARD)
        report = er_regime(value, n, k, kappa) if value is not None else None
        xi = None
    return TheoryPrediction(
        family, n, k, epsilon, threshold, paper, PAPER, standard,
        report.regime if report else None, report.offset if report else None, xi,
    )
