"""Breakdown probability of homogeneous random graphs under independent node faults."""

__version__ = "0.1.0"

from .ensembles import Constant, ErSpec, General, RggSpec, RigSpec  # noqa: E402
from .faults import FaultSpec, binomial_pmf, sample_survival  # noqa: E402
from .graph import ConnectivityPolicy, Graph, is_k_connected  # noqa: E402
from .montecarlo import EstimateRequest, FixedSurvivors, estimate_breakdown, sweep  # noqa: E402

__all__ = [
    "Constant", "ErSpec", "General", "RggSpec", "RigSpec",
    "FaultSpec", "binomial_pmf", "sample_survival",
    "ConnectivityPolicy", "Graph", "is_k_connected",
    "EstimateRequest", "FixedSurvivors", "estimate_breakdown", "sweep",
]
