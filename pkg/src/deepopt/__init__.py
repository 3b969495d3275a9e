"""Stochastic optimization that learns a deep-network model of the
objective landscape during search, inverts the network to propose
high-quality starting points for fast local search (NASH) or a genetic
algorithm, and benchmarks the result against non-learning controls."""

__version__ = "0.1.0"

from .core import (
    BudgetAccountant,
    BudgetExhausted,
    EvaluatedSample,
    SamplePool,
    ScalingConfig,
    evaluate_candidate,
    rng_stream,
    scale_scores,
)
from .problems import Problem, make_instance

__all__ = [
    "BudgetAccountant", "BudgetExhausted", "EvaluatedSample", "SamplePool",
    "ScalingConfig", "evaluate_candidate", "rng_stream", "scale_scores",
    "Problem", "make_instance", "__version__",
]
