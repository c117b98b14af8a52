"""Discrete optimal transport on compact geodesic spaces, with experiments
probing which isometries of the Wasserstein space come from the base."""

from .config import Tolerances
from .measures import AtomicMeasure, dirac, mixture, pushforward, shell_decomposition, uniform_mesh_measure
from .spaces import Circle, FiniteMetric, Interval, ProjectivePlane, Sphere2
from .transport import OptResult, TransportPlan, solve_kantorovich, wasserstein_distance

__all__ = [
    "AtomicMeasure",
    "Circle",
    "FiniteMetric",
    "Interval",
    "OptResult",
    "ProjectivePlane",
    "Sphere2",
    "Tolerances",
    "TransportPlan",
    "dirac",
    "mixture",
    "pushforward",
    "shell_decomposition",
    "solve_kantorovich",
    "uniform_mesh_measure",
    "wasserstein_distance",
]
