"""Finite subset spaces under the Hausdorff metric and a Lipschitz lab for their retractions."""

from .errors import FSSError, InvalidInput, UnsupportedOperation
from .john import PolygonGauge, john_transform
from .lab import LipschitzCertificate, Sampler, SearchConfig, estimate_lipschitz, theoretical_bounds
from .metric import Space, distance, geodesic_point, hadamard_residual, project_to_segment
from .retractions import PointMap, RetractionCandidate, candidate, induced, merge_retraction
from .subsets import (
    FiniteSubset,
    circle_k_cover,
    exact_kcenter,
    hausdorff,
    min_separation,
    reduce_by_one,
)

__all__ = [
    "FSSError", "InvalidInput", "UnsupportedOperation",
    "PolygonGauge", "john_transform",
    "LipschitzCertificate", "Sampler", "SearchConfig", "estimate_lipschitz", "theoretical_bounds",
    "Space", "distance", "geodesic_point", "hadamard_residual", "project_to_segment",
    "PointMap", "RetractionCandidate", "candidate", "induced", "merge_retraction",
    "FiniteSubset", "circle_k_cover", "exact_kcenter", "hausdorff", "min_separation", "reduce_by_one",
]
