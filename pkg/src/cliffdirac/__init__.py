"""Clifford algebra of differential forms on 4D Lorentzian charts and the tensor Dirac system."""

__version__ = "0.1.0"

from . import affine, algebra, calculus, dirac, fields, geometry  # noqa: E402
from .algebra import MetricAtPoint, clifford_mul, clifford_mul_oracle, hodge_star, wedge  # noqa: E402
from .errors import CliffDiracError  # noqa: E402
from .geometry import ChartBox, MetricField, metric_catalog  # noqa: E402

__all__ = [
    "__version__", "affine", "algebra", "calculus", "dirac", "fields", "geometry",
    "MetricAtPoint", "clifford_mul", "clifford_mul_oracle", "hodge_star", "wedge",
    "CliffDiracError", "ChartBox", "MetricField", "metric_catalog",
]
