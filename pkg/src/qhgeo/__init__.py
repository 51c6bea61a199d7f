"""Hyperbolic and quasihyperbolic metric geometry of plane domains."""

__version__ = "0.1.0"

from .geom import Annulus, Circle, PathPolyline, band, core, separates  # noqa: E402
from .domains import Domain  # noqa: E402
from .metrics import H, K, KAPPA, DensityInterval, MetricKind, path_length  # noqa: E402
from .beta import beta_at, enlarged_annulus  # noqa: E402
from .geodesics import SolverParams, exact_geodesic, geodesic, solve_geodesic  # noqa: E402

__all__ = [
    "Annulus", "Circle", "PathPolyline", "band", "core", "separates", "Domain", "H", "K", "KAPPA",
    "DensityInterval", "MetricKind", "path_length", "beta_at", "enlarged_annulus", "SolverParams",
    "exact_geodesic", "geodesic", "solve_geodesic",
]
