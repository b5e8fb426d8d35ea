"""Discrete curvature, convex variational principles and rigidity checks for
polyhedral metrics and inversive distance circle packings on closed surfaces."""

from .geom import Geometry
from .mesh import Field, Mesh, Support, load_field, load_mesh
from .schlaefli import FunctionalSpec, parse_spec
from .solver import SolverConfig, SolveReport

__all__ = [
    "Field", "FunctionalSpec", "Geometry", "Mesh", "SolveReport", "SolverConfig", "Support",
    "load_field", "load_mesh", "parse_spec",
]
