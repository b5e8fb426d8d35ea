"""Discrete curvatures of a polyhedral metric: vertex defects and the edge
families ``phi_h`` and ``psi_h``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geom
from .errors import InadmissibleMetric
from .geom import Geometry
from .integrals import i_cos, i_sin
from .mesh import Field, Mesh, Support

TWO_PI = 2.0 * math.pi


@dataclass
class PolyhedralMetric:
    geometry: Geometry
    lengths: np.ndarray

    def __post_init__(self):
        self.geometry = Geometry.parse(self.geometry)
        self.lengths = np.asarray(self.lengths, dtype=float)

    @classmethod
    def from_field(cls, geometry, fld: Field) -> "PolyhedralMetric":
        if fld.support is not Support.EDGES:
            raise ValueError("a metric is an edge field")
        return cls(geometry, fld.values)


@dataclass
class CurvatureReport:
    k: np.ndarray
    total_k: float
    area: float
    residual: float
    edge: np.ndarray | None = None
    functional: str | None = None
    h: float | None = None


def triangle_lengths(mesh: Mesh, lengths) -> np.ndarray:
    """``(F, 3)`` array; entry ``[t, c]`` is the length of the edge facing corner ``c``."""
    return np.asarray(lengths, dtype=float)[mesh.tri_edges]


def corner_angles(mesh: Mesh, metric: PolyhedralMetric) -> np.ndarray:
    """Inner angles per corner for an admissible metric."""
    L = triangle_lengths(mesh, metric.lengths)
    geom.check_lengths(metric.geometry, L)
    code = geom.classify_batch(metric.geometry, L)
    bad = np.flatnonzero(code != geom.INTERIOR)
    if len(bad):
        t = int(bad[0])
        raise InadmissibleMetric(t, geom.classify(metric.geometry, L[t]))
    return geom.extended_angles_batch(metric.geometry, L)


def is_admissible(mesh: Mesh, metric: PolyhedralMetric) -> bool:
    L = triangle_lengths(mesh, metric.lengths)
    if np.any(L <= 0) or (metric.geometry is Geometry.S2 and np.any(L >= math.pi)):
        return False
    return bool(np.all(geom.classify_batch(metric.geometry, L) == geom.INTERIOR))


def vertex_defect(mesh: Mesh, theta: np.ndarray) -> np.ndarray:
    """``2*pi`` minus the angle sum at every vertex."""
    return TWO_PI - np.bincount(mesh.triangles.ravel(), weights=theta.ravel(),
                                minlength=mesh.n_vertices)


def edge_sum(mesh: Mesh, per_corner: np.ndarray) -> np.ndarray:
    """Sum a per-corner quantity over the two corners facing each edge."""
    t, c = mesh.edge_tris[:, :, 0], mesh.edge_tris[:, :, 1]
    vals = per_corner[t, c]
    return vals[:, 0] + vals[:, 1]


def adjacent_half_excess(theta: np.ndarray) -> np.ndarray:
    """Per corner ``c``: ``(theta_j + theta_k - theta_c) / 2``, the ``psi`` argument."""
    return 0.5 * (theta.sum(axis=-1, keepdims=True) - 2.0 * theta)


def vertex_curvature(mesh: Mesh, metric: PolyhedralMetric) -> np.ndarray:
    return vertex_defect(mesh, corner_angles(mesh, metric))


def phi_curvature(mesh: Mesh, metric: PolyhedralMetric, h: float) -> np.ndarray:
    theta = corner_angles(mesh, metric)
    return edge_sum(mesh, np.asarray(i_sin(h, theta)))


def psi_curvature(mesh: Mesh, metric: PolyhedralMetric, h: float) -> np.ndarray:
    theta = corner_angles(mesh, metric)
    return edge_sum(mesh, np.asarray(i_cos(h, adjacent_half_excess(theta))))


def triangle_areas(geometry: Geometry, theta: np.ndarray) -> np.ndarray | None:
    """Angle-excess/defect areas for curved geometries; ``None`` for E2."""
    if geometry is Geometry.H2:
        return math.pi - theta.sum(axis=-1)
    if geometry is Geometry.S2:
        return theta.sum(axis=-1) - math.pi
    return None


def gauss_bonnet(mesh: Mesh, metric: PolyhedralMetric) -> tuple[float, float, float]:
    """Return ``(total_k, area, residual)``.

    The residual is ``total_k - 2*pi*chi`` corrected by the area term of the
    geometry (``-area`` in H2, ``+area`` in S2).  Area is reported as 0 for E2.
    """
    theta = corner_angles(mesh, metric)
    total = float(np.sum(vertex_defect(mesh, theta)))
    target = TWO_PI * mesh.euler_characteristic
    areas = triangle_areas(metric.geometry, theta)
    area = 0.0 if areas is None else float(np.sum(areas))
    if metric.geometry is Geometry.H2:
        residual = total - target - area
    elif metric.geometry is Geometry.S2:
        residual = total - target + area
    else:
        residual = total - target
    return total, area, residual


def curvature_report(mesh: Mesh, metric: PolyhedralMetric, functional: str | None = None,
                     h: float | None = None) -> CurvatureReport:
    k = vertex_curvature(mesh, metric)
    total, area, residual = gauss_bonnet(mesh, metric)
    edge = None
    if functional == "phi":
        edge = phi_curvature(mesh, metric, h)
    elif functional == "psi":
        edge = psi_curvature(mesh, metric, h)
    elif functional is not None:
        raise ValueError(f"unknown functional {functional!r}")
    return CurvatureReport(k, total, area, residual, edge, functional, h)
