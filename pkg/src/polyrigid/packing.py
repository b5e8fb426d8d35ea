"""Inversive distance circle packings and their extended concave action.

For radii ``r`` and edge inversive distances ``I`` the edge lengths are

* E2: ``l^2 = r_u^2 + r_v^2 + 2 I r_u r_v``
* H2: ``cosh l = cosh r_u cosh r_v + I sinh r_u sinh r_v``
* S2: ``cos l = cos r_u cos r_v + I sin r_u sin r_v`` (evaluation only)

Coordinates are ``u = ln r`` (E2) and ``u = ln tanh(r/2)`` (H2).  The
corner angles, extended by constants across degenerate triangles, are the
partial derivatives of a concave potential; the energy minimised here is

    W(u) = -sum_triangles F(u_i, u_j, u_k) + sum_i (2 pi - a_i) u_i

whose gradient is the extended curvature minus the target, ``k(u) - a``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import geom, integrals
from .curvature import TWO_PI, triangle_lengths, vertex_defect
from .errors import NoSolutionPossible, RangeError, TargetUnattainable
from .geom import Geometry
from .mesh import Mesh
from .solver import Problem, SolveReport, SolverConfig, minimize

log = logging.getLogger(__name__)

NEGATIVE_I_WARNING = ("inversive distances below 0 are unsupported by the rigidity theory; "
                      "results are experimental")


@dataclass
class PackingData:
    geometry: Geometry
    inversive: np.ndarray
    radii: np.ndarray
    allow_negative_inversive: bool = False

    def __post_init__(self):
        self.geometry = Geometry.parse(self.geometry)
        self.inversive = np.asarray(self.inversive, dtype=float)
        self.radii = np.asarray(self.radii, dtype=float)
        check_inversive(self.inversive, self.allow_negative_inversive)
        if np.any(~(self.radii > 0.0)):
            raise RangeError("radii must be positive")


def check_inversive(inversive, allow_negative=False):
    inversive = np.asarray(inversive, dtype=float)
    if np.any(~np.isfinite(inversive)):
        raise RangeError("inversive distances must be finite")
    if np.any(inversive < 0.0):
        if not allow_negative:
            raise RangeError("inversive distances must be >= 0")
        if np.any(inversive < -1.0):
            raise RangeError("inversive distances must be >= -1")
        log.warning(NEGATIVE_I_WARNING)


def edge_length(geometry, r1, r2, inv):
    """Length of the edge joining circles of radii ``r1``, ``r2`` at inversive distance ``inv``."""
    geometry = Geometry.parse(geometry)
    r1, r2, inv = (np.asarray(x, dtype=float) for x in (r1, r2, inv))
    if geometry is Geometry.E2:
        return np.sqrt(r1 * r1 + r2 * r2 + 2.0 * inv * r1 * r2)
    if geometry is Geometry.H2:
        # cosh l - 1 written without cancellation for small radii
        excess = (np.sinh(0.5 * (r1 + r2)) ** 2 + np.sinh(0.5 * (r1 - r2)) ** 2
                  + inv * np.sinh(r1) * np.sinh(r2))
        return 2.0 * np.arcsinh(np.sqrt(0.5 * excess))
    c = np.cos(r1) * np.cos(r2) + inv * np.sin(r1) * np.sin(r2)
    return np.arccos(np.clip(c, -1.0, 1.0))


def lengths_from_radii(mesh: Mesh, data: PackingData) -> np.ndarray:
    i, j = mesh.edges[:, 0], mesh.edges[:, 1]
    return edge_length(data.geometry, data.radii[i], data.radii[j], data.inversive)


def to_u(geometry, radii) -> np.ndarray:
    geometry = Geometry.parse(geometry)
    r = np.asarray(radii, dtype=float)
    if np.any(~(r > 0.0)):
        raise RangeError("radii must be positive")
    if geometry is Geometry.E2:
        return np.log(r)
    if geometry is Geometry.H2:
        # ln tanh(r/2) = log1p(-2 / (e^r + 1)) keeps u < 0 in the far tail
        with np.errstate(over="ignore"):
            tail = np.log1p(-2.0 / (np.exp(r) + 1.0))
        return np.where(r < 1.0, np.log(np.tanh(0.5 * r)), tail)
    raise RangeError(f"no packing coordinates for {geometry}")


def from_u(geometry, u) -> np.ndarray:
    geometry = Geometry.parse(geometry)
    u = np.asarray(u, dtype=float)
    if geometry is Geometry.E2:
        return np.exp(u)
    if geometry is Geometry.H2:
        if np.any(~(u < 0.0)):
            raise RangeError("hyperbolic packing coordinates must be negative")
        # 2 artanh(e^u), with 1 - e^u from expm1 when e^u is close to 1
        with np.errstate(divide="ignore"):
            tail = np.log1p(np.exp(u)) - np.log(-np.expm1(u))
        return np.where(u < -1.0, 2.0 * np.arctanh(np.exp(np.minimum(u, -1.0))), tail)
    raise RangeError(f"no packing coordinates for {geometry}")


def _triangle_lengths_from_radii(geometry, I3, r3):
    # corner m faces the edge joining the other two corners, with inversive distance I3[m]
    I3 = np.asarray(I3, dtype=float)
    r3 = np.asarray(r3, dtype=float)
    r_next = np.roll(r3, -1, axis=-1)
    r_prev = np.roll(r3, -2, axis=-1)
    return edge_length(geometry, r_next, r_prev, I3)


def extended_triangle_angles(geometry, I_triple, r_triple) -> np.ndarray:
    """Extended angles of the triangle of three mutually placed circles.

    ``I_triple[m]`` is the inversive distance on the edge facing corner ``m``.
    """
    geometry = Geometry.parse(geometry)
    L = _triangle_lengths_from_radii(geometry, I_triple, r_triple)
    return geom.extended_angles_batch(geometry, L)


def classify_triangle(geometry, I_triple, r_triple) -> geom.DomainClass:
    geometry = Geometry.parse(geometry)
    L = _triangle_lengths_from_radii(geometry, I_triple, r_triple)
    return geom.classify(geometry, L)


def _mesh_angles(mesh: Mesh, geometry, inversive, u):
    r = from_u(geometry, u)
    l = edge_length(geometry, r[mesh.edges[:, 0]], r[mesh.edges[:, 1]], inversive)
    L = triangle_lengths(mesh, l)
    return L, geom.extended_angles_batch(geometry, L)


def extended_curvature(mesh: Mesh, geometry, inversive, u) -> np.ndarray:
    """Vertex curvature computed from extended angles; defined for every ``u``."""
    geometry = Geometry.parse(geometry)
    _, theta = _mesh_angles(mesh, geometry, inversive, u)
    return vertex_defect(mesh, theta)


def packing_energy_gradient(mesh: Mesh, geometry, inversive, u, target) -> np.ndarray:
    return extended_curvature(mesh, geometry, inversive, u) - np.asarray(target, dtype=float)


def _check_domain(geometry, u):
    if Geometry.parse(geometry) is Geometry.H2 and np.any(~(np.asarray(u) < 0.0)):
        raise RangeError("hyperbolic packing coordinates must be negative")


def packing_energy(mesh: Mesh, geometry, inversive, u, target, base_u, *, tol=1e-11) -> float:
    """``W(u) - W(base_u)`` by adaptive quadrature of the gradient along the segment."""
    u = np.asarray(u, dtype=float)
    base_u = np.asarray(base_u, dtype=float)
    _check_domain(geometry, u)
    _check_domain(geometry, base_u)
    d = u - base_u
    if not np.any(d):
        return 0.0
    f = lambda t: float(packing_energy_gradient(mesh, geometry, inversive, base_u + t * d, target) @ d)  # noqa: E731

    def label(t):
        L, _ = _mesh_angles(mesh, geometry, inversive, base_u + t * d)
        return geom.classify_batch(geometry, L).tobytes()

    # angles are only Hoelder continuous across strata, so integrate piecewise
    return integrals.quad_segments(f, integrals.stratum_breaks(label), tol=tol)


def packing_energy_path(mesh: Mesh, geometry, inversive, points, target, *, tol=1e-11) -> float:
    """Energy difference along a piecewise-linear path through ``points``."""
    pts = [np.asarray(p, dtype=float) for p in points]
    return sum(packing_energy(mesh, geometry, inversive, b, target, a, tol=tol)
               for a, b in zip(pts[:-1], pts[1:]))


def critical_radius(geometry, I_triple, k: int, r_i: float, r_j: float, *, xtol=1e-14):
    """Radius at corner ``k`` below which the triangle degenerates at ``k``.

    ``i`` and ``j`` are the remaining corners in increasing order.  Returns
    ``None`` when the inversive distance on the edge facing ``k`` is at most 1,
    in which case no radius makes the triangle degenerate there.
    """
    geometry = Geometry.parse(geometry)
    I3 = np.asarray(I_triple, dtype=float)
    i, j = [m for m in range(3) if m != k]
    if I3[k] <= 1.0:
        return None
    target = float(edge_length(geometry, r_i, r_j, I3[k]))

    def excess(rk):
        # l_i joins corners j,k; l_j joins corners i,k
        return float(edge_length(geometry, rk, r_j, I3[i]) + edge_length(geometry, rk, r_i, I3[j])) - target

    hi = max(r_i, r_j, 1.0)
    while excess(hi) < 0.0:
        hi *= 2.0
    return optimize.brentq(excess, 0.0, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)


def _degenerate_fn(mesh, geometry, inversive):
    def degenerate(u):
        L, _ = _mesh_angles(mesh, geometry, inversive, u)
        return bool(np.any(geom.classify_batch(geometry, L) != geom.INTERIOR))
    return degenerate


def packing_problem(mesh: Mesh, geometry, inversive, target) -> Problem:
    geometry = Geometry.parse(geometry)
    n = mesh.n_vertices
    if geometry is Geometry.E2:
        lo, hi, normal = np.full(n, -np.inf), np.full(n, np.inf), np.ones(n)
    elif geometry is Geometry.H2:
        lo, hi, normal = np.full(n, -np.inf), np.zeros(n), None
    else:
        raise RangeError("packing solver supports E2 and H2 only")
    return Problem(
        gradient=lambda u: packing_energy_gradient(mesh, geometry, inversive, u, target),
        lo=lo, hi=hi,
        degenerate=_degenerate_fn(mesh, geometry, inversive),
        slice_normal=normal,
    )


def solve_packing(mesh: Mesh, geometry, inversive, target, init_radii=None,
                  config: SolverConfig | None = None, *, allow_negative_inversive=False,
                  init_u=None) -> tuple[PackingData, SolveReport]:
    """Find radii whose packing has vertex curvature ``target``."""
    geometry = Geometry.parse(geometry)
    if geometry is Geometry.S2:
        raise RangeError("no spherical packing solver")
    if not mesh.connected:
        raise ValueError("solvers require a connected surface")
    inversive = np.asarray(inversive, dtype=float)
    target = np.asarray(target, dtype=float)
    check_inversive(inversive, allow_negative_inversive)
    if geometry is Geometry.E2:
        need = TWO_PI * mesh.euler_characteristic
        if abs(target.sum() - need) > 1e-9 * max(1.0, np.abs(target).sum()):
            raise NoSolutionPossible(
                f"Euclidean targets must sum to 2*pi*chi = {need:.17g}, got {target.sum():.17g}")
    if init_u is None:
        init_radii = np.ones(mesh.n_vertices) if init_radii is None else init_radii
        init_u = to_u(geometry, init_radii)
    u0 = np.asarray(init_u, dtype=float).copy()
    _check_domain(geometry, u0)
    gauge = None
    if geometry is Geometry.E2:
        gauge = float(u0.mean())
        u0 -= gauge

    problem = packing_problem(mesh, geometry, inversive, target)
    u, report = minimize(problem, u0, config)
    report.gauge = gauge
    if problem.degenerate(u):
        report.status = "TargetUnattainable"
        report.message = "critical point lies in a degenerate region"
        raise TargetUnattainable("extended curvature matches only at a degenerate configuration", report)
    return PackingData(geometry, inversive, from_u(geometry, u), allow_negative_inversive), report


def packing_curvature(mesh: Mesh, data: PackingData) -> np.ndarray:
    """Vertex curvature of a packing (extended where triangles degenerate)."""
    if data.geometry is Geometry.S2:
        l = lengths_from_radii(mesh, data)
        L = triangle_lengths(mesh, l)
        return vertex_defect(mesh, geom.extended_angles_batch(Geometry.S2, L))
    return extended_curvature(mesh, data.geometry, data.inversive, to_u(data.geometry, data.radii))
