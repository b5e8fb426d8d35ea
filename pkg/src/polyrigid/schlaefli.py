"""Schlaefli-type 1-forms over edge lengths and the prescribed-curvature solvers.

Per triangle with inner angles ``theta`` (extended by constants off the
natural domain) the 1-forms, written in chart coordinates ``u_i = g(l_i)``,
have coefficients

* ``phi``: ``i_sin(h, theta_i)`` (E2, S2, H2)
* ``psi`` (H2): ``i_cos(h, (theta_i - theta_j - theta_k) / 2)``

The ``psi`` coefficient is the negative of the Leibon-type summand of
``psi_h``; :func:`psi_of_coefficients` converts.  Summing a coefficient over
the two triangles at an edge gives that edge's curvature, so the convex
energy ``W(u) = sum_triangles F(u) - sum_edges a_e u_e`` has gradient
"curvature minus target".
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import geom, integrals
from .curvature import PolyhedralMetric, adjacent_half_excess, edge_sum, triangle_lengths
from .errors import DivergenceGuard, NoSolutionPossible, RangeError, TargetUnattainable, UnsupportedSpec
from .geom import Geometry
from .integrals import ChartCase, ChartSpec, chart, chart_inverse, i_cos, i_sin, interval_of
from .mesh import Mesh
from .solver import Problem, SolveReport, SolverConfig, minimize

log = logging.getLogger(__name__)

ANGLE_GUARD = 1e-8


@dataclass(frozen=True)
class FunctionalSpec:
    """Which curvature functional, in which geometry, with which exponent ``h``.

    ``psi`` in E2 is stored as ``phi`` (the two coincide in the coefficient
    convention); ``psi`` in S2 has no known chart and is rejected.
    """

    which: str
    geometry: Geometry
    h: float

    def __post_init__(self):
        which = self.which.lower()
        geometry = Geometry.parse(self.geometry)
        if which not in ("phi", "psi"):
            raise ValueError(f"functional must be 'phi' or 'psi', got {self.which!r}")
        if which == "psi" and geometry is Geometry.E2:
            which = "phi"
        if which == "psi" and geometry is Geometry.S2:
            raise UnsupportedSpec("psi curvature in S2 has no known convex variational principle")
        object.__setattr__(self, "which", which)
        object.__setattr__(self, "geometry", geometry)
        object.__setattr__(self, "h", float(self.h))

    @property
    def chart(self) -> ChartSpec:
        if self.geometry is Geometry.E2:
            return ChartSpec(ChartCase.EUCLID_H0 if self.h == 0 else ChartCase.EUCLID_HNZ, self.h)
        if self.geometry is Geometry.S2:
            return ChartSpec(ChartCase.SPHERICAL, self.h)
        if self.which == "phi":
            return ChartSpec(ChartCase.HYPERBOLIC_SINH, self.h)
        return ChartSpec(ChartCase.HYPERBOLIC_COTH, self.h)

    @property
    def solver_allowed(self) -> bool:
        return not (self.which == "phi" and self.geometry is Geometry.H2)

    @property
    def barrier(self) -> bool:
        """Extension constants are infinite: the energy is +inf off the natural domain."""
        return self.h <= -1.0

    @property
    def scale_invariant(self) -> bool:
        return self.geometry is Geometry.E2

    def __str__(self):
        return f"({self.which}, {self.geometry.name}, h={self.h:g})"


def parse_spec(which, geometry, h) -> FunctionalSpec:
    return FunctionalSpec(which, Geometry.parse(geometry), h)


def _check_J(spec: FunctionalSpec, L):
    J, _ = interval_of(spec.chart)
    if not J.contains(L):
        raise RangeError(f"lengths outside J=({J.lo}, {J.hi})")


def coefficients_from_angles(spec: FunctionalSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if spec.which == "phi":
        return np.asarray(i_sin(spec.h, theta))
    return np.asarray(i_cos(spec.h, -adjacent_half_excess(theta)))


def form_coefficients(spec: FunctionalSpec, l) -> np.ndarray:
    """Coefficients of ``du_i`` for one length triple (or an ``(..., 3)`` array)."""
    L = np.asarray(l, dtype=float)
    _check_J(spec, L)
    theta = geom.extended_angles_batch(spec.geometry, L)
    return coefficients_from_angles(spec, theta)


def psi_of_coefficients(coefficient_sum):
    """Convert a ``psi`` coefficient sum to ``psi_h`` in the Leibon-type sign convention."""
    return -np.asarray(coefficient_sum)


def lengths_from_u(spec: FunctionalSpec, u) -> np.ndarray:
    return np.asarray(chart_inverse(spec.chart, np.asarray(u, dtype=float)), dtype=float)


def u_from_lengths(spec: FunctionalSpec, l) -> np.ndarray:
    return np.asarray(chart(spec.chart, np.asarray(l, dtype=float)), dtype=float)


def edge_coefficient_sum(mesh: Mesh, spec: FunctionalSpec, u) -> np.ndarray:
    """Per-edge sum of the coefficients over the two incident triangles."""
    L = triangle_lengths(mesh, lengths_from_u(spec, u))
    theta = geom.extended_angles_batch(spec.geometry, L)
    return edge_sum(mesh, coefficients_from_angles(spec, theta))


def schlaefli_energy_gradient(mesh: Mesh, spec: FunctionalSpec, u, target) -> np.ndarray:
    return edge_coefficient_sum(mesh, spec, u) - np.asarray(target, dtype=float)


def schlaefli_energy(mesh: Mesh, spec: FunctionalSpec, u, target, base_u, *, tol=1e-11) -> float:
    """``W(u) - W(base_u)`` by adaptive quadrature along the straight segment."""
    u = np.asarray(u, dtype=float)
    base_u = np.asarray(base_u, dtype=float)
    d = u - base_u
    if not np.any(d):
        return 0.0
    f = lambda t: float(schlaefli_energy_gradient(mesh, spec, base_u + t * d, target) @ d)  # noqa: E731

    def label(t):
        L = triangle_lengths(mesh, lengths_from_u(spec, base_u + t * d))
        return geom.classify_batch(spec.geometry, L).tobytes()

    # coefficients are only Hoelder continuous across strata, so integrate piecewise
    return integrals.quad_segments(f, integrals.stratum_breaks(label), tol=tol)


def schlaefli_energy_path(mesh: Mesh, spec: FunctionalSpec, points, target, *, tol=1e-11) -> float:
    pts = [np.asarray(p, dtype=float) for p in points]
    return sum(schlaefli_energy(mesh, spec, b, target, a, tol=tol) for a, b in zip(pts[:-1], pts[1:]))


def admissible_u(mesh: Mesh, spec: FunctionalSpec, u) -> bool:
    """All triangles genuine, with angles safely inside the divergence guard."""
    L = triangle_lengths(mesh, lengths_from_u(spec, u))
    if np.any(geom.classify_batch(spec.geometry, L) != geom.INTERIOR):
        return False
    if not spec.barrier:
        return True
    theta = geom.extended_angles_batch(spec.geometry, L)
    if spec.which == "phi":
        return bool(np.all((theta > ANGLE_GUARD) & (theta < math.pi - ANGLE_GUARD)))
    arg = adjacent_half_excess(theta)
    return bool(np.all(np.abs(arg) < 0.5 * math.pi - ANGLE_GUARD))


def schlaefli_problem(mesh: Mesh, spec: FunctionalSpec, target, slice_normal=None) -> Problem:
    _, gJ = interval_of(spec.chart)
    n = mesh.n_edges

    def degenerate(u):
        L = triangle_lengths(mesh, lengths_from_u(spec, u))
        return bool(np.any(geom.classify_batch(spec.geometry, L) != geom.INTERIOR))

    return Problem(
        gradient=lambda u: schlaefli_energy_gradient(mesh, spec, u, target),
        lo=np.full(n, gJ.lo), hi=np.full(n, gJ.hi),
        admissible=(lambda u: admissible_u(mesh, spec, u)) if spec.barrier else None,
        degenerate=degenerate,
        slice_normal=slice_normal,
    )


def solve_prescribed(mesh: Mesh, spec: FunctionalSpec, target, init_lengths=None,
                     config: SolverConfig | None = None, *, init_u=None) -> tuple[PolyhedralMetric, SolveReport]:
    """Find edge lengths whose ``spec`` curvature (coefficient convention) is ``target``.

    E2 solutions are determined up to scale.  For ``h = 0`` the iterates live
    in the slice ``sum(u) = 0`` (product of lengths 1); for ``h != 0`` scaling
    acts multiplicatively on ``u`` and the iterates stay in the slice
    ``sum(u) = const`` through the starting point.
    """
    if not spec.solver_allowed:
        raise UnsupportedSpec(f"{spec}: closedness diagnostics only, no convexity to minimise")
    if not mesh.connected:
        raise ValueError("solvers require a connected surface")
    target = np.asarray(target, dtype=float)
    if init_u is None:
        init_lengths = np.ones(mesh.n_edges) if init_lengths is None else np.asarray(init_lengths, float)
        _check_J(spec, init_lengths)
        init_u = u_from_lengths(spec, init_lengths)
    u0 = np.asarray(init_u, dtype=float).copy()

    gauge = None
    normal = None
    if spec.geometry is Geometry.E2:
        normal = np.ones(mesh.n_edges)
        if spec.h == 0:
            # each triangle contributes (pi - 3 pi/2) along the scaling direction
            need = -0.5 * math.pi * mesh.n_triangles
            if abs(target.sum() - need) > 1e-9 * max(1.0, np.abs(target).sum()):
                raise NoSolutionPossible(f"h=0 Euclidean targets must sum to -pi*F/2 = {need:.17g}")
            gauge = float(u0.mean())
            u0 -= gauge
    problem = schlaefli_problem(mesh, spec, target, normal)
    if spec.barrier and not problem.admissible(u0):
        raise RangeError(f"{spec}: the initial metric must be admissible (energy is +inf elsewhere)")

    u, report = minimize(problem, u0, config)
    report.gauge = gauge
    if problem.degenerate(u):
        report.status = "TargetUnattainable"
        report.message = "critical point lies in a degenerate region"
        raise TargetUnattainable("curvature matches only at a degenerate configuration", report)
    return PolyhedralMetric(spec.geometry, lengths_from_u(spec, u)), report


def forward_target(mesh: Mesh, spec: FunctionalSpec, lengths) -> np.ndarray:
    """Coefficient-convention curvature of an admissible metric (solver target)."""
    return edge_coefficient_sum(mesh, spec, u_from_lengths(spec, lengths))


# --------------------------------------------------------------------------
# closedness diagnostics

@dataclass
class ClosednessReport:
    spec: str
    interior_max: float
    degenerate_max: float | None
    n_interior: int
    n_degenerate: int

    @property
    def max(self) -> float:
        vals = [self.interior_max] + ([self.degenerate_max] if self.degenerate_max is not None else [])
        return max(vals)


def _mixed_asymmetry(coef_of_u, u, step, lo=-np.inf, hi=np.inf):
    # fourth-order central differences; the stencil shrinks to stay inside g(J)
    jac = np.empty((3, 3))
    for j in range(3):
        room = min(u[j] - lo, hi - u[j])
        h = min(step * (1.0 + abs(u[j])), 0.02 * room)
        cols = []
        for m in (-2, -1, 1, 2):
            v = u.copy()
            v[j] += m * h
            cols.append(coef_of_u(v))
        # written as differences so equal values cancel exactly
        jac[:, j] = (8.0 * (cols[2] - cols[1]) - (cols[3] - cols[0])) / (12.0 * h)
    return float(np.max(np.abs(jac - jac.T)))


def sample_interior_triple(geometry: Geometry, rng, slack=0.08) -> np.ndarray:
    """Random genuine triangle bounded away from the degenerate strata."""
    while True:
        if geometry is Geometry.S2:
            l = rng.uniform(0.15, math.pi - 0.15, 3)
        else:
            l = np.exp(rng.uniform(-1.2, 1.2, 3))
        s = l.sum()
        gaps = [l[(k + 1) % 3] + l[(k + 2) % 3] - l[k] for k in range(3)]
        ok = min(gaps) > slack * l.max()
        if geometry is Geometry.S2:
            ok = ok and 2 * math.pi - s > 0.3
        if ok:
            return l


def sample_degenerate_triple(geometry: Geometry, rng, stratum: int) -> np.ndarray:
    """Random triple inside degenerate component ``stratum`` (3 = spherical overflow)."""
    if stratum == 3:
        while True:
            l = rng.uniform(2 * math.pi / 3 + 0.1, math.pi - 0.08, 3)
            gaps = [l[(k + 1) % 3] + l[(k + 2) % 3] - l[k] for k in range(3)]
            if l.sum() > 2 * math.pi + 0.1 and min(gaps) > 0.1:
                return l
    k = stratum
    i, j = (k + 1) % 3, (k + 2) % 3
    l = np.empty(3)
    while True:
        if geometry is Geometry.S2:
            l[i], l[j] = rng.uniform(0.1, 1.2, 2)
            l[k] = (l[i] + l[j]) * rng.uniform(1.08, 1.6)
            if l[k] < math.pi - 0.08:
                return l
        else:
            l[i], l[j] = np.exp(rng.uniform(-1.2, 1.2, 2))
            l[k] = (l[i] + l[j]) * rng.uniform(1.08, 2.0)
            return l


def closedness_diagnostic(spec: FunctionalSpec, samples: int = 1000, seed: int = 0,
                          strata: str = "all", step: float = 3e-5) -> ClosednessReport:
    """Finite-difference mixed-partial asymmetry of the coefficients in chart coordinates.

    ``strata`` is ``"all"``, ``"interior"`` or ``"degenerate"``.  Degenerate
    strata are skipped when the extension constants are infinite.
    """
    rng = np.random.default_rng(seed)
    chart_spec = spec.chart
    _, gJ = interval_of(chart_spec)

    def coef_of_u(u):
        return form_coefficients(spec, chart_inverse(chart_spec, u))

    kinds = []
    n_strata = 4 if spec.geometry is Geometry.S2 else 3
    for s in range(samples):
        if strata == "interior" or (strata == "all" and (s % 2 == 0 or spec.barrier)):
            kinds.append(-1)
        elif strata in ("all", "degenerate") and not spec.barrier:
            kinds.append(int(rng.integers(n_strata)))
    worst_int, worst_deg = 0.0, 0.0
    n_int = n_deg = 0
    for kind in kinds:
        if kind < 0:
            l = sample_interior_triple(spec.geometry, rng)
        else:
            l = sample_degenerate_triple(spec.geometry, rng, kind)
        u = np.asarray(chart(chart_spec, l))
        try:
            a = _mixed_asymmetry(coef_of_u, u, step, gJ.lo, gJ.hi)
        except DivergenceGuard:
            continue
        if kind < 0:
            worst_int, n_int = max(worst_int, a), n_int + 1
        else:
            worst_deg, n_deg = max(worst_deg, a), n_deg + 1
    return ClosednessReport(str(spec), worst_int, worst_deg if n_deg else None, n_int, n_deg)
