"""Sampling harnesses for the structural properties behind the solvers.

* extension continuity of the angle functions across the degenerate strata
* symmetry of the packing angle Jacobian in ``u`` (closedness of the form)
* monotonicity of energy gradients along random segments (convexity)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geom, packing, schlaefli
from .geom import Geometry
from .mesh import Mesh
from .schlaefli import ClosednessReport, FunctionalSpec, _mixed_asymmetry

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# extension continuity

@dataclass
class CrossingReport:
    geometry: str
    max_jump: float
    strata_exact: bool
    n: int


def _boundary_point(geometry: Geometry, rng):
    """A point on the boundary of the natural domain and its outward normal."""
    if geometry is Geometry.S2 and rng.random() < 0.25:
        while True:
            l = rng.uniform(2 * math.pi / 3 + 0.05, math.pi - 0.05, 3)
            l *= TWO_PI / l.sum()
            gaps = [l[(k + 1) % 3] + l[(k + 2) % 3] - l[k] for k in range(3)]
            if min(gaps) > 0.1 and l.max() < math.pi - 0.05:
                return l, np.ones(3) / math.sqrt(3.0)
    k = int(rng.integers(3))
    i, j = (k + 1) % 3, (k + 2) % 3
    l = np.empty(3)
    while True:
        if geometry is Geometry.S2:
            l[i], l[j] = rng.uniform(0.1, 1.4, 2)
        else:
            l[i], l[j] = np.exp(rng.uniform(-1.0, 1.0, 2))
        l[k] = l[i] + l[j]
        if geometry is not Geometry.S2 or l[k] < math.pi - 0.05:
            break
    n = -np.ones(3)
    n[k] = 1.0
    return l, n / math.sqrt(3.0)


def extension_crossings(geometry, samples: int = 200, seed: int = 0, delta: float = 1e-7) -> CrossingReport:
    """Compare extended angles at distance ``delta`` on both sides of the boundary.

    Reports the largest sup-norm jump and whether every outside value lies
    exactly in ``{0, pi}``.
    """
    geometry = Geometry.parse(geometry)
    rng = np.random.default_rng(seed)
    worst = 0.0
    exact = True
    for _ in range(samples):
        l, n = _boundary_point(geometry, rng)
        inside = geom.extended_angles_batch(geometry, l - delta * n)
        outside = geom.extended_angles_batch(geometry, l + delta * n)
        worst = max(worst, float(np.max(np.abs(inside - outside))))
        exact &= bool(np.all((outside == 0.0) | (outside == math.pi)))
    return CrossingReport(geometry.value, worst, exact, samples)


# --------------------------------------------------------------------------
# packing closedness

def _random_inversive(rng, n=3):
    return rng.uniform(0.0, 3.0, n)


def _radius_sample(geometry: Geometry, rng, n=3):
    if geometry is Geometry.E2:
        return np.exp(rng.uniform(-1.2, 1.2, n))
    return rng.uniform(0.1, 3.0, n)


def sample_packing_interior(geometry: Geometry, rng, slack=0.05):
    while True:
        I3 = _random_inversive(rng)
        r3 = _radius_sample(geometry, rng)
        L = packing._triangle_lengths_from_radii(geometry, I3, r3)
        gaps = [L[(k + 1) % 3] + L[(k + 2) % 3] - L[k] for k in range(3)]
        if min(gaps) > slack * L.max():
            return I3, r3


def sample_packing_degenerate(geometry: Geometry, rng, k: int):
    """Triple strictly inside the stratum where corner ``k`` degenerates."""
    i, j = [m for m in range(3) if m != k]
    while True:
        I3 = _random_inversive(rng)
        I3[k] = rng.uniform(1.2, 4.0)
        r3 = _radius_sample(geometry, rng)
        f = packing.critical_radius(geometry, I3, k, r3[i], r3[j])
        r3[k] = f * rng.uniform(0.1, 0.9)
        if packing.classify_triangle(geometry, I3, r3).tag == "Degenerate":
            return I3, r3


def packing_closedness(geometry, samples: int = 1000, seed: int = 0, strata: str = "all",
                       step: float = 3e-5) -> ClosednessReport:
    """Mixed-partial asymmetry of ``d theta_i / d u_j`` for single packed triangles."""
    geometry = Geometry.parse(geometry)
    rng = np.random.default_rng(seed)
    hi = 0.0 if geometry is Geometry.H2 else np.inf
    worst_int = worst_deg = 0.0
    n_int = n_deg = 0
    for s in range(samples):
        degenerate = strata == "degenerate" or (strata == "all" and s % 2 == 1)
        if degenerate:
            I3, r3 = sample_packing_degenerate(geometry, rng, int(rng.integers(3)))
        else:
            I3, r3 = sample_packing_interior(geometry, rng)
        u = packing.to_u(geometry, r3)

        def angles_of_u(v, I3=I3):
            return packing.extended_triangle_angles(geometry, I3, packing.from_u(geometry, v))

        a = _mixed_asymmetry(angles_of_u, u, step, -np.inf, hi)
        if degenerate:
            worst_deg, n_deg = max(worst_deg, a), n_deg + 1
        else:
            worst_int, n_int = max(worst_int, a), n_int + 1
    return ClosednessReport(f"packing {geometry.name}", worst_int,
                            worst_deg if n_deg else None, n_int, n_deg)


# --------------------------------------------------------------------------
# monotone gradients

@dataclass
class MonotoneReport:
    label: str
    min_inner: float
    n: int


def packing_u_box(geometry: Geometry, n: int, rng, radius: float = 2.0):
    """Uniform ``u`` in a box around the unit-radius packing (clipped into the domain)."""
    c = float(packing.to_u(geometry, 1.0))
    u = rng.uniform(c - radius, c + radius, n)
    if geometry is Geometry.H2:
        u = np.minimum(u, -1e-3)
    return u


def packing_monotone(mesh: Mesh, geometry, pairs: int = 500, seed: int = 0,
                     inversive_max: float = 3.0) -> MonotoneReport:
    """Minimum of ``(grad W(p) - grad W(q)) . (p - q)`` over random pairs.

    Inversive distances are redrawn per pair from ``[0, inversive_max]`` so
    that segments cross degenerate strata.
    """
    geometry = Geometry.parse(geometry)
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(pairs):
        inv = rng.uniform(0.0, inversive_max, mesh.n_edges)
        p = packing_u_box(geometry, mesh.n_vertices, rng)
        q = packing_u_box(geometry, mesh.n_vertices, rng)
        gp = packing.extended_curvature(mesh, geometry, inv, p)
        gq = packing.extended_curvature(mesh, geometry, inv, q)
        worst = min(worst, float((gp - gq) @ (p - q)))
    return MonotoneReport(f"packing {geometry.name}", worst, pairs)


def spec_u_sample(mesh: Mesh, spec: FunctionalSpec, rng, radius: float = 2.0, max_tries: int = 10000):
    """Random chart point near the unit metric; admissible for barrier specs.

    For barrier specs the box radius shrinks geometrically until an
    admissible draw is found, since the energy is infinite elsewhere.
    """
    _, gJ = schlaefli.interval_of(spec.chart)
    c = float(schlaefli.u_from_lengths(spec, np.ones(1))[0])
    lo, hi = gJ.lo, gJ.hi
    pad = 1e-6
    for attempt in range(max_tries):
        u = rng.uniform(max(c - radius, lo + pad), min(c + radius, hi - pad), mesh.n_edges)
        if not spec.barrier or schlaefli.admissible_u(mesh, spec, u):
            return u
        if attempt % 20 == 19:
            radius *= 0.7
    raise RuntimeError(f"no admissible start found for {spec}")


def schlaefli_monotone(mesh: Mesh, spec: FunctionalSpec, pairs: int = 500, seed: int = 0) -> MonotoneReport:
    """Minimum of ``(grad W(p) - grad W(q)) . (p - q)`` for the coefficient energy."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    zero = np.zeros(mesh.n_edges)
    for n in range(pairs):
        # alternate a narrow box (mostly genuine triangles) and a wide one
        radius = 0.3 if n % 2 else 2.0
        p = spec_u_sample(mesh, spec, rng, radius)
        q = spec_u_sample(mesh, spec, rng, radius)
        gp = schlaefli.schlaefli_energy_gradient(mesh, spec, p, zero)
        gq = schlaefli.schlaefli_energy_gradient(mesh, spec, q, zero)
        worst = min(worst, float((gp - gq) @ (p - q)))
    return MonotoneReport(str(spec), worst, pairs)
