"""Triangle trigonometry in the three constant-curvature geometries.

Corner ``i`` of a triangle faces the edge of length ``l[i]``.  All indices
are 0-based.  Angles are evaluated with the half-angle (l'Huilier-type)
formulas, which are algebraically identical to the cosine laws but keep full
relative accuracy next to degenerate triangles, where the cosine-law
``arccos`` loses half of the available digits.

Outside the natural domain (triangle inequalities, plus perimeter below
``2*pi`` on the sphere) angles are extended by constants: the corner facing
an over-long edge gets ``pi`` and the other two get ``0``; a spherical triple
with perimeter at least ``2*pi`` gets ``pi`` at every corner.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTriangle, NonpositiveLength, SphericalRange, TooCloseToBoundary

TWO_PI = 2.0 * math.pi

# batch classification codes
INTERIOR = -1
OVERFLOW = 3


class Geometry(enum.Enum):
    E2 = "e2"
    H2 = "h2"
    S2 = "s2"

    @classmethod
    def parse(cls, value) -> "Geometry":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class DomainClass:
    """Stratum of a length triple.

    ``tag`` is one of ``"Interior"``, ``"Degenerate"``, ``"SphericalOverflow"``
    or ``"Boundary"``.  ``k`` is the index of the over-long edge for
    ``Degenerate``/``Boundary``; a ``Boundary`` with ``k=None`` is the
    spherical perimeter boundary.
    """

    tag: str
    k: int | None = None

    @property
    def interior(self) -> bool:
        return self.tag == "Interior"

    def __str__(self):
        return self.tag if self.k is None else f"{self.tag}({self.k})"


def check_lengths(geometry: Geometry, l) -> np.ndarray:
    l = np.asarray(l, dtype=float)
    if l.shape[-1] != 3:
        raise ValueError("length triples must have last dimension 3")
    if np.any(~np.isfinite(l)) or np.any(l <= 0.0):
        raise NonpositiveLength(f"lengths must be positive: {l}")
    if geometry is Geometry.S2 and np.any(l >= math.pi):
        raise SphericalRange(f"spherical lengths must lie in (0, pi): {l}")
    return l


def classify(geometry, l, tol: float = 0.0) -> DomainClass:
    """Locate a single length triple in the natural domain or its complement."""
    geometry = Geometry.parse(geometry)
    l = check_lengths(geometry, l)
    total = float(l.sum())
    slack = [float(l[(k + 1) % 3] + l[(k + 2) % 3] - l[k]) for k in range(3)]
    if tol > 0.0:
        for k in range(3):
            if abs(slack[k]) <= tol:
                return DomainClass("Boundary", k)
        if geometry is Geometry.S2 and abs(total - TWO_PI) <= tol:
            return DomainClass("Boundary", None)
    for k in range(3):
        if slack[k] <= 0.0:
            return DomainClass("Degenerate", k)
    if geometry is Geometry.S2 and total >= TWO_PI:
        return DomainClass("SphericalOverflow")
    return DomainClass("Interior")


def classify_batch(geometry: Geometry, L: np.ndarray) -> np.ndarray:
    """Vectorised :func:`classify` with ``tol=0``; returns integer codes.

    ``-1`` interior, ``0..2`` degenerate at that index, ``3`` spherical overflow.
    """
    L = np.asarray(L, dtype=float)
    code = np.full(L.shape[:-1], INTERIOR, dtype=np.int8)
    for k in (2, 1, 0):
        bad = L[..., (k + 1) % 3] + L[..., (k + 2) % 3] <= L[..., k]
        code[bad] = k
    if geometry is Geometry.S2:
        code[(code == INTERIOR) & (L.sum(axis=-1) >= TWO_PI)] = OVERFLOW
    return code


def _half_angle(geometry: Geometry, L: np.ndarray) -> np.ndarray:
    # x_i = s - l_i written without forming s to limit cancellation
    l1, l2, l3 = L[..., 0], L[..., 1], L[..., 2]
    x = np.stack([0.5 * (l2 + l3 - l1), 0.5 * (l1 + l3 - l2), 0.5 * (l1 + l2 - l3)], axis=-1)
    s = 0.5 * (l1 + l2 + l3)
    out = np.empty_like(L)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            if geometry is Geometry.E2:
                num = np.sqrt(x[..., j] * x[..., k])
                den = np.sqrt(s * x[..., i])
            elif geometry is Geometry.H2:
                # sinh products rescaled by exp(-x) factors, exponents collapse
                a = -np.expm1(-2.0 * x)
                num = np.exp(0.5 * (L[..., i] - L[..., j] - L[..., k])) * np.sqrt(a[..., j] * a[..., k])
                den = np.sqrt(-np.expm1(-2.0 * s) * a[..., i])
            else:
                num = np.sqrt(np.sin(x[..., j]) * np.sin(x[..., k]))
                den = np.sqrt(np.sin(s) * np.sin(x[..., i]))
            out[..., i] = 2.0 * np.arctan2(num, den)
    return out


def extended_angles_batch(geometry, L) -> np.ndarray:
    """Extended inner angles for an ``(..., 3)`` array of length triples."""
    geometry = Geometry.parse(geometry)
    L = np.asarray(L, dtype=float)
    code = classify_batch(geometry, L)
    theta = _half_angle(geometry, L)
    for k in range(3):
        m = code == k
        if np.any(m):
            theta[m] = 0.0
            theta[m, k] = math.pi
    m = code == OVERFLOW
    if np.any(m):
        theta[m] = math.pi
    return theta


def angles(geometry, l) -> np.ndarray:
    """Inner angles of a genuine (non-degenerate) triangle."""
    geometry = Geometry.parse(geometry)
    cls = classify(geometry, l)
    if not cls.interior:
        raise DegenerateTriangle(f"lengths {tuple(np.asarray(l))} are {cls}")
    return extended_angles_batch(geometry, np.asarray(l, dtype=float))


def extended_angles(geometry, l) -> np.ndarray:
    """Inner angles extended by the constants 0 and pi off the natural domain."""
    geometry = Geometry.parse(geometry)
    l = check_lengths(geometry, l)
    return extended_angles_batch(geometry, l)


def boundary_distance(geometry, l) -> float:
    """Euclidean distance in length space from ``l`` to the boundary of the natural domain."""
    geometry = Geometry.parse(geometry)
    l = np.asarray(l, dtype=float)
    d = min(abs(l[(k + 1) % 3] + l[(k + 2) % 3] - l[k]) for k in range(3)) / math.sqrt(3.0)
    if geometry is Geometry.S2:
        d = min(d, abs(TWO_PI - l.sum()) / math.sqrt(3.0))
    return float(d)


def angle_jacobian(geometry, l, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian ``J[i, j] = d theta_i / d l_j``."""
    geometry = Geometry.parse(geometry)
    l = check_lengths(geometry, l)
    if not classify(geometry, l).interior or boundary_distance(geometry, l) <= step:
        raise TooCloseToBoundary(f"{tuple(l)} is within {step} of a degenerate stratum")
    jac = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = step
        jac[:, j] = (extended_angles_batch(geometry, l + e) - extended_angles_batch(geometry, l - e)) / (2.0 * step)
    return jac
