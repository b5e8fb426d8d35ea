"""Incomplete sine/cosine power integrals and the length charts built on them.

``i_sin(h, a)`` is the integral of ``sin(t)**h`` from ``pi/2`` to ``a`` and
``i_cos(h, x)`` the integral of ``cos(t)**h`` from ``0`` to ``x``.  Both have
closed forms for a handful of integer exponents; everything else goes through
adaptive Gauss-Kronrod quadrature (QUADPACK via :func:`scipy.integrate.quad`).

A chart maps a single edge length ``t`` in its natural interval ``J`` to the
coordinate ``u = g(t)`` in which the curvature 1-forms have constant-free
coefficients.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .errors import DivergenceGuard, QuadratureFailure, RangeError

HALF_PI = 0.5 * math.pi
QUAD_TOL = 1e-12
QUAD_LIMIT = 400
ENDPOINT_GUARD = 1e-9


def quad(f, a, b, *, tol=QUAD_TOL, points=None):
    """Adaptive quadrature that raises instead of warning."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=tol, epsrel=tol,
                                      limit=QUAD_LIMIT, points=points)
        except integrate.IntegrationWarning as exc:
            # roundoff-limited results are still usable when the estimate is small
            val, err = integrate.quad(f, a, b, epsabs=tol, epsrel=tol,
                                      limit=QUAD_LIMIT, points=points)
            if not np.isfinite(val) or err > 1e3 * max(tol, tol * abs(val)):
                raise QuadratureFailure(f"quad on [{a}, {b}]: {exc}") from exc
    if not np.isfinite(val):
        raise QuadratureFailure(f"non-finite integral on [{a}, {b}]")
    return val


def stratum_breaks(label, grid: int = 64, xtol: float = 1e-14) -> list[float]:
    """Parameters in (0, 1) where ``label(t)`` changes, located by bisection.

    Every change inside a grid cell is found as long as the labels at the
    two ends differ; an excursion that leaves and returns within one cell
    is missed.
    """
    ts = np.linspace(0.0, 1.0, grid + 1)
    labels = [label(t) for t in ts]
    out = []
    for a, b, la, lb in zip(ts[:-1], ts[1:], labels[:-1], labels[1:]):
        while la != lb:
            lo, hi = a, b
            while hi - lo > xtol:
                m = 0.5 * (lo + hi)
                if label(m) == la:
                    lo = m
                else:
                    hi = m
            out.append(0.5 * (lo + hi))
            a, la = hi, label(hi)
    return out


def quad_segments(f, breaks, *, tol=QUAD_TOL) -> float:
    """Integral of ``f`` over [0, 1] summed over the pieces between ``breaks``."""
    edges = [0.0, *breaks, 1.0]
    return sum(quad(f, a, b, tol=tol) for a, b in zip(edges[:-1], edges[1:]) if b > a)


# --------------------------------------------------------------------------
# incomplete power integrals

_ISIN_CLOSED = {
    0.0: lambda a: a - HALF_PI,
    1.0: lambda a: -np.cos(a),
    -1.0: lambda a: np.log(np.tan(0.5 * a)),
    -2.0: lambda a: -1.0 / np.tan(a),
}

_ICOS_CLOSED = {
    0.0: lambda x: x,
    1.0: np.sin,
    -1.0: lambda x: np.arctanh(np.sin(x)),
    -2.0: np.tan,
}


@lru_cache(maxsize=4096)
def _isin_quad(h: float, a: float) -> float:
    # sin(pi - t) = sin(t): reflect so the quadrature never starts past pi/2
    if a > HALF_PI:
        return -_isin_quad(h, math.pi - a)
    return -quad(lambda t: math.sin(t) ** h, a, HALF_PI)


@lru_cache(maxsize=4096)
def _icos_quad(h: float, x: float) -> float:
    return quad(lambda t: math.cos(t) ** h, 0.0, x)


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def i_sin(h: float, a, *, closed_form: bool = True):
    """Integral of ``sin^h`` from ``pi/2`` to ``a`` for ``a`` in ``[0, pi]``.

    The endpoints are admitted only when the integral converges there
    (``h > -1``); otherwise :class:`DivergenceGuard` is raised within
    ``1e-9`` of them.  Accepts scalars or arrays.
    """
    h = float(h)
    arr, scalar = _as_array(a)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > math.pi):
        raise RangeError(f"i_sin argument outside [0, pi]: {a}")
    near_end = (arr < ENDPOINT_GUARD) | (arr > math.pi - ENDPOINT_GUARD)
    if h <= -1.0 and np.any(near_end):
        raise DivergenceGuard(f"i_sin(h={h}) diverges at the interval endpoints")
    if closed_form and h in _ISIN_CLOSED:
        with np.errstate(divide="ignore"):
            out = np.asarray(_ISIN_CLOSED[h](arr), dtype=float)
    else:
        flat = [_isin_quad(h, float(v)) for v in arr.ravel()]
        out = np.asarray(flat, dtype=float).reshape(arr.shape)
    return float(out) if scalar else out


def i_cos(h: float, x, *, closed_form: bool = True):
    """Integral of ``cos^h`` from ``0`` to ``x`` for ``|x| <= pi/2``; odd in ``x``."""
    h = float(h)
    arr, scalar = _as_array(x)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > HALF_PI):
        raise RangeError(f"i_cos argument outside [-pi/2, pi/2]: {x}")
    if h <= -1.0 and np.any(np.abs(arr) > HALF_PI - ENDPOINT_GUARD):
        raise DivergenceGuard(f"i_cos(h={h}) diverges at +-pi/2")
    if closed_form and h in _ICOS_CLOSED:
        out = np.asarray(_ICOS_CLOSED[h](arr), dtype=float)
    else:
        mag = np.abs(arr)
        flat = [_icos_quad(h, float(v)) for v in mag.ravel()]
        out = np.sign(arr) * np.asarray(flat, dtype=float).reshape(arr.shape)
    return float(out) if scalar else out


def i_sin_endpoint_finite(h: float) -> bool:
    """Whether ``i_sin(h, 0)`` and ``i_sin(h, pi)`` are finite."""
    return h > -1.0


# --------------------------------------------------------------------------
# charts

class ChartCase(enum.Enum):
    EUCLID_H0 = "EuclidH0"
    EUCLID_HNZ = "EuclidHnz"
    SPHERICAL = "Spherical"
    HYPERBOLIC_SINH = "HyperbolicSinh"
    HYPERBOLIC_COTH = "HyperbolicCoth"


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all((x > self.lo) & (x < self.hi)))


@dataclass(frozen=True)
class ChartSpec:
    case: ChartCase
    h: float

    def __post_init__(self):
        if self.case is ChartCase.EUCLID_H0 and self.h != 0:
            raise ValueError("EuclidH0 chart requires h = 0")
        if self.case is ChartCase.EUCLID_HNZ and self.h == 0:
            raise ValueError("EuclidHnz chart requires h != 0")

    @property
    def exponent(self) -> float:
        """Power of the integrand (sin, sinh or coth(x/2)) for the integral charts.

        The coth chart uses ``coth^(h+1)``: only with this power is the
        hyperbolic ``psi`` form closed in the chart coordinates.
        """
        if self.case is ChartCase.HYPERBOLIC_COTH:
            return self.h + 1.0
        return -self.h - 1.0


def _log_cosh(y):
    y = np.abs(y)
    return y + np.log1p(np.exp(-2.0 * y)) - math.log(2.0)


def _log_sinh(y):
    return y + np.log1p(-np.exp(-2.0 * y)) - math.log(2.0)


_LN_TANH_HALF = math.log(math.tanh(0.5))
_COSH1 = math.cosh(1.0)
_COTH1 = 1.0 / math.tanh(1.0)
_TANH_HALF = math.tanh(0.5)

_SINH_CLOSED = {
    0.0: lambda t: t - 1.0,
    -1.0: lambda t: np.log(np.tanh(0.5 * t)) - _LN_TANH_HALF,
    1.0: lambda t: np.cosh(t) - _COSH1,
    -2.0: lambda t: _COTH1 - 1.0 / np.tanh(t),
}
_SINH_CLOSED_INV = {
    0.0: lambda u: u + 1.0,
    -1.0: lambda u: 2.0 * np.arctanh(_TANH_HALF * np.exp(u)),
    1.0: lambda u: np.arccosh(u + _COSH1),
    -2.0: lambda u: np.arctanh(1.0 / (_COTH1 - u)),
}

# keyed by the power p of coth(x/2)
_COTH_CLOSED = {
    0.0: lambda t: t - 1.0,
    -1.0: lambda t: 2.0 * (_log_cosh(0.5 * t) - _log_cosh(0.5)),
    1.0: lambda t: 2.0 * (_log_sinh(0.5 * t) - _log_sinh(0.5)),
    -2.0: lambda t: (t - 2.0 * np.tanh(0.5 * t)) - (1.0 - 2.0 * _TANH_HALF),
}
_COTH_CLOSED_INV = {
    0.0: lambda u: u + 1.0,
    -1.0: lambda u: 2.0 * np.arccosh(math.cosh(0.5) * np.exp(0.5 * u)),
    1.0: lambda u: 2.0 * np.arcsinh(math.sinh(0.5) * np.exp(0.5 * u)),
}

_SPH_CLOSED_INV = {
    -1.0: lambda u: 2.0 * np.arctan(np.exp(u)),
    0.0: lambda u: u + HALF_PI,
    1.0: lambda u: np.arccos(-u),
    -2.0: lambda u: HALF_PI + np.arctan(u),
}


@lru_cache(maxsize=8192)
def _sinh_quad(p: float, t: float) -> float:
    return quad(lambda x: math.exp(p * _log_sinh(x)), 1.0, t)


@lru_cache(maxsize=8192)
def _coth_quad(p: float, t: float) -> float:
    return quad(lambda x: math.tanh(0.5 * x) ** (-p), 1.0, t)


def _domain(spec: ChartSpec) -> Interval:
    if spec.case is ChartCase.SPHERICAL:
        return Interval(0.0, math.pi)
    return Interval(0.0, math.inf)


def chart(spec: ChartSpec, t):
    """Map lengths ``t`` in ``J`` to chart coordinates ``u = g(t)``."""
    arr, scalar = _as_array(t)
    J = _domain(spec)
    if not J.contains(arr):
        raise RangeError(f"length outside J=({J.lo}, {J.hi}) for {spec.case.value}")
    p = spec.exponent
    case = spec.case
    if case is ChartCase.EUCLID_H0:
        out = np.log(arr)
    elif case is ChartCase.EUCLID_HNZ:
        out = -arr ** (-spec.h) / spec.h
    elif case is ChartCase.SPHERICAL:
        out = np.asarray(i_sin(p, arr))
    elif case is ChartCase.HYPERBOLIC_SINH:
        if p in _SINH_CLOSED:
            out = _SINH_CLOSED[p](arr)
        else:
            out = np.reshape([_sinh_quad(p, float(v)) for v in arr.ravel()], arr.shape)
    else:
        if p in _COTH_CLOSED:
            out = _COTH_CLOSED[p](arr)
        else:
            out = np.reshape([_coth_quad(p, float(v)) for v in arr.ravel()], arr.shape)
    out = np.asarray(out, dtype=float)
    return float(out) if scalar else out


# The chart images involve integrals whose convergence is slow when h is
# close to a threshold; the leading power or exponential is integrated
# exactly and only a fast-decaying remainder goes to quadrature.

def _sinh_head(p: float) -> float:
    """``int_0^1 sinh(x)^p dx`` for ``p > -1``; ``sinh^p ~ x^p`` near 0."""
    rest = quad(lambda x: x ** p * (math.expm1(p * math.log(math.sinh(x) / x))) if x > 0 else 0.0, 0.0, 1.0)
    return 1.0 / (p + 1.0) + rest


def _sinh_tail(p: float) -> float:
    """``int_1^inf sinh(x)^p dx`` for ``p < 0``; ``sinh^p ~ (e^x / 2)^p`` at infinity."""
    rest = quad(lambda x: math.exp(p * x) * math.expm1(p * math.log1p(-math.exp(-2.0 * x))), 1.0, math.inf)
    return 2.0 ** (-p) * (math.exp(p) / (-p) + rest)


def _coth_head(p: float) -> float:
    """``int_0^1 coth(x/2)^p dx`` for ``p < 1``; ``coth(x/2)^p ~ (x/2)^-p`` near 0."""
    def rest(x):
        if x == 0.0:
            return 0.0
        y = 0.5 * x
        return y ** (-p) * math.expm1(-p * math.log(math.tanh(y) / y))
    return 2.0 ** p / (1.0 - p) + quad(rest, 0.0, 1.0)


@lru_cache(maxsize=256)
def interval_of(spec: ChartSpec) -> tuple[Interval, Interval]:
    """Return ``(J, g(J))``; image endpoints are limits and may be infinite."""
    J = _domain(spec)
    p = spec.exponent
    h = spec.h
    case = spec.case
    if case is ChartCase.EUCLID_H0:
        gJ = Interval(-math.inf, math.inf)
    elif case is ChartCase.EUCLID_HNZ:
        gJ = Interval(-math.inf, 0.0) if h > 0 else Interval(0.0, math.inf)
    elif case is ChartCase.SPHERICAL:
        if p > -1.0:
            half = 0.5 * math.sqrt(math.pi) * math.gamma(0.5 * (p + 1.0)) / math.gamma(0.5 * p + 1.0)
            gJ = Interval(-half, half)
        else:
            gJ = Interval(-math.inf, math.inf)
    elif case is ChartCase.HYPERBOLIC_SINH:
        lo = -_sinh_head(p) if p > -1.0 else -math.inf
        hi = _sinh_tail(p) if p < 0.0 else math.inf
        gJ = Interval(lo, hi)
    else:
        lo = -_coth_head(p) if p < 1.0 else -math.inf
        gJ = Interval(lo, math.inf)
    return J, gJ


def chart_inverse(spec: ChartSpec, u):
    """Inverse of :func:`chart` on ``g(J)``."""
    arr, scalar = _as_array(u)
    J, gJ = interval_of(spec)
    if not gJ.contains(arr):
        raise RangeError(f"coordinate outside g(J)=({gJ.lo}, {gJ.hi}) for {spec.case.value}")
    p = spec.exponent
    case = spec.case
    out = None
    if case is ChartCase.EUCLID_H0:
        out = np.exp(arr)
    elif case is ChartCase.EUCLID_HNZ:
        out = (-spec.h * arr) ** (-1.0 / spec.h)
    elif case is ChartCase.SPHERICAL and p in _SPH_CLOSED_INV:
        out = _SPH_CLOSED_INV[p](arr)
    elif case is ChartCase.HYPERBOLIC_SINH and p in _SINH_CLOSED_INV:
        out = _SINH_CLOSED_INV[p](arr)
    elif case is ChartCase.HYPERBOLIC_COTH and p in _COTH_CLOSED_INV:
        out = _COTH_CLOSED_INV[p](arr)
    if out is None:
        out = np.reshape([_invert_numeric(spec, float(v)) for v in arr.ravel()], arr.shape)
    out = np.asarray(out, dtype=float)
    return float(out) if scalar else out


def _invert_numeric(spec: ChartSpec, u: float) -> float:
    J, _ = interval_of(spec)
    # bracket in t around the base point, then Brent
    lo = hi = 1.0 if J.hi == math.inf else HALF_PI
    g = lambda t: chart(spec, t) - u  # noqa: E731
    while g(lo) > 0.0:
        lo = 0.5 * lo
        if lo < 1e-300:
            raise RangeError(f"cannot bracket chart inverse of {u}")
    while g(hi) < 0.0:
        hi = 0.5 * (hi + J.hi) if J.hi < math.inf else 2.0 * hi
        if J.hi - hi < 1e-15 or hi > 1e300:
            raise RangeError(f"cannot bracket chart inverse of {u}")
    return optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
