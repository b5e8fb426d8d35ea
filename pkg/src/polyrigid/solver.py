"""Damped Newton minimisation of a convex energy known only through its gradient.

The energy ``W`` is never evaluated: the Hessian comes from central
differences of the gradient and sufficient decrease along a step ``t*d`` is
judged from the Simpson estimate ``t/6 * (g0.d + 4 g(t/2).d + g(t).d)`` of
``W(u + t d) - W(u)``, which is exact for quadratics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import MaxIterations, TargetUnattainable

log = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 500
    fd_step: float = 1e-5
    armijo: float = 1e-4
    max_step: float = 2.0
    boundary_margin: float = 1e-12
    escape_radius: float = 60.0
    max_backtracks: int = 60


@dataclass
class SolveReport:
    iterations: int = 0
    grad_norm: float = float("nan")
    residual: float = float("nan")
    residuals: np.ndarray | None = field(default=None, repr=False)
    gauge: float | None = None
    degenerate_visits: int = 0
    status: str = "Running"
    barrier: bool = False
    direction: np.ndarray | None = field(default=None, repr=False)
    message: str = ""

    def lines(self) -> list[str]:
        from .mesh import fmt

        gauge = "none" if self.gauge is None else fmt(self.gauge)
        out = [
            f"iter {self.iterations}",
            f"grad-norm {fmt(self.grad_norm)}",
            f"residual {fmt(self.residual)}",
            f"gauge {gauge}",
            f"degenerate-visits {self.degenerate_visits}",
        ]
        if self.barrier:
            out.append("barrier admissible-region")
        out.append(f"status {self.status}")
        return out


@dataclass
class Problem:
    """Everything the Newton core needs to know about one energy.

    ``gradient(u)`` returns the full gradient (the curvature residual).
    ``admissible(u)``, when given, marks the region where the gradient is
    finite; the line search never leaves it.  ``slice_normal`` constrains
    iterates to the affine slice through the start point orthogonal to it.
    """

    gradient: object
    lo: np.ndarray
    hi: np.ndarray
    admissible: object = None
    degenerate: object = None
    slice_normal: np.ndarray | None = None


def _project(v, normal):
    if normal is None:
        return v
    return v - normal * (normal @ v)


def _inside(p: Problem, u, margin) -> bool:
    if np.any(u <= p.lo + margin) or np.any(u >= p.hi - margin):
        return False
    return p.admissible is None or bool(p.admissible(u))


def fd_hessian(p: Problem, u, g0, step_scale=1e-5, margin=0.0):
    """Symmetrised central-difference Hessian, one-sided next to the domain edge."""
    n = len(u)
    H = np.empty((n, n))
    for i in range(n):
        h = step_scale * (1.0 + abs(u[i]))
        cols = None
        for _ in range(30):
            up, um = u.copy(), u.copy()
            up[i] += h
            um[i] -= h
            ok_p, ok_m = _inside(p, up, margin), _inside(p, um, margin)
            if ok_p and ok_m:
                cols = (p.gradient(up) - p.gradient(um)) / (2.0 * h)
            elif ok_p:
                cols = (p.gradient(up) - g0) / h
            elif ok_m:
                cols = (g0 - p.gradient(um)) / h
            if cols is not None:
                break
            h *= 0.25
        if cols is None:
            cols = np.zeros(n)
        H[:, i] = cols
    return 0.5 * (H + H.T)


def _newton_direction(H, g, normal):
    n = len(g)
    M = H.copy()
    if normal is not None:
        P = np.eye(n) - np.outer(normal, normal)
        M = P @ H @ P + np.outer(normal, normal)
    scale = max(1.0, float(np.max(np.abs(np.diag(M)))))
    lam = 0.0
    for _ in range(60):
        try:
            c = np.linalg.cholesky(M + lam * np.eye(n))
            d = -np.linalg.solve(c.T, np.linalg.solve(c, g))
            d = _project(d, normal)
            if np.all(np.isfinite(d)) and d @ g < 0.0:
                return d, lam
        except np.linalg.LinAlgError:
            pass
        lam = max(10.0 * lam, 1e-10 * scale)
    return -g, lam


def minimize(p: Problem, u0, config: SolverConfig | None = None) -> tuple[np.ndarray, SolveReport]:
    """Find a zero of ``p.gradient`` by damped Newton; raise on failure.

    On failure the raised :class:`~polyrigid.errors.SolverError` carries the
    report (and, for :class:`TargetUnattainable`, the escape direction).
    """
    cfg = config or SolverConfig()
    normal = None
    if p.slice_normal is not None:
        normal = np.asarray(p.slice_normal, dtype=float)
        normal = normal / np.linalg.norm(normal)
    u = np.asarray(u0, dtype=float).copy()
    start = u.copy()
    rep = SolveReport(barrier=p.admissible is not None)
    margin = cfg.boundary_margin
    g = p.gradient(u)
    pinned = 0

    for it in range(cfg.max_iter + 1):
        rep.iterations = it
        rep.residual = float(np.max(np.abs(g)))
        rep.grad_norm = float(np.linalg.norm(_project(g, normal)))
        rep.residuals = g.copy()
        if p.degenerate is not None and p.degenerate(u):
            rep.degenerate_visits += 1
        if rep.residual <= cfg.tol:
            rep.status = "Success"
            return u, rep
        if it == cfg.max_iter:
            break

        pg = _project(g, normal)
        H = fd_hessian(p, u, g, cfg.fd_step, margin)
        d, _ = _newton_direction(H, pg, normal)
        dmax = float(np.max(np.abs(d)))
        if dmax > cfg.max_step:
            d *= cfg.max_step / dmax
        u_new, g_new = _line_search(p, u, g, d, cfg)
        if u_new is None and not np.allclose(d, -pg):
            d = -pg
            dmax = float(np.max(np.abs(d)))
            if dmax > cfg.max_step:
                d *= cfg.max_step / dmax
            u_new, g_new = _line_search(p, u, g, d, cfg)
        if u_new is None:
            rep.status = "Stalled"
            rep.message = "line search could not find sufficient decrease"
            raise MaxIterations(f"solver stalled after {it} iterations "
                                f"(residual {rep.residual:.3g})", rep)

        step = u_new - u
        near_edge = np.any(u_new <= p.lo + 1e3 * margin + 1e-9) or np.any(u_new >= p.hi - 1e3 * margin - 1e-9)
        pinned = pinned + 1 if near_edge else 0
        escaped = np.max(np.abs(u_new - start)) > cfg.escape_radius
        u, g = u_new, g_new
        if escaped or pinned >= 8:
            rep.status = "TargetUnattainable"
            rep.direction = step / max(np.linalg.norm(step), 1e-300)
            rep.residual = float(np.max(np.abs(g)))
            rep.message = ("iterates left every bounded region" if escaped
                           else "iterates pinned against the domain boundary")
            raise TargetUnattainable(f"minimum approached at the domain boundary/infinity: {rep.message}",
                                     rep, rep.direction)

    rep.status = "MaxIterations"
    raise MaxIterations(f"no convergence in {cfg.max_iter} iterations "
                        f"(residual {rep.residual:.3g})", rep)


def _line_search(p: Problem, u, g, d, cfg: SolverConfig):
    slope0 = float(g @ d)
    if not slope0 < 0.0:
        return None, None
    t = 1.0
    margin = cfg.boundary_margin
    # fraction-to-boundary rule for the box
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(d > 0, (p.hi - margin - u) / d, np.inf)
        dn = np.where(d < 0, (p.lo + margin - u) / d, np.inf)
    t_box = float(min(np.min(up), np.min(dn)))
    if t_box < t:
        t = 0.995 * t_box
    for _ in range(cfg.max_backtracks):
        if t <= 0.0:
            return None, None
        u_t = u + t * d
        if not _inside(p, u_t, margin):
            t *= 0.5
            continue
        g_t = p.gradient(u_t)
        if np.max(np.abs(g_t)) <= cfg.tol:
            return u_t, g_t
        u_m = u + 0.5 * t * d
        g_m = p.gradient(u_m) if _inside(p, u_m, margin) else None
        if g_m is not None and np.all(np.isfinite(g_t)):
            decrease = t / 6.0 * (slope0 + 4.0 * float(g_m @ d) + float(g_t @ d))
            if decrease <= cfg.armijo * t * slope0:
                return u_t, g_t
        t *= 0.5
    return None, None
