"""Multi-start certification of rigidity and forward-target generators.

A convex energy has a single minimiser (after the Euclidean gauge), so
independent solves from scattered starting points must land on the same
packing or metric.  :func:`multi_start` runs the solves and tabulates the
pairwise distances between the solutions.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import curvature, packing, schlaefli
from .diagnostics import packing_u_box, spec_u_sample
from .errors import SolverError
from .geom import Geometry
from .mesh import Mesh, fmt
from .schlaefli import FunctionalSpec
from .solver import SolverConfig


@dataclass
class RigidityProblem:
    """One prescribed-curvature problem: a packing (``spec is None``) or a Schlaefli solve."""

    mesh: Mesh
    geometry: Geometry
    target: np.ndarray
    inversive: np.ndarray | None = None
    spec: FunctionalSpec | None = None

    def __post_init__(self):
        self.geometry = Geometry.parse(self.geometry)
        self.target = np.asarray(self.target, dtype=float)
        if self.spec is None and self.inversive is None:
            raise ValueError("a packing problem needs inversive distances")

    @property
    def label(self) -> str:
        return f"packing {self.geometry.name}" if self.spec is None else str(self.spec)


@dataclass
class StartResult:
    index: int
    u0: np.ndarray
    solution: np.ndarray | None
    residual: float
    iterations: int
    status: str
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "Success"


@dataclass
class RigidityReport:
    label: str
    starts: list[StartResult]
    distances: np.ndarray
    threshold: float
    extra: dict = field(default_factory=dict)

    @property
    def max_distance(self) -> float:
        if len(self.starts) < 2:
            return 0.0
        return float(np.max(self.distances))

    @property
    def converged(self) -> bool:
        return all(s.ok for s in self.starts)

    @property
    def agree(self) -> bool:
        return self.converged and self.max_distance <= self.threshold

    def lines(self) -> list[str]:
        out = [f"problem {self.label}"]
        for s in self.starts:
            out.append(f"start {s.index} status {s.status} iter {s.iterations} residual {fmt(s.residual)}")
        n = len(self.starts)
        for i in range(n):
            out.append("distance " + " ".join(fmt(self.distances[i, j]) for j in range(n)))
        out.append(f"max-distance {fmt(self.max_distance)}")
        out.append(f"threshold {fmt(self.threshold)}")
        out.append(f"rigidity {'agree' if self.agree else 'disagree'}")
        return out


def start_points(problem: RigidityProblem, starts: int, seed: int, radius: float = 2.0) -> list[np.ndarray]:
    """Seeded initial chart points; start ``i`` depends only on ``(seed, i)``."""
    pts = []
    for i in range(starts):
        rng = np.random.default_rng([seed, i])
        if problem.spec is None:
            pts.append(packing_u_box(problem.geometry, problem.mesh.n_vertices, rng, radius))
        else:
            pts.append(spec_u_sample(problem.mesh, problem.spec, rng, radius))
    return pts


def solution_coordinates(problem: RigidityProblem, result) -> np.ndarray:
    """Log-radii of a packing or log-lengths of a metric."""
    if problem.spec is None:
        return np.log(result.radii)
    return np.log(result.lengths)


def solution_distance(problem: RigidityProblem, a: np.ndarray, b: np.ndarray) -> float:
    """Sup-norm distance of log-coordinates, optimally scale-aligned for Euclidean metrics.

    Packings are compared directly: Euclidean solves are already gauged to
    the slice ``sum(u) = 0``.
    """
    d = np.asarray(a) - np.asarray(b)
    if problem.spec is not None and problem.geometry is Geometry.E2:
        # min over lambda of sup |d - log lambda|
        return float(0.5 * (d.max() - d.min()))
    return float(np.max(np.abs(d)))


def run_start(problem: RigidityProblem, index: int, u0, config: SolverConfig | None = None) -> StartResult:
    try:
        if problem.spec is None:
            res, rep = packing.solve_packing(problem.mesh, problem.geometry, problem.inversive,
                                             problem.target, init_u=u0, config=config)
        else:
            res, rep = schlaefli.solve_prescribed(problem.mesh, problem.spec, problem.target,
                                                  init_u=u0, config=config)
    except SolverError as exc:
        rep = exc.report
        return StartResult(index, u0, None, rep.residual if rep else math.nan,
                           rep.iterations if rep else 0, rep.status if rep else "Failed", str(exc))
    return StartResult(index, u0, solution_coordinates(problem, res), rep.residual, rep.iterations, rep.status)


def _job(args):
    return run_start(*args)


def multi_start(problem: RigidityProblem, starts: int = 10, seed: int = 0,
                config: SolverConfig | None = None, threshold: float | None = None,
                workers: int = 1) -> RigidityReport:
    """Solve from ``starts`` seeded points and compare the solutions pairwise.

    ``threshold`` defaults to ten times the solver tolerance.  Results are
    ordered by start index whatever the number of workers.
    """
    cfg = config or SolverConfig()
    if threshold is None:
        threshold = 10.0 * cfg.tol
    u0s = start_points(problem, starts, seed)
    jobs = [(problem, i, u0, cfg) for i, u0 in enumerate(u0s)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]

    n = len(results)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a, b = results[i].solution, results[j].solution
            d = math.inf if a is None or b is None else solution_distance(problem, a, b)
            dist[i, j] = dist[j, i] = d
    return RigidityReport(problem.label, results, dist, threshold)


# --------------------------------------------------------------------------
# forward targets

def random_packing(mesh: Mesh, geometry, seed: int = 0, inversive_max: float = 2.0):
    """Seeded random packing whose triangles are all genuine.

    Returns ``(PackingData, curvature)``; the curvature is a target that is
    attained by construction.
    """
    geometry = Geometry.parse(geometry)
    rng = np.random.default_rng(seed)
    while True:
        inv = rng.uniform(0.0, inversive_max, mesh.n_edges)
        if geometry is Geometry.E2:
            r = np.exp(rng.uniform(-0.5, 0.5, mesh.n_vertices))
        else:
            r = rng.uniform(0.3, 1.5, mesh.n_vertices)
        data = packing.PackingData(geometry, inv, r)
        l = packing.lengths_from_radii(mesh, data)
        metric = curvature.PolyhedralMetric(geometry, l)
        if curvature.is_admissible(mesh, metric):
            k = packing.packing_curvature(mesh, data)
            if geometry is Geometry.E2:
                # remove the rounding drift so the Gauss-Bonnet check passes exactly
                k += (2.0 * math.pi * mesh.euler_characteristic - k.sum()) / len(k)
            return data, k


def random_metric(mesh: Mesh, geometry, seed: int = 0) -> np.ndarray:
    """Seeded admissible edge lengths ``(r_i + r_j) * exp(U(-0.1, 0.1))``."""
    geometry = Geometry.parse(geometry)
    rng = np.random.default_rng(seed)
    while True:
        r = rng.uniform(0.2, 0.8, mesh.n_vertices)
        l = (r[mesh.edges[:, 0]] + r[mesh.edges[:, 1]]) * np.exp(rng.uniform(-0.1, 0.1, mesh.n_edges))
        if curvature.is_admissible(mesh, curvature.PolyhedralMetric(geometry, l)):
            return l


def packing_problem_from_seed(mesh: Mesh, geometry, seed: int = 0) -> tuple[RigidityProblem, packing.PackingData]:
    data, k = random_packing(mesh, geometry, seed)
    return RigidityProblem(mesh, geometry, k, inversive=data.inversive), data


def metric_problem_from_seed(mesh: Mesh, spec: FunctionalSpec, seed: int = 0) -> tuple[RigidityProblem, np.ndarray]:
    l = random_metric(mesh, spec.geometry, seed)
    a = schlaefli.forward_target(mesh, spec, l)
    if spec.geometry is Geometry.E2 and spec.h == 0:
        need = -0.5 * math.pi * mesh.n_triangles
        a += (need - a.sum()) / len(a)
    return RigidityProblem(mesh, spec.geometry, a, spec=spec), l
