"""Acceptance gate: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or directly as a script.
"""

import math
import sys
import time

import numpy as np
import pytest

from polyrigid import curvature, diagnostics, geom, mesh, packing, rigidity, schlaefli
from polyrigid.curvature import PolyhedralMetric
from polyrigid.geom import Geometry
from polyrigid.schlaefli import parse_spec

RESULTS = {}


def report(n, ok, detail):
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line, flush=True)
    return ok


# --------------------------------------------------------------------------
# independent oracles

def heron_cot(a, b, c):
    """Cotangent of the angle opposite side ``a``: (b^2 + c^2 - a^2) / (4 area)."""
    s = (a + b + c) / 2
    area = math.sqrt(s * (s - a) * (s - b) * (s - c))
    return (b * b + c * c - a * a) / (4 * area)


def bisection_critical_radius(geometry, I3, k, ri, rj):
    """Plain bisection on l_i(r_k) + l_j(r_k) = l_k, lengths from the cosine laws directly."""
    i, j = [m for m in range(3) if m != k]

    def length(r1, r2, inv):
        if geometry == "e2":
            return math.sqrt(r1 * r1 + r2 * r2 + 2 * inv * r1 * r2)
        return math.acosh(math.cosh(r1) * math.cosh(r2) + inv * math.sinh(r1) * math.sinh(r2))

    lk = length(ri, rj, I3[k])

    def excess(rk):
        return length(rk, rj, I3[i]) + length(rk, ri, I3[j]) - lk

    lo, hi = 0.0, 1.0
    while excess(hi) < 0:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def random_metric(m, geometry, rng):
    while True:
        r = rng.uniform(0.2, 0.8, m.n_vertices)
        l = (r[m.edges[:, 0]] + r[m.edges[:, 1]]) * np.exp(rng.uniform(-0.1, 0.1, m.n_edges))
        metric = PolyhedralMetric(geometry, l)
        if curvature.is_admissible(m, metric):
            return metric


# --------------------------------------------------------------------------
# criteria

def criterion_1():
    t = time.perf_counter()
    reps = [diagnostics.extension_crossings(g, samples=200, seed=1, delta=1e-7) for g in Geometry]
    dt = time.perf_counter() - t
    jump = max(r.max_jump for r in reps)
    exact = all(r.strata_exact for r in reps)
    ok = jump <= 1e-5 and exact and dt < 5
    return report(1, ok, f"extension continuity: max jump {jump:.3g} (limit 1e-5), "
                         f"strata exact {exact}, {dt:.2f}s")


CLOSEDNESS_CASES = [(w, g, h) for (w, g) in [("phi", "e2"), ("phi", "s2"), ("phi", "h2")]
                    for h in (-2.0, 0.0, 1.0)] + [("psi", "h2", -2.0), ("psi", "h2", 0.0)]


def criterion_2():
    t = time.perf_counter()
    worst, deg_worst, details = 0.0, 0.0, []
    for g in ("e2", "h2"):
        r = diagnostics.packing_closedness(g, samples=1000, seed=2)
        worst = max(worst, r.interior_max)
        deg_worst = max(deg_worst, r.degenerate_max or 0.0)
        details.append(r)
    for case in CLOSEDNESS_CASES:
        r = schlaefli.closedness_diagnostic(parse_spec(*case), samples=1000, seed=2)
        worst = max(worst, r.interior_max)
        deg_worst = max(deg_worst, r.degenerate_max or 0.0)
        details.append(r)
    dt = time.perf_counter() - t
    ok = worst <= 1e-4 and deg_worst == 0.0 and dt < 30
    return report(2, ok, f"closedness: {len(details)} cases, interior max {worst:.3g}, "
                         f"degenerate max {deg_worst:.3g}, {dt:.1f}s")


def criterion_3():
    t = time.perf_counter()
    tet = mesh.tetrahedron()
    worst = math.inf
    for g in ("e2", "h2"):
        worst = min(worst, diagnostics.packing_monotone(tet, g, pairs=500, seed=3).min_inner)
    for w, g in [("phi", "e2"), ("phi", "s2"), ("psi", "h2")]:
        for h in (-2.0, 0.0, 1.0):
            r = diagnostics.schlaefli_monotone(tet, parse_spec(w, g, h), pairs=500, seed=3)
            worst = min(worst, r.min_inner)
    dt = time.perf_counter() - t
    ok = worst >= -1e-8 and dt < 30
    return report(3, ok, f"monotone gradients: min inner product {worst:.3g}, {dt:.1f}s")


def criterion_4():
    rng = np.random.default_rng(4)
    ico = mesh.icosahedron()
    worst_pack = 0.0
    for _ in range(50):
        inv = rng.uniform(0, 3, ico.n_edges)
        u = rng.uniform(-2, 2, 12)
        c = rng.uniform(-2, 2)
        k0 = packing.extended_curvature(ico, "e2", inv, u)
        k1 = packing.extended_curvature(ico, "e2", inv, u + c)
        worst_pack = max(worst_pack, float(np.max(np.abs(k0 - k1))))
    worst_metric = 0.0
    for _ in range(50):
        metric = random_metric(ico, Geometry.E2, rng)
        lam = rng.uniform(0.1, 10)
        scaled = PolyhedralMetric("e2", lam * metric.lengths)
        pairs = [(curvature.vertex_curvature(ico, metric), curvature.vertex_curvature(ico, scaled))]
        for h in (-2.0, 0.0, 1.0):
            pairs.append((curvature.phi_curvature(ico, metric, h), curvature.phi_curvature(ico, scaled, h)))
            pairs.append((curvature.psi_curvature(ico, metric, h), curvature.psi_curvature(ico, scaled, h)))
        worst_metric = max(worst_metric, max(float(np.max(np.abs(a - b))) for a, b in pairs))
    ok = worst_pack <= 1e-12 and worst_metric <= 1e-12
    return report(4, ok, f"scale invariance: packing {worst_pack:.3g}, metric {worst_metric:.3g} (limit 1e-12)")


def criterion_5():
    rng = np.random.default_rng(5)
    worst = 0.0
    for g in Geometry:
        for name in ("tetrahedron", "octahedron", "icosahedron"):
            m = mesh.PLATONIC[name]()
            for _ in range(50):
                worst = max(worst, abs(curvature.gauss_bonnet(m, random_metric(m, g, rng))[2]))
    ok = worst <= 1e-9
    return report(5, ok, f"gauss-bonnet: max residual {worst:.3g} over 450 metrics")


def criterion_6():
    tet = mesh.tetrahedron()
    named = {(0, 1): 3.0, (0, 2): 4.0, (1, 2): 5.0}
    l = np.array([named.get(tuple(e), 4.0) for e in tet.edges.tolist()])
    got = curvature.phi_curvature(tet, PolyhedralMetric("e2", l), -2.0)
    worst = 0.0
    for e, (i, j) in enumerate(tet.edges.tolist()):
        want = 0.0
        for tri in tet.triangles.tolist():
            if i in tri and j in tri:
                k = next(v for v in tri if v not in (i, j))
                side = lambda a, b: named.get((min(a, b), max(a, b)), 4.0)  # noqa: E731
                want -= heron_cot(side(i, j), side(j, k), side(i, k))
        worst = max(worst, abs(got[e] - want))
    ok = worst <= 1e-12
    return report(6, ok, f"cotangent laplacian: max |phi_-2 - oracle| {worst:.3g}")


def criterion_7():
    rng = np.random.default_rng(7)
    bad = 0
    for g in ("e2", "h2"):
        I = rng.uniform(0, 1, (100_000, 3))
        r = 10.0 * (1.0 - rng.random((100_000, 3)))
        L = packing._triangle_lengths_from_radii(g, I, r)
        bad += int(np.sum(geom.classify_batch(Geometry.parse(g), L) != geom.INTERIOR))
    return report(7, bad == 0, f"inversive <= 1 never degenerate: {bad} degenerate of 200000")


def criterion_8():
    rng = np.random.default_rng(8)
    f0 = packing.critical_radius("e2", (0, 0, 3), 2, 1.0, 1.0)
    ok = abs(f0 - 1.0) <= 1e-10
    worst = 0.0
    bracket_ok = True
    for n in range(100):
        g = "e2" if n % 2 == 0 else "h2"
        k = int(rng.integers(3))
        I3 = rng.uniform(0, 1, 3)
        I3[k] = rng.uniform(1.01, 5)
        r = rng.uniform(0.1, 3, 3)
        i, j = [m for m in range(3) if m != k]
        f = packing.critical_radius(g, I3, k, r[i], r[j])
        worst = max(worst, abs(f - bisection_critical_radius(g, I3, k, r[i], r[j])))
        lo, hi = r.copy(), r.copy()
        lo[k], hi[k] = 0.99 * f, 1.01 * f
        bracket_ok &= str(packing.classify_triangle(g, I3, lo)) == f"Degenerate({k})"
        bracket_ok &= packing.classify_triangle(g, I3, hi).interior
    ok = ok and bracket_ok and worst <= 1e-10
    return report(8, ok, f"critical radius: f(E2,(0,0,3),1,1) = {f0:.15g}, "
                         f"max |f - bisection| {worst:.3g}, bracketing {bracket_ok}")


def _rigidity_line(rep):
    res = max(s.residual for s in rep.starts)
    return res, rep.max_distance


def criterion_9():
    t = time.perf_counter()
    worst_res = worst_dist = 0.0
    converged = True
    for name in ("tetrahedron", "icosahedron"):
        m = mesh.PLATONIC[name]()
        for g in ("e2", "h2"):
            problem, _ = rigidity.packing_problem_from_seed(m, g, seed=9)
            rep = rigidity.multi_start(problem, starts=10, seed=9, threshold=1e-6)
            converged &= rep.converged
            res, dist = _rigidity_line(rep)
            worst_res, worst_dist = max(worst_res, res), max(worst_dist, dist)
    dt = time.perf_counter() - t
    ok = converged and worst_res <= 1e-10 and worst_dist <= 1e-6 and dt < 60
    return report(9, ok, f"packing rigidity: residual {worst_res:.3g}, distance {worst_dist:.3g}, {dt:.1f}s")


SCHLAEFLI_RIGIDITY = [("phi", "e2", -2.0), ("phi", "e2", 0.0), ("phi", "e2", 1.0),
                      ("phi", "s2", 0.0), ("phi", "s2", -2.0), ("psi", "h2", 0.0), ("psi", "h2", -2.0)]


def criterion_10():
    t = time.perf_counter()
    worst_res = worst_dist = 0.0
    converged = True
    for name in ("tetrahedron", "icosahedron"):
        m = mesh.PLATONIC[name]()
        for case in SCHLAEFLI_RIGIDITY:
            problem, _ = rigidity.metric_problem_from_seed(m, parse_spec(*case), seed=10)
            rep = rigidity.multi_start(problem, starts=10, seed=10, threshold=1e-6)
            converged &= rep.converged
            res, dist = _rigidity_line(rep)
            worst_res, worst_dist = max(worst_res, res), max(worst_dist, dist)
    dt = time.perf_counter() - t
    ok = converged and worst_dist <= 1e-6 and dt < 120
    return report(10, ok, f"schlaefli rigidity: residual {worst_res:.3g}, distance {worst_dist:.3g}, {dt:.1f}s")


def criterion_11():
    rng = np.random.default_rng(11)
    tet = mesh.tetrahedron()
    worst, crossed = 0.0, 0
    specs = [parse_spec(*c) for c in [("phi", "e2", 0.0), ("phi", "e2", 1.0), ("phi", "s2", 0.0),
                                      ("phi", "s2", 1.0), ("psi", "h2", 0.0), ("phi", "h2", 1.0)]]
    for n in range(50):
        if n % 2 == 0:
            g = "e2" if n % 4 == 0 else "h2"
            inv = rng.uniform(0, 3, 6)
            a = rng.uniform(0, 2, 4)
            p, q, v1, v2 = (diagnostics.packing_u_box(Geometry.parse(g), 4, rng) for _ in range(4))
            one = packing.packing_energy_path(tet, g, inv, [p, v1, q], a)
            two = packing.packing_energy_path(tet, g, inv, [p, v2, q], a)
            pts = [p, v1, q, v2]
            degenerate = packing._degenerate_fn(tet, g, inv)
        else:
            spec = specs[(n // 2) % len(specs)]
            a = rng.normal(size=6)
            p, q, v1, v2 = (diagnostics.spec_u_sample(tet, spec, rng) for _ in range(4))
            one = schlaefli.schlaefli_energy_path(tet, spec, [p, v1, q], a)
            two = schlaefli.schlaefli_energy_path(tet, spec, [p, v2, q], a)
            pts = [p, v1, q, v2]
            problem = schlaefli.schlaefli_problem(tet, spec, a)
            degenerate = problem.degenerate
        crossed += any(degenerate(x) for x in pts)
        worst = max(worst, abs(one - two))
    ok = worst <= 1e-8
    return report(11, ok, f"path independence: max |W1 - W2| {worst:.3g} over 50 cases "
                          f"({crossed} touching degenerate strata)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("check", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(check, capsys):
    with capsys.disabled():
        ok = check()
    assert ok, RESULTS[int(check.__name__.split("_")[1])]


if __name__ == "__main__":
    results = [check() for check in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
