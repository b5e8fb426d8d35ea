import math

import numpy as np
import pytest

from polyrigid import diagnostics, packing, rigidity
from polyrigid.schlaefli import parse_spec


def test_start_points_seeded(tet):
    problem = rigidity.RigidityProblem(tet, "e2", np.full(4, math.pi), inversive=np.ones(6))
    a = rigidity.start_points(problem, 4, seed=7)
    b = rigidity.start_points(problem, 6, seed=7)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    assert not np.array_equal(a[0], rigidity.start_points(problem, 1, seed=8)[0])


def test_hyperbolic_starts_in_orthant(ico):
    data, k = rigidity.random_packing(ico, "h2", seed=3)
    problem = rigidity.RigidityProblem(ico, "h2", k, inversive=data.inversive)
    for u in rigidity.start_points(problem, 20, seed=0):
        assert np.all(u < 0)


def test_barrier_starts_admissible(ico):
    from polyrigid.schlaefli import admissible_u
    spec = parse_spec("phi", "s2", -2)
    problem, _ = rigidity.metric_problem_from_seed(ico, spec, seed=0)
    for u in rigidity.start_points(problem, 5, seed=0):
        assert admissible_u(ico, spec, u)


def test_scale_aligned_distance(tet):
    problem = rigidity.RigidityProblem(tet, "e2", np.zeros(6), spec=parse_spec("phi", "e2", 1))
    a = np.log(np.array([1.0, 2, 3, 4, 5, 6]))
    assert rigidity.solution_distance(problem, a, a + 0.3) == pytest.approx(0.0, abs=1e-15)
    b = a.copy()
    b[0] += 0.2
    assert rigidity.solution_distance(problem, a, b) == pytest.approx(0.1)


def test_packing_multi_start_symmetric(tet):
    problem = rigidity.RigidityProblem(tet, "e2", np.full(4, math.pi), inversive=np.ones(6))
    rep = rigidity.multi_start(problem, starts=10, seed=0)
    assert rep.agree and rep.max_distance <= 1e-9
    for s in rep.starts:
        np.testing.assert_allclose(s.solution, 0.0, atol=1e-9)


def test_forward_packing_recovered(ico):
    problem, data = rigidity.packing_problem_from_seed(ico, "h2", seed=2)
    rep = rigidity.multi_start(problem, starts=3, seed=1)
    assert rep.agree
    np.testing.assert_allclose(rep.starts[0].solution, np.log(data.radii), atol=1e-9)


def test_forward_metric_recovered(octa):
    spec = parse_spec("phi", "e2", -2)
    problem, l = rigidity.metric_problem_from_seed(octa, spec, seed=4)
    rep = rigidity.multi_start(problem, starts=3, seed=0, workers=2)
    assert rep.agree
    d = rep.starts[0].solution - np.log(l)
    assert 0.5 * (d.max() - d.min()) <= 1e-9


def test_corrupted_solver_detected(tet, monkeypatch):
    problem = rigidity.RigidityProblem(tet, "e2", np.full(4, math.pi), inversive=np.ones(6))
    real = rigidity.run_start

    def corrupted(problem, index, u0, config=None):
        res = real(problem, index, u0, config)
        res.solution = res.solution + 1e-3 * index
        return res

    monkeypatch.setattr(rigidity, "run_start", corrupted)
    rep = rigidity.multi_start(problem, starts=3, seed=0)
    assert not rep.agree
    assert rep.lines()[-1] == "rigidity disagree"


def test_failed_start_reported(tet):
    problem = rigidity.RigidityProblem(tet, "h2", np.full(4, 10.0), inversive=np.ones(6))
    rep = rigidity.multi_start(problem, starts=2, seed=0)
    assert not rep.converged and not rep.agree
    assert math.isinf(rep.max_distance)


@pytest.mark.parametrize("geometry", ["e2", "h2", "s2"])
def test_extension_strata_exact(geometry):
    rep = diagnostics.extension_crossings(geometry, samples=50)
    assert rep.strata_exact


@pytest.mark.parametrize("geometry", ["e2", "h2"])
def test_packing_closedness(geometry):
    rep = diagnostics.packing_closedness(geometry, samples=200, seed=3)
    assert rep.interior_max <= 1e-4 and rep.degenerate_max == 0.0


def test_degenerate_packing_sampler(rng):
    for geometry in ("e2", "h2"):
        for k in range(3):
            I3, r3 = diagnostics.sample_packing_degenerate(packing.Geometry.parse(geometry), rng, k)
            assert str(packing.classify_triangle(geometry, I3, r3)) == f"Degenerate({k})"


def test_monotone_samplers(tet):
    assert diagnostics.packing_monotone(tet, "h2", pairs=50).min_inner >= -1e-8
    assert diagnostics.schlaefli_monotone(tet, parse_spec("psi", "h2", 0.5), pairs=50).min_inner >= -1e-8
