import math

import numpy as np
import pytest

from polyrigid import curvature, mesh
from polyrigid.curvature import PolyhedralMetric
from polyrigid.errors import InadmissibleMetric
from polyrigid.geom import Geometry
from polyrigid.integrals import i_sin

H2_EQUILATERAL = 0.91879787217802736904


def random_admissible(m, geometry, rng):
    while True:
        r = rng.uniform(0.2, 0.8, m.n_vertices)
        l = (r[m.edges[:, 0]] + r[m.edges[:, 1]]) * np.exp(rng.uniform(-0.1, 0.1, m.n_edges))
        metric = PolyhedralMetric(geometry, l)
        if curvature.is_admissible(m, metric):
            return metric


@pytest.mark.parametrize("name,k", [("tetrahedron", math.pi), ("octahedron", 2 * math.pi / 3),
                                    ("icosahedron", math.pi / 3)])
def test_equilateral_curvature(name, k):
    m = mesh.PLATONIC[name]()
    got = curvature.vertex_curvature(m, PolyhedralMetric("e2", np.ones(m.n_edges)))
    np.testing.assert_allclose(got, k, atol=1e-13)
    assert got.sum() == pytest.approx(2 * math.pi * m.euler_characteristic, abs=1e-12)


def test_phi0_equilateral(tet):
    got = curvature.phi_curvature(tet, PolyhedralMetric("e2", np.ones(6)), 0.0)
    np.testing.assert_allclose(got, -math.pi / 3, atol=1e-14)


def test_gauss_bonnet_examples(tet, octa):
    _, _, res = curvature.gauss_bonnet(tet, PolyhedralMetric("e2", np.ones(6)))
    assert abs(res) <= 1e-12
    total, area, res = curvature.gauss_bonnet(tet, PolyhedralMetric("h2", np.ones(6)))
    assert area == pytest.approx(4 * (math.pi - 3 * H2_EQUILATERAL), abs=1e-12)
    assert abs(res) <= 1e-9
    # regular right-angled spherical octahedron: eight octant faces
    total, area, res = curvature.gauss_bonnet(octa, PolyhedralMetric("s2", np.full(12, math.pi / 2)))
    assert area == pytest.approx(4 * math.pi, abs=1e-12)
    assert total == pytest.approx(0.0, abs=1e-12)
    assert abs(res) <= 1e-12


@pytest.mark.parametrize("geometry", list(Geometry))
def test_gauss_bonnet_random(geometry, rng):
    for name in mesh.PLATONIC:
        m = mesh.PLATONIC[name]()
        for _ in range(20):
            _, _, res = curvature.gauss_bonnet(m, random_admissible(m, geometry, rng))
            assert abs(res) <= 1e-9


def test_inadmissible_metric(tet):
    l = np.ones(6)
    l[0] = 2.5
    with pytest.raises(InadmissibleMetric) as err:
        curvature.vertex_curvature(tet, PolyhedralMetric("e2", l))
    assert err.value.domain_class.tag == "Degenerate"


def test_euclidean_scale_invariance(ico, rng):
    metric = random_admissible(ico, Geometry.E2, rng)
    for lam in rng.uniform(0.1, 10.0, 5):
        scaled = PolyhedralMetric("e2", lam * metric.lengths)
        np.testing.assert_allclose(curvature.vertex_curvature(ico, scaled),
                                   curvature.vertex_curvature(ico, metric), atol=1e-12)
        for h in (-2.0, 0.0, 1.0):
            np.testing.assert_allclose(curvature.phi_curvature(ico, scaled, h),
                                       curvature.phi_curvature(ico, metric, h), atol=1e-10)
            np.testing.assert_allclose(curvature.psi_curvature(ico, scaled, h),
                                       curvature.psi_curvature(ico, metric, h), atol=1e-10)


@pytest.mark.parametrize("h", [-2.0, -1.0, 0.0, 1.0])
def test_euclidean_psi_is_minus_phi(ico, rng, h):
    # (b + c - a)/2 = pi/2 - a in E2, and the substitution t -> pi/2 - t flips the sign
    metric = random_admissible(ico, Geometry.E2, rng)
    np.testing.assert_allclose(curvature.psi_curvature(ico, metric, h),
                               -curvature.phi_curvature(ico, metric, h), atol=1e-9)


def test_phi_is_sum_over_opposite_angles(octa, rng):
    metric = random_admissible(octa, Geometry.H2, rng)
    theta = curvature.corner_angles(octa, metric)
    phi = curvature.phi_curvature(octa, metric, 0.5)
    for e in range(octa.n_edges):
        want = sum(i_sin(0.5, theta[t, c]) for t, c in octa.edge_tris[e])
        assert phi[e] == pytest.approx(want, abs=1e-12)


def test_edge_fields_independent_of_triangle_order(ico, rng):
    metric = random_admissible(ico, Geometry.S2, rng)
    perm = rng.permutation(ico.n_triangles)
    flipped = ico.triangles[perm][:, ::-1]
    other = mesh.build(12, flipped)
    for h in (-2.0, 0.0):
        np.testing.assert_allclose(curvature.phi_curvature(other, metric, h),
                                   curvature.phi_curvature(ico, metric, h), atol=1e-13)
        np.testing.assert_allclose(curvature.psi_curvature(other, metric, h),
                                   curvature.psi_curvature(ico, metric, h), atol=1e-13)
