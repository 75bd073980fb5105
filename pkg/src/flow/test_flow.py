import unittest

import numpy as np

from src.flow.collocation import interpolant, lobatto_nodes
from src.flow.flow import QuasiSphericalFlow, run_flow
from src.flow.foliation import ExteriorFoliation
from src.flow.residual import derive_pde_residual
from src.geometry.shapes import ellipsoid, hyperbolic_geodesic_sphere, sphere
from src.geometry.surface import EmbeddedSurface
from src.utils.errors import GeometryError, PreconditionError


class TestCollocation(unittest.TestCase):
    def test_differentiation_and_quadrature(self):
        x, D, w = lobatto_nodes(16)
        np.testing.assert_allclose(D @ x ** 3, 3 * x ** 2, atol=1e-12)
        self.assertAlmostEqual(np.dot(w, np.exp(x)), np.e - 1 / np.e, delta=1e-13)
        self.assertAlmostEqual(np.sum(w), 2.0, delta=1e-14)

    def test_interpolant(self):
        x, _, _ = lobatto_nodes(12)
        series = interpolant(np.cos(2 * x))
        self.assertAlmostEqual(series(0.3), np.cos(0.6), delta=1e-10)


class TestExteriorFoliation(unittest.TestCase):
    def test_round_parallel_surfaces(self):
        foliation = ExteriorFoliation(sphere(2.0))
        geom = foliation.at(3.0, np.array([0.0, 1.0, np.pi]))
        np.testing.assert_allclose(geom.mean_curvature, 0.4, rtol=1e-12)
        np.testing.assert_allclose(geom.gauss_curvature, 0.04, rtol=1e-12)
        np.testing.assert_allclose(geom.eta, 5.0, rtol=1e-12)

    def test_offset_curvatures_match_direct_computation(self):
        foliation = ExteriorFoliation(ellipsoid(1.0, 1.2))
        theta = np.linspace(0.3, 2.8, 9)
        geom = foliation.at(0.7, theta)
        meridian, parallel = foliation.direct_offset_curvatures(0.7, theta)
        np.testing.assert_allclose(geom.kappa_meridian, meridian, atol=1e-8)
        np.testing.assert_allclose(geom.kappa_parallel, parallel, atol=1e-8)

    def test_mean_curvature_decreases_like_two_over_rho(self):
        foliation = ExteriorFoliation(ellipsoid(1.0, 1.3))
        theta = np.linspace(0.0, np.pi, 11)
        means = np.array([foliation.at(rho, theta).mean_curvature for rho in (0.0, 0.5, 2.0, 10.0)])
        self.assertTrue(np.all(np.diff(means, axis=0) < 0))
        far = foliation.at(1e4, theta).mean_curvature
        np.testing.assert_allclose(1e4 * far / 2.0, 1.0, atol=1e-3)

    def test_non_convex_base_rejected(self):
        peanut = EmbeddedSurface.from_radial_function(lambda t: 1.0 + 0.45 * np.cos(2 * t), label='peanut')
        with self.assertRaises(GeometryError):
            ExteriorFoliation(peanut)

    def test_hyperbolic_base_rejected(self):
        with self.assertRaises(PreconditionError):
            ExteriorFoliation(hyperbolic_geodesic_sphere(1.0))


class TestQuasiSphericalFlow(unittest.TestCase):
    def test_flat_extension(self):
        trajectory = run_flow(sphere(1.5), 1.0, resolution=16, residual_checkpoints=0)
        self.assertAlmostEqual(trajectory.mass, 0.0, delta=1e-10)
        self.assertLess(np.max(np.abs(trajectory.monotone_quantities)), 1e-10)
        self.assertLess(trajectory.max_deviation_from_one, 1e-10)
        self.assertTrue(trajectory.flat_consistent)

    def test_schwarzschild_calibration(self):
        trajectory = run_flow(sphere(2.0), 1.25, resolution=16)
        self.assertAlmostEqual(trajectory.mass, 0.36, delta=1e-4)
        self.assertAlmostEqual(trajectory.initial.monotone_quantity, 3.2 * np.pi, delta=1e-10)
        self.assertTrue(np.all(np.diff(trajectory.monotone_quantities) <= 1e-8))
        self.assertAlmostEqual(trajectory.final.rho, 200.0, delta=1e-9)

    def test_ellipsoid_flow_is_monotone(self):
        trajectory = run_flow(ellipsoid(1.0, 1.2), lambda t: 1.0 + 0.1 * np.cos(t) ** 2, resolution=16)
        q = trajectory.monotone_quantities
        self.assertTrue(np.all(np.diff(q) <= 1e-8 * np.maximum(1.0, np.abs(q[:-1]))))
        self.assertGreater(trajectory.final.min_u, 0.0)
        self.assertEqual(len(trajectory.rows()[0]), 5)

    def test_nonpositive_initial_data_rejected(self):
        with self.assertRaises(PreconditionError):
            run_flow(sphere(1.0), -1.0)


class TestScalarCurvatureResidual(unittest.TestCase):
    def test_flat_metric(self):
        foliation = ExteriorFoliation(sphere(2.0))
        state = QuasiSphericalFlow(foliation, 12).state_at(1.0, np.ones(13))
        self.assertLess(derive_pde_residual(state, foliation), 1e-6)

    def test_schwarzschild_metric(self):
        r0, m = 2.0, 0.36
        foliation = ExteriorFoliation(sphere(r0))
        flow = QuasiSphericalFlow(foliation, 12)
        u = (1.0 - 2.0 * m / (r0 + 1.0)) ** -0.5 * np.ones(13)

        def field(rho, theta):
            return (1.0 - 2.0 * m / (r0 + rho)) ** -0.5 + 0.0 * theta

        self.assertLess(derive_pde_residual(flow.state_at(1.0, u), foliation, field), 1e-5)

    def test_residual_shrinks_under_refinement(self):
        foliation = ExteriorFoliation(ellipsoid(1.0, 1.2))
        residuals = []
        for n in (8, 24):
            flow = QuasiSphericalFlow(foliation, n)
            u = 1.0 + 0.1 * flow.x ** 2
            residuals.append(derive_pde_residual(flow.state_at(0.5, u), foliation))
        self.assertLess(residuals[1], 0.1 * residuals[0])
        self.assertLess(residuals[1], 1e-5)


if __name__ == '__main__':
    unittest.main()
