import unittest

import numpy as np

from src.spectral.basis import make_grid
from src.spectral.metric import ConformalSphereMetric
from src.utils.errors import PreconditionError


def bump(amplitude=0.2, width=5.0):
    return ConformalSphereMetric.from_profile(
        lambda theta: amplitude * np.exp(-width * np.cos(theta) ** 2), label="bump"
    )


def rotation_about_x(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


class TestConformalSphereMetric(unittest.TestCase):
    def test_round_area(self):
        for radius in (0.5, 1.0, 3.0):
            metric = ConformalSphereMetric.round_sphere(radius)
            self.assertAlmostEqual(metric.area(), 4 * np.pi * radius ** 2, delta=1e-10 * radius ** 2)
            self.assertTrue(metric.is_constant)

    def test_round_curvature(self):
        metric = ConformalSphereMetric.round_sphere(2.0)
        theta = np.linspace(0.2, 2.9, 5)
        np.testing.assert_allclose(metric.gauss_curvature(theta), 0.25, atol=1e-10)

    def test_rejects_nonpositive_radius(self):
        with self.assertRaises(PreconditionError):
            ConformalSphereMetric.round_sphere(0.0)

    def test_gauss_bonnet_axisymmetric(self):
        self.assertAlmostEqual(bump().gauss_bonnet_integral(), 4 * np.pi, delta=1e-8)

    def test_gauss_bonnet_after_rotation(self):
        rotated = bump().rotated(rotation_about_x(0.7))
        self.assertFalse(rotated.axisymmetric)
        self.assertAlmostEqual(rotated.gauss_bonnet_integral(48), 4 * np.pi, delta=1e-5)

    def test_rotation_preserves_area(self):
        metric = bump()
        rotated = metric.rotated(rotation_about_x(1.1))
        self.assertAlmostEqual(rotated.area(48), metric.area(), delta=1e-9)

    def test_boost_preserves_area_and_curvature_integral(self):
        metric = bump()
        boosted = metric.boosted(0.3)
        self.assertAlmostEqual(boosted.area(), metric.area(), delta=1e-8)
        self.assertAlmostEqual(boosted.gauss_bonnet_integral(), 4 * np.pi, delta=1e-8)

    def test_boosted_round_sphere_is_not_constant(self):
        boosted = ConformalSphereMetric.constant(0.0).boosted(0.5)
        values = boosted.values(np.array([0.3, 1.5, 2.8]))
        self.assertGreater(np.ptp(values), 0.1)
        self.assertAlmostEqual(boosted.area(), 4 * np.pi, delta=1e-8)

    def test_from_samples_axisymmetric(self):
        grid = make_grid(40, 1)
        profile = lambda theta: 0.3 * np.cos(theta) ** 3 - 0.1 * np.exp(np.cos(theta))
        metric = ConformalSphereMetric.from_samples(profile(grid.theta))
        self.assertTrue(metric.axisymmetric)
        theta = np.linspace(0.05, 3.1, 11)
        np.testing.assert_allclose(metric.values(theta), profile(theta), atol=1e-12)

    def test_from_samples_general(self):
        grid = make_grid(24, 16)
        theta, phi = np.meshgrid(grid.theta, grid.phi, indexing='ij')
        field = lambda t, p: 0.1 * np.cos(t) + 0.05 * np.sin(t) ** 2 * np.cos(2 * p)
        metric = ConformalSphereMetric.from_samples(field(theta, phi))
        self.assertFalse(metric.axisymmetric)
        theta = np.array([0.4, 1.3, 2.2])
        phi = np.array([0.1, 2.0, 4.5])
        np.testing.assert_allclose(metric.values(theta, phi), field(theta, phi), atol=1e-12)

    def test_scaled_shifts_exponent(self):
        metric = bump().scaled(2.0)
        self.assertAlmostEqual(metric.area(), 4 * bump().area(), delta=1e-9)


if __name__ == '__main__':
    unittest.main()
