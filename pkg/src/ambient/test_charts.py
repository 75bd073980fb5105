import os
import tempfile
import unittest

import numpy as np

from src.ambient.charts import from_callable, make_chart, schwarzschild, space_form
from src.utils.errors import ArtifactError, ConfigurationError, PreconditionError


def write_perturbation(directory, text):
    path = os.path.join(directory, 'sigma.env')
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(text)
    return path


class TestCharts(unittest.TestCase):
    def test_euclidean(self):
        chart = make_chart('euclidean')
        points = np.array([[0.3, -1.0, 2.0], [5.0, 0.0, 0.1]])
        np.testing.assert_array_equal(chart.metric(points), np.broadcast_to(np.eye(3), (2, 3, 3)))
        self.assertEqual(np.max(np.abs(chart.metric_derivative(points))), 0.0)
        self.assertEqual(chart.mass, 0.0)

    def test_schwarzschild_conformal_factor(self):
        chart = make_chart('schwarzschild:m=1')
        g = chart.metric(np.array([10.0, 0.0, 0.0]))
        np.testing.assert_allclose(g, 1.05 ** 4 * np.eye(3), rtol=1e-14)
        self.assertEqual(chart.inner_radius, 0.5)
        self.assertTrue(chart.asymptotically_flat)

    def test_schwarzschild_domain(self):
        with self.assertRaises(PreconditionError):
            schwarzschild(1.0).check_domain(np.array([0.3, 0.0, 0.0]))

    def test_negative_space_form_domain(self):
        chart = space_form(-1.0)
        self.assertAlmostEqual(chart.outer_radius, 2.0)
        with self.assertRaises(PreconditionError):
            chart.check_domain(np.array([0.0, 2.5, 0.0]))

    def test_finite_difference_derivatives(self):
        exact = space_form(1.0)

        def metric(points):
            factor = (1.0 + np.sum(points ** 2, axis=-1) / 4.0) ** -2
            return factor[..., None, None] * np.eye(3)

        approximate = from_callable(metric)
        point = np.array([[0.3, 0.2, -0.1]])
        np.testing.assert_allclose(
            approximate.metric_derivative(point), exact.metric_derivative(point), atol=1e-10
        )
        np.testing.assert_allclose(
            approximate.metric_second_derivative(point), exact.metric_second_derivative(point), atol=1e-7
        )

    def test_bad_descriptors(self):
        for text in ('minkowski', 'schwarzschild', 'schwarzschild:m=-1', 'spaceform:k=x'):
            with self.assertRaises(ConfigurationError):
                make_chart(text)


class TestPerturbedCharts(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def test_perturbation_file(self):
        path = write_perturbation(self.tmp.name, 'xx=0.1*exp(-r**2)\nyz=0.05*exp(-r**2)\ntau=2\nmass=0\n')
        chart = make_chart(f'perturbed:file={path}')
        g = chart.metric(np.zeros(3))
        self.assertAlmostEqual(g[0, 0], 1.1)
        self.assertAlmostEqual(g[1, 2], 0.05)
        self.assertAlmostEqual(g[2, 1], 0.05)
        self.assertEqual(chart.decay_rate, 2.0)
        self.assertEqual(chart.mass, 0.0)

    def test_slow_decay_rejected(self):
        path = write_perturbation(self.tmp.name, 'xx=0.1/sqrt(r)\ntau=2\n')
        with self.assertRaises(ConfigurationError):
            make_chart(f'perturbed:file={path}')

    def test_bad_files(self):
        for text in ('xx=foo(x)\ntau=1\n', 'xx=0.1\n', 'xx=0.1*exp(-r)\ntau=0.3\n', 'qq=1\ntau=1\n'):
            path = write_perturbation(self.tmp.name, text)
            with self.assertRaises(ConfigurationError):
                make_chart(f'perturbed:file={path}')

    def test_missing_file(self):
        with self.assertRaises(ArtifactError):
            make_chart(f'perturbed:file={os.path.join(self.tmp.name, "absent.env")}')


if __name__ == '__main__':
    unittest.main()
