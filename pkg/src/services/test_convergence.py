import tempfile
import unittest
from pathlib import Path

import numpy as np

from src.ambient.charts import space_form
from src.ambient.spheres import integrate_geodesics
from src.geometry.shapes import ellipsoid
from src.geometry.uniformize import uniformize_axisymmetric
from src.services.artifacts import ArtifactWriter, read_table
from src.services.convergence import CONVERGED, build_convergence_table, emit_convergence_table
from src.spectral.solver import spectrum_at_truncation
from src.utils.errors import PreconditionError


class TestConvergenceTable(unittest.TestCase):
    def test_known_order(self):
        series = [(h, 1.0 + h ** 2) for h in (0.4, 0.2, 0.1, 0.05)]
        table = build_convergence_table(series, 'h')
        self.assertEqual(table.orders[:2], [None, None])
        for order in table.orders[2:]:
            self.assertAlmostEqual(order, 2.0, delta=1e-9)

    def test_levels_sorted_coarse_to_fine(self):
        table = build_convergence_table([(0.1, 1.01), (0.4, 1.16), (0.2, 1.04)], 'h')
        self.assertEqual(table.levels, [0.4, 0.2, 0.1])
        table = build_convergence_table([(24, 1.0), (8, 1.0), (16, 1.0)], 'L')
        self.assertEqual(table.levels, [8.0, 16.0, 24.0])

    def test_constant_series_is_converged(self):
        table = build_convergence_table([(8, 0.75), (16, 0.75), (24, 0.75)], 'L')
        self.assertEqual(table.final_order, CONVERGED)
        self.assertEqual(table.differences[1:], [0.0, 0.0])

    def test_too_few_levels_refused(self):
        with self.assertRaises(PreconditionError):
            build_convergence_table([(0.1, 1.0), (0.05, 1.0)])
        with self.assertRaises(PreconditionError):
            build_convergence_table([(0.1, 1.0), (0.1, 1.0), (0.05, 1.0)])
        with self.assertRaises(PreconditionError):
            build_convergence_table([(1, 1.0), (2, 1.0), (3, 1.0)], 'N')

    def test_ellipsoid_truncation_series(self):
        metric = uniformize_axisymmetric(ellipsoid(1.0, 1.2)).metric
        series = [(L, float(np.min(np.abs(spectrum_at_truncation(metric, L))))) for L in (2, 4, 6, 8)]
        table = build_convergence_table(series, 'L', label='ellipsoid')
        for order in table.orders[2:]:
            self.assertIsNotNone(order)
            if order != CONVERGED:
                self.assertTrue(np.isfinite(order))

    def test_geodesic_integrator_order(self):
        chart = space_form(1.0)
        state = np.zeros((1, 2, 3))
        state[0, 1, 2] = 1.0
        series = [
            (1.0 / n, integrate_geodesics(chart, state, 1.0, n)[0, 0, 2])
            for n in (8, 16, 32, 64)
        ]
        table = build_convergence_table(series, 'h', label='rk4')
        self.assertAlmostEqual(table.final_order, 4.0, delta=0.2)


class TestEmitConvergenceTable(unittest.TestCase):
    def test_csv_and_svg(self):
        with tempfile.TemporaryDirectory() as tmp:
            writer = ArtifactWriter(Path(tmp), 'feed', 'csv')
            series = [(h, 2.0 + h ** 4) for h in (0.5, 0.25, 0.125)]
            table = emit_convergence_table(series, writer, 'rk4', 'h', svg=True)
            parsed = read_table(Path(tmp) / 'rk4.csv')
            self.assertEqual(parsed['columns'], ['h', 'value', 'difference', 'order'])
            self.assertEqual(len(parsed['rows']), 3)
            self.assertEqual(parsed['rows'][0][2:], ['', ''])
            self.assertAlmostEqual(float(parsed['rows'][2][3]), table.final_order, delta=1e-12)
            self.assertTrue((Path(tmp) / 'rk4.svg').exists())


if __name__ == '__main__':
    unittest.main()
