import unittest
from unittest.mock import patch

import numpy as np

from src.geometry.shapes import ellipsoid, hyperbolic_ellipsoid, hyperbolic_geodesic_sphere
from src.harness.hyperbolic import hyperbolic_checks, kappa_continuation, modified_eigenvalue
from src.harness.records import EQUALITY, HOLDS, NOT_APPLICABLE, CheckRecord
from src.utils.errors import PreconditionError


def by_theorem(records):
    return {record.theorem: record for record in records}


class TestGeodesicSpheres(unittest.TestCase):
    def test_equality_cases(self):
        for r in (0.5, 1.0, 2.0):
            records = by_theorem(hyperbolic_checks(hyperbolic_geodesic_sphere(r, 1.0), tol=1e-8))
            self.assertAlmostEqual(records['thm1.7'].extras['lambda_pm'], 1.0 / np.tanh(r), delta=1e-8)
            self.assertEqual(sorted(records), ['cor1.8', 'ginoux', 'thm1.7'])
            for name in ('thm1.7', 'cor1.8', 'ginoux'):
                self.assertEqual(records[name].verdict, EQUALITY, f"{name} at r={r}")

    def test_modified_eigenvalue_identity(self):
        r = 0.8
        self.assertAlmostEqual(modified_eigenvalue(1.0 / np.sinh(r), 1.0), 1.0 / np.tanh(r), delta=1e-14)

    def test_minkowski_type_factor(self):
        r = 1.0
        surface = hyperbolic_geodesic_sphere(r, 1.0)
        factor = 4.0 * np.sqrt(np.pi / surface.area + 0.25)
        self.assertAlmostEqual(factor, 2.0 / np.tanh(r), delta=1e-10)


class TestGeneralSurfaces(unittest.TestCase):
    def test_spheroid_is_strict(self):
        records = by_theorem(hyperbolic_checks(hyperbolic_ellipsoid(1.0, 1.2, 1.0)))
        for name in ('thm1.7', 'cor1.8', 'ginoux'):
            self.assertEqual(records[name].verdict, HOLDS, name)

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            hyperbolic_checks(ellipsoid(1.0, 1.2))
        with self.assertRaises(PreconditionError):
            hyperbolic_checks(hyperbolic_geodesic_sphere(1.0, 1.0), kappa=2.0)

    def test_flat_limit(self):
        records = kappa_continuation(1.0, 1.2, 1e-3)
        self.assertEqual([r.theorem for r in records], ['thm1.7-limit', 'cor1.8-limit'])
        for record in records:
            self.assertEqual(record.verdict, EQUALITY, record.theorem)
            self.assertLess(abs(record.lhs - record.rhs), 1e-5)

    @patch('src.harness.hyperbolic.hyperbolic_checks')
    def test_flat_limit_skips_inapplicable_records(self, mock_checks):
        records = by_theorem(hyperbolic_checks(hyperbolic_ellipsoid(1.0, 1.2, 1e-3)))
        records['cor1.8'] = CheckRecord.not_applicable('cor1.8', 'stub', 'sectional curvature not bounded below')
        mock_checks.return_value = list(records.values())
        continuation = by_theorem(kappa_continuation(1.0, 1.2, 1e-3))
        self.assertEqual(continuation['cor1.8-limit'].verdict, NOT_APPLICABLE)
        self.assertEqual(continuation['thm1.7-limit'].verdict, EQUALITY)


if __name__ == '__main__':
    unittest.main()
