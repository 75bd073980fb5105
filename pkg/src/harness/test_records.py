import json
import unittest

import numpy as np

from src.harness.records import (
    AGREEMENT,
    EQUALITY,
    HOLDS,
    INCONCLUSIVE,
    NOT_APPLICABLE,
    VIOLATED,
    CheckRecord,
    ExpansionFit,
    empirical_order,
    fit_powers,
)


class TestCheckRecord(unittest.TestCase):
    def test_verdicts(self):
        self.assertEqual(CheckRecord.compare('t', 'x', 1.0, 1.0 + 1e-9, 1e-6).verdict, EQUALITY)
        self.assertEqual(CheckRecord.compare('t', 'x', 1.0, 2.0, 1e-6).verdict, HOLDS)
        self.assertEqual(CheckRecord.compare('t', 'x', 2.0, 1.0, 1e-6).verdict, VIOLATED)
        self.assertEqual(CheckRecord.inconclusive('t', 'x', 'solver failed').verdict, INCONCLUSIVE)

    def test_slack_orientation(self):
        record = CheckRecord.compare('t', 'x', 1.0, 1.5, 1e-6)
        self.assertAlmostEqual(record.slack, 0.5)
        self.assertTrue(record.passed)

    def test_relative_tolerance_scales(self):
        record = CheckRecord.compare('t', 'x', 1000.0, 1000.0005, 1e-6)
        self.assertAlmostEqual(record.tolerance, 1e-3, delta=1e-9)
        self.assertEqual(record.verdict, EQUALITY)
        absolute = CheckRecord.compare('t', 'x', 1000.0, 1000.0005, 1e-6, relative=False)
        self.assertEqual(absolute.verdict, HOLDS)

    def test_agreement_is_never_holds(self):
        close = CheckRecord.compare('t', 'x', 1.0, 1.0 + 1e-4, 1e-3, kind=AGREEMENT)
        far = CheckRecord.compare('t', 'x', 1.0, 1.1, 1e-3, kind=AGREEMENT)
        self.assertEqual(close.verdict, EQUALITY)
        self.assertEqual(far.verdict, VIOLATED)
        self.assertLess(far.slack, 0.0)

    def test_not_applicable_passes(self):
        record = CheckRecord.not_applicable('bar', 'samples.txt', 'abstract metric has no mean curvature')
        self.assertEqual(record.verdict, NOT_APPLICABLE)
        self.assertTrue(record.passed)
        self.assertEqual(record.to_dict()['verdict'], 'not-applicable')

    def test_nan_side_is_inconclusive(self):
        self.assertEqual(CheckRecord.compare('t', 'x', float('nan'), 1.0, 1e-6).verdict, INCONCLUSIVE)

    def test_to_dict_is_json_ready(self):
        record = CheckRecord.compare('t', 'x', 1.0, 2.0, 1e-6, samples=np.arange(3), value=np.float64(2.5))
        data = json.loads(json.dumps(record.to_dict()))
        self.assertEqual(data['verdict'], HOLDS)
        self.assertEqual(data['extras']['samples'], [0, 1, 2])


class TestExpansionFit(unittest.TestCase):
    def setUp(self):
        self.radii = np.linspace(0.05, 0.3, 12)
        self.samples = 1.0 / self.radii + self.radii / 6.0 + 7.0 * self.radii ** 3 / 360.0

    def test_fit_powers_recovers_polynomial(self):
        coefficients, errors, residual = fit_powers(self.radii, self.samples, (-1, 1, 3))
        np.testing.assert_allclose(coefficients, [1.0, 1.0 / 6.0, 7.0 / 360.0], rtol=1e-8)
        self.assertLess(residual, 1e-10)
        self.assertTrue(np.all(errors < 1e-6))

    def test_uncertainty_nan_without_spare_samples(self):
        _, errors, _ = fit_powers(self.radii[:3], self.samples[:3], (-1, 1, 3))
        self.assertTrue(np.all(np.isnan(errors)))

    def test_empirical_order(self):
        self.assertAlmostEqual(empirical_order(self.radii, 0.3 * self.radii ** 3), 3.0, delta=1e-10)
        self.assertTrue(np.isnan(empirical_order(self.radii, np.zeros_like(self.radii))))

    def test_target_record(self):
        fit = ExpansionFit.fit(
            'lambda1', 'oracle', self.radii, self.samples, (-1, 1, 3),
            targets={1: (1.0 / 6.0, 'closed form'), 3: (0.02, 'wrong value')},
        )
        self.assertEqual(fit.target_record(1, 'linear', 1e-6).verdict, EQUALITY)
        self.assertEqual(fit.target_record(3, 'cubic', 1e-3).verdict, 'violated')
        self.assertEqual(len(fit.checks), 2)
        data = json.loads(json.dumps(fit.to_dict()))
        self.assertEqual(len(data['checks']), 2)

    def test_too_few_samples(self):
        with self.assertRaises(ValueError):
            ExpansionFit.fit('lambda1', 'oracle', self.radii[:2], self.samples[:2], (-1, 1, 3))


if __name__ == '__main__':
    unittest.main()
