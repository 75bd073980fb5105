import unittest

import numpy as np

from src.harness.sweeps import bump_metric, property_sweep

THEOREMS = {'spectral-symmetry', 'rotation-invariance', 'gauss-bonnet', 'bar-hijazi', 'moebius-invariance'}


class TestPropertySweep(unittest.TestCase):
    def test_small_sweep_passes(self):
        records = property_sweep(count=3, seed=7, L=6)
        self.assertEqual(len(records), 15)
        self.assertEqual({r.theorem for r in records}, THEOREMS)
        for record in records:
            self.assertTrue(record.passed, f"{record.theorem} on {record.inputs}: {record.verdict}")

    def test_seed_is_reproducible(self):
        first = property_sweep(count=2, seed=11, L=4)
        second = property_sweep(count=2, seed=11, L=4, threads=2)
        self.assertEqual([r.inputs for r in first], [r.inputs for r in second])
        np.testing.assert_allclose([r.lhs for r in first], [r.lhs for r in second], rtol=1e-12)

    def test_bump_metric_profile(self):
        metric = bump_metric(0.2, 5.0, 0.0)
        self.assertAlmostEqual(float(metric.values(np.pi / 2)), 0.2, delta=1e-14)
        self.assertTrue(metric.axisymmetric)


if __name__ == '__main__':
    unittest.main()
