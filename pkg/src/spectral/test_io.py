import os
import tempfile
import unittest

import numpy as np

from src.spectral.basis import make_grid
from src.spectral.io import read_nodal_samples, write_nodal_samples
from src.utils.errors import ArtifactError, ConfigurationError


class TestNodalSampleFiles(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.grid = make_grid(20, 1)
        self.values = 0.1 * np.cos(self.grid.theta) ** 2

    def tearDown(self):
        self.tmp.cleanup()

    def test_text_file(self):
        path = write_nodal_samples(os.path.join(self.tmp.name, 'u.txt'), 18, self.values)
        with open(path, encoding='utf-8') as handle:
            self.assertEqual(handle.readline().strip(), '# 18 20 1')
        metric = read_nodal_samples(path)
        self.assertTrue(metric.axisymmetric)
        np.testing.assert_allclose(metric.values(np.array([0.7])), 0.1 * np.cos(0.7) ** 2, atol=1e-12)

    def test_binary_file(self):
        path = write_nodal_samples(os.path.join(self.tmp.name, 'u.npz'), 18, self.values)
        metric = read_nodal_samples(path)
        np.testing.assert_allclose(metric.values(np.array([2.1])), 0.1 * np.cos(2.1) ** 2, atol=1e-12)

    def test_sample_count_mismatch(self):
        path = os.path.join(self.tmp.name, 'bad.txt')
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write('# 4 3 2\n1.0\n2.0\n')
        with self.assertRaises(ConfigurationError):
            read_nodal_samples(path)

    def test_missing_file(self):
        with self.assertRaises(ArtifactError):
            read_nodal_samples(os.path.join(self.tmp.name, 'absent.npz'))


if __name__ == '__main__':
    unittest.main()
