import unittest

import numpy as np
from scipy import linalg

from src.spectral.basis import build_round_basis
from src.spectral.metric import ConformalSphereMetric
from src.spectral.solver import (
    assemble_multiplication_matrix,
    axisymmetric_mode_spectrum,
    conformal_dirac_spectrum,
    spectrum_at_truncation,
)
from src.utils.errors import (
    ConvergenceError,
    DefinitenessError,
    PreconditionError,
    ResolutionError,
)


def polynomial_metric():
    return ConformalSphereMetric.from_profile(
        lambda theta: 0.25 * np.cos(theta) ** 2 - 0.1 * np.cos(theta), label="poly"
    )


class TestMultiplicationMatrix(unittest.TestCase):
    def setUp(self):
        self.basis = build_round_basis(5)
        self.grid = self.basis.grid

    def test_constant_weight_scales_identity(self):
        matrix = assemble_multiplication_matrix(np.full(self.grid.n_theta, 2.5), self.basis)
        np.testing.assert_allclose(matrix, 2.5 * np.eye(self.basis.n_modes), atol=1e-10)

    def test_axisymmetric_weight_is_block_diagonal(self):
        profile = 1.0 + 0.3 * np.cos(self.grid.theta) ** 2
        samples = np.repeat(profile[:, None], self.grid.n_phi, axis=1)
        matrix = assemble_multiplication_matrix(samples, self.basis)
        off_block = self.basis.twice_m[:, None] != self.basis.twice_m[None, :]
        self.assertLess(np.max(np.abs(matrix[off_block])), 1e-12)

    def test_general_weight_is_hermitian(self):
        matrix = assemble_multiplication_matrix(
            lambda theta, phi: np.exp(0.2 * np.sin(theta) * np.cos(phi)), self.basis
        )
        np.testing.assert_allclose(matrix, matrix.conj().T, atol=1e-12)
        self.assertGreater(np.min(np.linalg.eigvalsh(matrix)), 0.0)

    def test_rejects_nonpositive_weight(self):
        samples = np.ones(self.grid.n_theta)
        samples[3] = -1.0
        with self.assertRaises(DefinitenessError):
            assemble_multiplication_matrix(samples, self.basis)

    def test_rejects_mismatched_samples(self):
        with self.assertRaises(ResolutionError):
            assemble_multiplication_matrix(np.ones(self.grid.n_theta + 1), self.basis)


class TestConformalDiracSpectrum(unittest.TestCase):
    def test_unit_round_sphere(self):
        result = conformal_dirac_spectrum(ConformalSphereMetric.constant(0.0), L=4)
        self.assertAlmostEqual(result.lambda1, 1.0, delta=1e-10)
        self.assertLess(result.convergence_estimate, 1e-12)

    def test_round_sphere_of_radius(self):
        for radius in (0.5, 3.0):
            result = conformal_dirac_spectrum(ConformalSphereMetric.round_sphere(radius), L=4)
            self.assertAlmostEqual(result.lambda1, 1.0 / radius, delta=1e-10)

    def test_spectrum_is_symmetric(self):
        values = spectrum_at_truncation(polynomial_metric(), 10)
        np.testing.assert_allclose(np.sort(values), -np.sort(values)[::-1], atol=1e-8)

    def test_bar_hijazi_bound(self):
        metric = polynomial_metric()
        result = conformal_dirac_spectrum(metric, L=8)
        self.assertGreater(result.lambda1, 2.0 * np.sqrt(np.pi / metric.area()))
        self.assertLess(result.convergence_estimate, 1e-7)

    def test_block_union_reproduces_full_solver(self):
        metric = polynomial_metric()
        L = 6
        blocks = [
            axisymmetric_mode_spectrum(metric, twice_m / 2.0, L)
            for twice_m in range(-(2 * L + 1), 2 * L + 2, 2)
        ]
        union = np.sort(np.concatenate(blocks))

        basis = build_round_basis(L)
        theta, phi = np.meshgrid(basis.grid.theta, basis.grid.phi, indexing='ij')
        weight = np.exp(metric.values(theta, phi))
        mass = assemble_multiplication_matrix(weight, basis)
        dense = np.sort(linalg.eigh(np.diag(basis.eigenvalues), mass, eigvals_only=True))
        np.testing.assert_allclose(union, dense, atol=1e-8)

    def test_round_block_contains_unit_eigenvalues(self):
        values = axisymmetric_mode_spectrum(ConformalSphereMetric.constant(0.0), 0.5, 4)
        self.assertTrue(np.any(np.isclose(values, 1.0, atol=1e-12)))
        self.assertTrue(np.any(np.isclose(values, -1.0, atol=1e-12)))

    def test_opposite_blocks_are_mirror_images(self):
        metric = polynomial_metric()
        plus = axisymmetric_mode_spectrum(metric, 1.5, 8)
        minus = axisymmetric_mode_spectrum(metric, -1.5, 8)
        combined = np.sort(np.concatenate([plus, minus]))
        np.testing.assert_allclose(combined, -combined[::-1], atol=1e-8)

    def test_mode_spectrum_rejects_general_metric(self):
        rotated = polynomial_metric().rotated(np.eye(3))
        with self.assertRaises(PreconditionError):
            axisymmetric_mode_spectrum(rotated, 0.5, 4)

    def test_rotation_invariance(self):
        metric = polynomial_metric()
        angle = 0.8
        rotation = np.array([
            [np.cos(angle), 0.0, np.sin(angle)],
            [0.0, 1.0, 0.0],
            [-np.sin(angle), 0.0, np.cos(angle)],
        ])
        original = spectrum_at_truncation(metric, 6)
        rotated = spectrum_at_truncation(metric.rotated(rotation), 6)
        np.testing.assert_allclose(rotated, original, atol=1e-8)

    def test_moebius_regauging_invariance(self):
        metric = polynomial_metric()
        original = conformal_dirac_spectrum(metric, L=8)
        boosted = conformal_dirac_spectrum(metric.boosted(0.3), L=8)
        self.assertAlmostEqual(boosted.lambda1, original.lambda1, delta=1e-6)

    def test_convergence_failure_reports_last_values(self):
        with self.assertRaises(ConvergenceError) as ctx:
            conformal_dirac_spectrum(polynomial_metric(), L=2, tol=0.0, max_degree=10, step=8)
        self.assertEqual(len(ctx.exception.last_values), 2)


if __name__ == '__main__':
    unittest.main()
