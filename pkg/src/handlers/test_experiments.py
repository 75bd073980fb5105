"""
Tests for experiment configuration, dispatch and exit statuses.
"""
import json
import os
import tempfile
import threading
import unittest
from pathlib import Path
from unittest.mock import patch

from config.settings import config
from src.handlers.experiments import (
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VIOLATION,
    ExperimentConfig,
    exit_status,
    load_settings_file,
    run,
    settings_override,
)
from src.harness.records import AGREEMENT, EQUALITY, HOLDS, NOT_APPLICABLE, CheckRecord
from src.services.artifacts import read_table
from src.spectral.basis import make_grid
from src.spectral.io import write_nodal_samples
from src.utils.errors import ArtifactError, ConfigurationError, ConvergenceError


def _holds():
    return CheckRecord.compare('bar-hijazi', 'stub', 1.0, 2.0, 1e-6)


def _violated():
    return CheckRecord.compare('thm1.1', 'stub', 2.0, 1.0, 1e-6)


def _inconclusive():
    return CheckRecord.inconclusive('bar', 'stub', 'solver failed')


class TestExperimentConfig(unittest.TestCase):
    def test_valid_experiments(self):
        experiments = [
            ExperimentConfig('spectrum', surface='ellipsoid:a=1,c=1.2'),
            ExperimentConfig('thm1', surface='sphere:r=1'),
            ExperimentConfig('large-sphere', chart='schwarzschild:m=1'),
            ExperimentConfig('small-sphere', chart='spaceform:k=1'),
            ExperimentConfig('shitam-flow', surface='sphere:r=2', u0='const:1.25'),
            ExperimentConfig('hyperbolic', surface='hyp-geodesic-sphere:r=1,kappa=1', kappa_limit=0.01),
            ExperimentConfig('sweep'),
        ]
        for experiment in experiments:
            self.assertEqual(experiment.validate(), [], experiment.kind)

    def test_default_radii(self):
        self.assertEqual(len(ExperimentConfig('small-sphere', chart='spaceform:k=1').radii), 12)
        self.assertEqual(ExperimentConfig('large-sphere', chart='schwarzschild:m=1').radii, [50.0, 100.0, 200.0, 400.0])
        self.assertEqual(ExperimentConfig('thm1', surface='sphere:r=1').radii, [])

    def test_validation_errors(self):
        cases = [
            (ExperimentConfig('spectrum'), 'exactly one'),
            (ExperimentConfig('spectrum', surface='sphere:r=1', samples='u.txt'), 'exactly one'),
            (ExperimentConfig('thm1'), 'needs a surface'),
            (ExperimentConfig('thm1', surface='hyp-geodesic-sphere:r=1,kappa=1'), 'Euclidean'),
            (ExperimentConfig('hyperbolic', surface='sphere:r=1'), 'hyp-geodesic-sphere'),
            (ExperimentConfig('large-sphere', chart='spaceform:k=1'), 'asymptotically flat'),
            (ExperimentConfig('small-sphere', chart='spaceform:k=1', radii=[0.1, 0.2]), 'At least 3'),
            (ExperimentConfig('thm1', surface='sphere:r=1', kappa_limit=0.1), 'kappa_limit'),
            (ExperimentConfig('thm1', surface='sphere:r=1', tol=0.0), 'tol'),
            (ExperimentConfig('thm1', surface='sphere:r=1', output_format='xml'), 'format'),
            (ExperimentConfig('teapot'), 'Unknown experiment'),
        ]
        for experiment, fragment in cases:
            errors = experiment.validate()
            self.assertTrue(any(fragment in error for error in errors), f"{experiment.kind}: {errors}")

    def test_config_hash_ignores_output_settings(self):
        base = ExperimentConfig('thm1', surface='sphere:r=1')
        moved = ExperimentConfig('thm1', surface='sphere:r=1', out_dir='elsewhere', output_format='csv', html=True)
        tighter = ExperimentConfig('thm1', surface='sphere:r=1', tol=1e-9)
        self.assertEqual(base.config_hash(), moved.config_hash())
        self.assertNotEqual(base.config_hash(), tighter.config_hash())
        self.assertEqual(len(base.config_hash()), 64)

    def test_from_mapping(self):
        experiment = ExperimentConfig.from_mapping('small-sphere', {
            'chart': 'schwarzschild:m=1',
            'point': '2,0,0',
            'n-steps': '40',
            'out': 'results/small',
            'format': 'csv',
            'L': '12',
            'plot': 'yes',
            'seed': None,
        })
        self.assertEqual(experiment.point, (2.0, 0.0, 0.0))
        self.assertEqual(experiment.n_steps, 40)
        self.assertEqual(experiment.out_dir, 'results/small')
        self.assertEqual(experiment.output_format, 'csv')
        self.assertEqual(experiment.truncation, 12)
        self.assertTrue(experiment.plot)
        self.assertEqual(experiment.seed, config.SEED)

    def test_from_mapping_errors(self):
        with self.assertRaises(ConfigurationError) as ctx:
            ExperimentConfig.from_mapping('thm1', {'surface': 'sphere:r=1', 'colour': 'blue', 'threads': 'many'})
        self.assertEqual(len(ctx.exception.errors), 2)
        self.assertEqual(ctx.exception.exit_code, 64)

    def test_load_settings_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'lab.conf')
            Path(path).write_text("# comment\nsurface=sphere:r=1\ntol=1e-8\n", encoding='utf-8')
            self.assertEqual(load_settings_file(path), {'surface': 'sphere:r=1', 'tol': '1e-8'})
            with self.assertRaises(ArtifactError):
                load_settings_file(os.path.join(tmp, 'absent.conf'))


class TestExitStatus(unittest.TestCase):
    def test_priority(self):
        self.assertEqual(exit_status([_holds()]), EXIT_OK)
        self.assertEqual(exit_status([_holds(), _inconclusive()]), EXIT_NUMERICAL)
        self.assertEqual(exit_status([_inconclusive(), _violated()]), EXIT_VIOLATION)
        self.assertEqual(exit_status([]), EXIT_OK)
        self.assertEqual(exit_status([_holds(), CheckRecord.not_applicable('bar', 'x', 'abstract metric')]), EXIT_OK)

    def test_settings_override_restores(self):
        before = config.THREADS
        with settings_override(THREADS=before + 3):
            self.assertEqual(config.THREADS, before + 3)
        self.assertEqual(config.THREADS, before)

    def test_settings_override_restores_after_error(self):
        before = config.EQUALITY_TOL
        with self.assertRaises(ConvergenceError):
            with settings_override(EQUALITY_TOL=1e-3):
                raise ConvergenceError("lambda1 did not settle", [1.0, 1.1])
        self.assertEqual(config.EQUALITY_TOL, before)

    def test_settings_overrides_are_serialized(self):
        before = config.THREADS
        done = threading.Event()
        seen = []

        def other():
            with settings_override(THREADS=before + 7):
                seen.append(config.THREADS)
            done.set()

        with settings_override(THREADS=before + 3):
            worker = threading.Thread(target=other)
            worker.start()
            self.assertFalse(done.wait(0.2))
            self.assertEqual(config.THREADS, before + 3)
        worker.join(5)
        self.assertEqual(seen, [before + 7])
        self.assertEqual(config.THREADS, before)


class TestRunDispatch(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def _experiment(self, **kwargs):
        return ExperimentConfig('thm1', surface='sphere:r=1', out_dir=self.tmp.name, **kwargs)

    def test_invalid_configuration(self):
        self.assertEqual(run(ExperimentConfig('thm1', out_dir=self.tmp.name)), 64)
        self.assertEqual(os.listdir(self.tmp.name), [])

    def test_violation_exit(self):
        with patch.dict('src.handlers.experiments.EXPERIMENTS', {'thm1': lambda e, w: [_holds(), _violated()]}):
            self.assertEqual(run(self._experiment()), EXIT_VIOLATION)

    def test_inconclusive_exit(self):
        with patch.dict('src.handlers.experiments.EXPERIMENTS', {'thm1': lambda e, w: [_inconclusive()]}):
            self.assertEqual(run(self._experiment()), EXIT_NUMERICAL)

    def test_numerical_failure_exit(self):
        def failing(experiment, writer):
            raise ConvergenceError("lambda1 did not settle", [1.0, 1.1])

        with patch.dict('src.handlers.experiments.EXPERIMENTS', {'thm1': failing}):
            self.assertEqual(run(self._experiment()), EXIT_NUMERICAL)

    def test_unwritable_output(self):
        blocker = os.path.join(self.tmp.name, 'blocker')
        Path(blocker).write_text('not a directory', encoding='utf-8')
        experiment = ExperimentConfig('thm1', surface='sphere:r=1', out_dir=os.path.join(blocker, 'out'))
        with patch.dict('src.handlers.experiments.EXPERIMENTS', {'thm1': lambda e, w: [_holds()]}):
            self.assertEqual(run(experiment), 74)

    def test_settings_applied_during_run_only(self):
        seen = {}

        def capture(experiment, writer):
            seen['threads'] = config.THREADS
            seen['truncation'] = config.DEFAULT_TRUNCATION
            return [_holds()]

        before = (config.THREADS, config.DEFAULT_TRUNCATION)
        with patch.dict('src.handlers.experiments.EXPERIMENTS', {'thm1': capture}):
            run(self._experiment(threads=3, truncation=24))
        self.assertEqual(seen, {'threads': 3, 'truncation': 24})
        self.assertEqual((config.THREADS, config.DEFAULT_TRUNCATION), before)

    @patch('src.handlers.experiments.property_sweep')
    def test_sweep_arguments(self, mock_sweep):
        mock_sweep.return_value = [
            CheckRecord.compare('spectral-symmetry', 'bump', 0.0, 0.0, 1e-12, kind=AGREEMENT, relative=False),
        ]
        experiment = ExperimentConfig('sweep', count=5, seed=7, truncation=10, threads=2, out_dir=self.tmp.name)
        self.assertEqual(run(experiment), EXIT_OK)
        mock_sweep.assert_called_once_with(5, 7, 10, 2)


class TestRunExperiments(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def _load(self, name):
        return json.loads((self.out / name).read_text(encoding='utf-8'))

    def test_thm1_round_sphere(self):
        experiment = ExperimentConfig('thm1', surface='sphere:r=1', out_dir=self.tmp.name, html=True)
        self.assertEqual(run(experiment), EXIT_OK)

        document = self._load('thm1_records.json')
        self.assertEqual(document['config_hash'], experiment.config_hash())
        theorems = [record['theorem'] for record in document['data']]
        self.assertIn('dual-solver', theorems)
        self.assertIn('thm1.1', theorems)
        for record in document['data']:
            self.assertEqual(record['verdict'], EQUALITY, record['theorem'])

        summary = self._load('thm1_spectrum_summary.json')['data']
        self.assertAlmostEqual(summary['lambda1'], 1.0, delta=1e-8)
        self.assertTrue((self.out / 'thm1_config.json').exists())
        self.assertIn(experiment.config_hash(), (self.out / 'thm1_report.html').read_text(encoding='utf-8'))

        first = {path.name: path.read_bytes() for path in self.out.iterdir()}
        self.assertEqual(run(experiment), EXIT_OK)
        second = {path.name: path.read_bytes() for path in self.out.iterdir()}
        self.assertEqual(first, second)

    def test_thm1_csv_records(self):
        experiment = ExperimentConfig('thm1', surface='sphere:r=1', out_dir=self.tmp.name, output_format='csv')
        self.assertEqual(run(experiment), EXIT_OK)
        table = read_table(self.out / 'thm1_records.csv')
        self.assertEqual(table['header']['config_hash'], experiment.config_hash())
        verdicts = [row[table['columns'].index('verdict')] for row in table['rows']]
        self.assertEqual(set(verdicts), {EQUALITY})

    def test_spectrum_of_sample_file(self):
        grid = make_grid(20, 1)
        path = write_nodal_samples(self.out / 'u.txt', 18, 0.1 * grid.x ** 2)
        experiment = ExperimentConfig('spectrum', samples=str(path), out_dir=self.tmp.name)
        self.assertEqual(run(experiment), EXIT_OK)
        records = {record['theorem']: record for record in self._load('spectrum_records.json')['data']}
        self.assertEqual(records['bar']['verdict'], NOT_APPLICABLE)
        self.assertIn(records['dual-solver']['verdict'], (HOLDS, EQUALITY))
        table = read_table(self.out / 'spectrum_spectrum.csv')
        self.assertEqual(table['columns'], ['index', 'eigenvalue'])
        self.assertEqual(table['header']['config_hash'], experiment.config_hash())

    def test_spectrum_of_hyperbolic_surface(self):
        experiment = ExperimentConfig('spectrum', surface='hyp-geodesic-sphere:r=1,kappa=1', out_dir=self.tmp.name)
        self.assertEqual(run(experiment), EXIT_OK)
        records = {record['theorem']: record for record in self._load('spectrum_records.json')['data']}
        self.assertEqual(records['bar']['verdict'], NOT_APPLICABLE)

    def test_flow_schwarzschild_mass(self):
        experiment = ExperimentConfig(
            'shitam-flow', surface='sphere:r=2', u0='const:1.25', resolution=16, out_dir=self.tmp.name,
        )
        run(experiment)
        records = {record['theorem']: record for record in self._load('shitam-flow_records.json')['data']}
        self.assertEqual(records['flow-schwarzschild']['verdict'], EQUALITY)
        self.assertAlmostEqual(records['flow-schwarzschild']['rhs'], 0.36, delta=1e-12)
        self.assertIn(records['flow-monotone']['verdict'], ('holds', 'equality'))
        self.assertIn(records['flow-mass-bound']['verdict'], ('holds', 'equality'))
        table = read_table(self.out / 'shitam-flow_trajectory.csv')
        self.assertEqual(table['columns'], ['rho', 'min_u', 'max_u', 'Q', 'residual'])

    def test_small_sphere_space_form(self):
        experiment = ExperimentConfig('small-sphere', chart='spaceform:k=1', out_dir=self.tmp.name)
        self.assertEqual(run(experiment), EXIT_OK)
        fit = self._load('small-sphere_fit.json')['data']
        self.assertAlmostEqual(fit['lambda1']['coefficients']['1'], 1.0 / 6.0, delta=1e-3)
        self.assertTrue((self.out / 'small-sphere_spheres.csv').exists())


if __name__ == '__main__':
    unittest.main()
