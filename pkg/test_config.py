"""
Settings loading and the defaults < environment < settings file < flags precedence.
"""
import os
import tempfile
import unittest
from unittest.mock import patch

from config.settings import Config, config
from app import main
from src.handlers.experiments import ExperimentConfig


class TestSettings(unittest.TestCase):
    def test_defaults(self):
        with patch.dict(os.environ, {}, clear=True):
            settings = Config.from_env()
        self.assertEqual(settings.OUTPUT_FORMAT, 'json')
        self.assertEqual(settings.DEFAULT_TRUNCATION, 16)
        self.assertEqual(settings.EQUALITY_TOL, 1e-6)
        self.assertEqual(settings.validate(), [])

    def test_environment_overrides(self):
        with patch.dict(os.environ, {'EQUALITY_TOL': '1e-8', 'THREADS': '4', 'OUTPUT_FORMAT': 'csv'}, clear=True):
            settings = Config.from_env()
        self.assertEqual(settings.EQUALITY_TOL, 1e-8)
        self.assertEqual(settings.THREADS, 4)
        self.assertEqual(settings.OUTPUT_FORMAT, 'csv')

    def test_validation_errors(self):
        settings = Config(OUTPUT_FORMAT='xml', THREADS=0, MAX_TRUNCATION=4)
        errors = settings.validate()
        self.assertEqual(len(errors), 3)

    def test_experiment_defaults_follow_settings(self):
        with patch.object(config, 'EQUALITY_TOL', 1e-5), patch.object(config, 'OUTPUT_DIR', 'elsewhere'):
            experiment = ExperimentConfig('thm1', surface='sphere:r=1')
        self.assertEqual(experiment.tol, 1e-5)
        self.assertEqual(experiment.out_dir, 'elsewhere')


class TestPrecedence(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.settings_path = os.path.join(self.tmp.name, 'lab.conf')
        with open(self.settings_path, 'w', encoding='utf-8') as handle:
            handle.write("# small spheres about the origin\n")
            handle.write("tol=1e-9\n")
            handle.write("radii=0.1:0.2:3\n")
            handle.write("n-theta=12\n")
            handle.write(f"out={self.tmp.name}\n")

    def tearDown(self):
        self.tmp.cleanup()

    @patch('app.run')
    def test_flags_override_settings_file(self, mock_run):
        mock_run.return_value = 0
        status = main([
            'small-sphere', '--chart', 'spaceform:k=1', '--config', self.settings_path, '--tol', '1e-7',
        ])
        self.assertEqual(status, 0)
        experiment = mock_run.call_args[0][0]
        self.assertEqual(experiment.kind, 'small-sphere')
        self.assertEqual(experiment.chart, 'spaceform:k=1')
        self.assertEqual(experiment.tol, 1e-7)
        self.assertEqual(len(experiment.radii), 3)
        self.assertAlmostEqual(experiment.radii[1], 0.15)
        self.assertEqual(experiment.n_theta, 12)
        self.assertEqual(experiment.out_dir, self.tmp.name)

    @patch('app.run')
    def test_global_flags_before_command(self, mock_run):
        mock_run.return_value = 0
        main(['--format', 'csv', '--html', 'thm1', '--surface', 'sphere:r=1', '--L', '12'])
        experiment = mock_run.call_args[0][0]
        self.assertEqual(experiment.output_format, 'csv')
        self.assertTrue(experiment.html)
        self.assertEqual(experiment.truncation, 12)

    @patch('app.run')
    def test_bad_setting_value(self, mock_run):
        with open(self.settings_path, 'a', encoding='utf-8') as handle:
            handle.write("threads=many\n")
        status = main(['thm1', '--surface', 'sphere:r=1', '--config', self.settings_path])
        self.assertEqual(status, 64)
        mock_run.assert_not_called()

    @patch('app.run')
    def test_missing_settings_file(self, mock_run):
        status = main(['thm1', '--surface', 'sphere:r=1', '--config', os.path.join(self.tmp.name, 'absent.conf')])
        self.assertEqual(status, 74)
        mock_run.assert_not_called()

    def test_usage_errors_exit_64(self):
        for argv in (['thm1'], ['no-such-command'], ['sweep', '--format', 'xml'], []):
            with self.assertRaises(SystemExit) as ctx:
                main(argv)
            self.assertEqual(ctx.exception.code, 64)

    @patch('app.run')
    def test_unknown_log_level(self, mock_run):
        status = main(['--log-level', 'chatty', 'thm1', '--surface', 'sphere:r=1'])
        self.assertEqual(status, 64)
        mock_run.assert_not_called()

    @patch('app.run')
    def test_invalid_process_settings(self, mock_run):
        with patch.object(config, 'THREADS', 0):
            status = main(['thm1', '--surface', 'sphere:r=1'])
        self.assertEqual(status, 64)
        mock_run.assert_not_called()


if __name__ == '__main__':
    unittest.main()
