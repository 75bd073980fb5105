"""
Command-line entry point for the Dirac eigenvalue laboratory.
"""
from dotenv import load_dotenv
load_dotenv()

import argparse
import logging
import sys
from typing import List, Optional

from config.settings import config
from src.handlers.experiments import ExperimentConfig, load_settings_file, run
from src.utils.errors import ConfigurationError, LabError
from src.utils.logger import setup_logging

logger = logging.getLogger(__name__)

USAGE_EXIT = ConfigurationError.exit_code


class LabArgumentParser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit status 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _add_global_flags(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS leaves unset flags out of the namespace so lower layers keep their values.
    suppress = argparse.SUPPRESS
    parser.add_argument('--out', default=suppress, metavar='DIR', help='Output directory')
    parser.add_argument('--format', default=suppress, choices=('csv', 'json'), help='Record report format')
    parser.add_argument('--tol', default=suppress, help='Relative equality tolerance')
    parser.add_argument('--threads', default=suppress, help='Concurrent workers')
    parser.add_argument('--seed', default=suppress, help='Seed of randomized sweeps')
    parser.add_argument('--config', default=suppress, metavar='PATH', help='key=value settings file')
    parser.add_argument('--html', default=suppress, action='store_true', help='Also write an HTML summary')
    parser.add_argument('--plot', default=suppress, action='store_true', help='Also write SVG plots')
    parser.add_argument('--log-level', default=suppress, help='DEBUG, INFO, WARNING or ERROR')


def build_parser() -> argparse.ArgumentParser:
    suppress = argparse.SUPPRESS
    parser = LabArgumentParser(
        prog='app.py',
        description='Dirac eigenvalue and total mean curvature experiments',
    )
    _add_global_flags(parser)
    commands = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        _add_global_flags(sub)
        sub.add_argument('--L', dest='truncation', default=suppress, help='Starting truncation degree')
        return sub

    spectrum = command('spectrum', 'Dirac spectrum of a surface or a conformal factor file')
    source = spectrum.add_mutually_exclusive_group(required=True)
    source.add_argument('--surface', default=suppress, help='Shape descriptor, e.g. ellipsoid:a=1,c=1.2')
    source.add_argument('--samples', default=suppress, metavar='PATH', help='Nodal-sample file of u')

    thm1 = command('thm1', 'Eigenvalue bounds on a convex Euclidean surface')
    thm1.add_argument('--surface', required=True, help='Shape descriptor')

    for name, help_text in (
        ('large-sphere', 'Mass recovery on large coordinate spheres'),
        ('small-sphere', 'Expansions on small geodesic spheres'),
    ):
        sub = command(name, help_text)
        sub.add_argument('--chart', required=True, help='Chart descriptor, e.g. schwarzschild:m=1')
        sub.add_argument('--radii', default=suppress, help='start:stop:count or a comma list')
        sub.add_argument('--n-theta', default=suppress, help='Polar nodes per sphere')
        if name == 'small-sphere':
            sub.add_argument('--point', default=suppress, help='Center as x,y,z')
            sub.add_argument('--n-steps', default=suppress, help='RK4 steps per geodesic')

    flow = command('shitam-flow', 'Quasi-spherical extension and mass of a convex surface')
    flow.add_argument('--surface', required=True, help='Shape descriptor')
    flow.add_argument('--u0', default=suppress, help='const:<value> or dirac')
    flow.add_argument('--rho-max', default=suppress, help='Final offset')
    flow.add_argument('--resolution', default=suppress, help='Collocation degree')

    hyperbolic = command('hyperbolic', 'Eigenvalue bounds for surfaces in hyperbolic space')
    hyperbolic.add_argument('--surface', required=True, help='hyp-geodesic-sphere or hyp-ellipsoid descriptor')
    hyperbolic.add_argument('--kappa-limit', default=suppress, help='Compare with the flat surface at this kappa')

    sweep = command('sweep', 'Randomized property sweep over bump metrics')
    sweep.add_argument('--count', default=suppress, help='Number of random metrics')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, merge settings and run one experiment.

    Settings precedence: built-in defaults < environment / .env < --config
    file < command-line flags.
    """
    args = vars(build_parser().parse_args(argv))
    kind = args.pop('command')
    settings_path = args.pop('config', None)
    try:
        setup_logging(args.pop('log_level', config.LOG_LEVEL))
    except ConfigurationError as e:
        print(f"app.py: error: {e}", file=sys.stderr)
        return e.exit_code

    config_errors = config.validate()
    if config_errors:
        logger.error(f"Configuration errors: {config_errors}")
        return USAGE_EXIT

    try:
        settings = load_settings_file(settings_path) if settings_path else {}
        settings.update(args)
        experiment = ExperimentConfig.from_mapping(kind, settings)
    except LabError as e:
        logger.error(f"Cannot build experiment: {e}", exc_info=True)
        return e.exit_code

    return run(experiment)


if __name__ == '__main__':
    sys.exit(main())
