"""
Experiment configuration and execution for the command-line front end.
"""
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple
import logging
import threading

import numpy as np
from dotenv import dotenv_values

from config.settings import config
from src.ambient.charts import make_chart
from src.ambient.spheres import DEFAULT_STEPS, DEFAULT_THETA_NODES, geodesic_sphere
from src.flow.certificate import Theorem1Certificate, dirac_initial_data, theorem1_certificate
from src.flow.flow import DEFAULT_RESOLUTION, MASS_NORMALIZATION, MONOTONE_TOL, FlowTrajectory, run_flow
from src.geometry.shapes import make_surface
from src.geometry.uniformize import uniformize_axisymmetric
from src.harness.checks import check_bar_and_hijazi, check_dual_solver, check_eigenvalue_chain
from src.harness.expansions import (
    check_hmz_integral_improvement,
    check_hmz_pointwise,
    large_sphere_mass_recovery,
    sample_coordinate_spheres,
    sample_geodesic_spheres,
    small_sphere_area_fit,
    small_sphere_expansion,
)
from src.harness.hyperbolic import hyperbolic_checks, kappa_continuation
from src.harness.records import AGREEMENT, INCONCLUSIVE, VIOLATED, CheckRecord
from src.harness.sweeps import DEFAULT_COUNT, SYMMETRY_TOL, property_sweep
from src.services.artifacts import TOOL_VERSION, ArtifactWriter, config_digest
from src.services.convergence import MIN_LEVELS, emit_convergence_table
from src.services.plots import line_plot
from src.spectral.io import read_nodal_samples, spectrum_rows
from src.spectral.solver import DiracSpectrumResult, conformal_dirac_spectrum, spectrum_at_truncation
from src.templates.report_html import ReportTemplate
from src.utils.errors import ArtifactError, ConfigurationError, LabError, NumericalError
from src.utils.validators import (
    parse_descriptor,
    parse_float_list,
    validate_chart_descriptor,
    validate_radii,
    validate_shape_descriptor,
    validate_u0_descriptor,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_NUMERICAL = 2

KINDS = ('spectrum', 'thm1', 'large-sphere', 'small-sphere', 'shitam-flow', 'hyperbolic', 'sweep')
SURFACE_KINDS = ('thm1', 'shitam-flow', 'hyperbolic')
CHART_KINDS = ('large-sphere', 'small-sphere')

DEFAULT_RADII = {
    'small-sphere': '0.05:0.3:12',
    'large-sphere': '50,100,200,400',
}

RESIDUAL_TOL = 1e-4
FLOW_MASS_TOL = 1e-4
CHAIN_THEOREMS = ('bar-hijazi', 'thm1.1', 'cauchy-schwarz', 'bar', 'minkowski', 'dual-solver')

# Fields that only decide where and how results are written; they do not enter the config hash.
OUTPUT_FIELDS = ('out_dir', 'output_format', 'html', 'plot')

_SETTINGS_LOCK = threading.RLock()


def _text(value: Any) -> str:
    return str(value).strip()


def _flag(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off', ''):
        return False
    raise ValueError(f"expected a boolean, got '{value}'")


def _point(value: Any) -> Tuple[float, ...]:
    values = parse_float_list(value) if isinstance(value, str) else [float(v) for v in value]
    return tuple(values)


def _radii(value: Any) -> List[float]:
    return parse_float_list(value) if isinstance(value, str) else [float(v) for v in value]


FIELD_CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    'surface': _text,
    'chart': _text,
    'samples': _text,
    'point': _point,
    'radii': _radii,
    'u0': _text,
    'rho_max': float,
    'resolution': int,
    'truncation': int,
    'n_theta': int,
    'n_steps': int,
    'kappa_limit': float,
    'count': int,
    'tol': float,
    'threads': int,
    'seed': int,
    'out_dir': _text,
    'output_format': _text,
    'html': _flag,
    'plot': _flag,
}

FIELD_ALIASES = {
    'out': 'out_dir',
    'format': 'output_format',
    'l': 'truncation',
}


@dataclass
class ExperimentConfig:
    """
    One experiment: its kind, input descriptors, numerical parameters and outputs.

    Defaults for tolerances, threads, seed and outputs come from the process
    settings (environment / .env).
    """

    kind: str
    surface: Optional[str] = None
    chart: Optional[str] = None
    samples: Optional[str] = None
    point: Tuple[float, ...] = (0.0, 0.0, 0.0)
    radii: List[float] = field(default_factory=list)
    u0: str = 'dirac'
    rho_max: Optional[float] = None
    resolution: int = DEFAULT_RESOLUTION
    truncation: Optional[int] = None
    n_theta: int = DEFAULT_THETA_NODES
    n_steps: int = DEFAULT_STEPS
    kappa_limit: Optional[float] = None
    count: int = DEFAULT_COUNT
    tol: float = field(default_factory=lambda: config.EQUALITY_TOL)
    threads: int = field(default_factory=lambda: config.THREADS)
    seed: int = field(default_factory=lambda: config.SEED)
    out_dir: str = field(default_factory=lambda: config.OUTPUT_DIR)
    output_format: str = field(default_factory=lambda: config.OUTPUT_FORMAT)
    html: bool = False
    plot: bool = False

    def __post_init__(self):
        self.point = tuple(float(v) for v in self.point)
        self.radii = [float(r) for r in self.radii]
        if not self.radii and self.kind in DEFAULT_RADII:
            self.radii = parse_float_list(DEFAULT_RADII[self.kind])

    @classmethod
    def from_mapping(cls, kind: str, values: Mapping[str, Any]) -> 'ExperimentConfig':
        """
        Build a config from string or typed settings (config file, flags).

        Keys may use dashes or underscores; ``out``, ``format`` and ``L`` are
        accepted for ``out_dir``, ``output_format`` and ``truncation``. None
        values are skipped so that unset flags keep the lower layer's value.

        Raises:
            ConfigurationError: unknown keys or unconvertible values
        """
        kwargs: Dict[str, Any] = {}
        errors = []
        for raw_key, raw_value in values.items():
            if raw_value is None:
                continue
            key = raw_key.strip().lower().replace('-', '_')
            key = FIELD_ALIASES.get(key, key)
            converter = FIELD_CONVERTERS.get(key)
            if converter is None:
                errors.append(f"Unknown setting '{raw_key}'")
                continue
            try:
                kwargs[key] = converter(raw_value)
            except (TypeError, ValueError, ConfigurationError) as e:
                errors.append(f"Setting '{raw_key}': {e}")
        if errors:
            raise ConfigurationError("Invalid experiment settings", errors)
        return cls(kind=kind, **kwargs)

    def validate(self) -> List[str]:
        """Validate the experiment and return list of errors."""
        errors = []
        kind = self.kind
        if kind not in KINDS:
            return [f"Unknown experiment '{kind}' (expected one of: {', '.join(KINDS)})"]

        if kind == 'spectrum':
            if bool(self.surface) == bool(self.samples):
                errors.append("spectrum needs exactly one of surface or samples")
        elif kind in SURFACE_KINDS and not self.surface:
            errors.append(f"{kind} needs a surface descriptor")
        if kind in CHART_KINDS and not self.chart:
            errors.append(f"{kind} needs a chart descriptor")

        if self.surface:
            surface_errors = validate_shape_descriptor(self.surface)
            errors.extend(surface_errors)
            if not surface_errors:
                hyperbolic = parse_descriptor(self.surface)[0].startswith('hyp-')
                if kind == 'hyperbolic' and not hyperbolic:
                    errors.append("hyperbolic needs a hyp-geodesic-sphere or hyp-ellipsoid surface")
                if kind in ('thm1', 'shitam-flow') and hyperbolic:
                    errors.append(f"{kind} needs a Euclidean surface")
        if self.chart:
            chart_errors = validate_chart_descriptor(self.chart)
            errors.extend(chart_errors)
            if not chart_errors and kind == 'large-sphere' and parse_descriptor(self.chart)[0] == 'spaceform':
                errors.append("large-sphere needs an asymptotically flat chart")

        if kind in CHART_KINDS:
            errors.extend(validate_radii(self.radii, minimum=3))
        if kind == 'shitam-flow':
            errors.extend(validate_u0_descriptor(self.u0))
        if len(self.point) != 3 or not np.all(np.isfinite(self.point)):
            errors.append("point must have three finite coordinates")
        if self.rho_max is not None and not self.rho_max > 0:
            errors.append("rho_max must be positive")
        if self.resolution < 4:
            errors.append("resolution must be at least 4")
        if self.truncation is not None and self.truncation < 1:
            errors.append("truncation must be at least 1")
        if self.n_theta < 4:
            errors.append("n_theta must be at least 4")
        if self.n_steps < 1:
            errors.append("n_steps must be at least 1")
        if self.kappa_limit is not None:
            if kind != 'hyperbolic':
                errors.append("kappa_limit applies to the hyperbolic experiment only")
            elif not self.kappa_limit > 0:
                errors.append("kappa_limit must be positive")
        if self.count < 1:
            errors.append("count must be at least 1")
        if not self.tol > 0:
            errors.append("tol must be positive")
        if self.threads < 1:
            errors.append("threads must be at least 1")
        if self.output_format not in ('csv', 'json'):
            errors.append("format must be 'csv' or 'json'")

        return errors

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def config_hash(self) -> str:
        """sha256 of every setting except the output ones."""
        settings = {key: value for key, value in self.to_dict().items() if key not in OUTPUT_FIELDS}
        return config_digest(settings)


def load_settings_file(path: str) -> Dict[str, Optional[str]]:
    """
    Read a plain-text ``key=value`` settings file.

    Raises:
        ArtifactError: the file cannot be read
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            values = dotenv_values(stream=handle)
    except OSError as e:
        raise ArtifactError(f"Cannot read settings file {path}: {e}") from e
    logger.info(f"Loaded {len(values)} settings from {path}")
    return dict(values)


@contextmanager
def settings_override(**values):
    """
    Temporarily replace process settings read by the numerical modules.

    The settings object is process-wide, so overrides from different threads
    are serialized on a lock; worker threads started inside the block see the
    overridden values.
    """
    with _SETTINGS_LOCK:
        previous = {key: getattr(config, key) for key in values}
        for key, value in values.items():
            setattr(config, key, value)
        try:
            yield config
        finally:
            for key, value in previous.items():
                setattr(config, key, value)


def exit_status(records: List[CheckRecord]) -> int:
    """1 when any record is violated, else 2 when any is inconclusive, else 0; not-applicable records are ignored."""
    verdicts = {record.verdict for record in records}
    if VIOLATED in verdicts:
        return EXIT_VIOLATION
    if INCONCLUSIVE in verdicts:
        return EXIT_NUMERICAL
    return EXIT_OK


def _truncation_series(metric, spectrum: DiracSpectrumResult) -> List[Tuple[int, float]]:
    """Accepted truncation history, padded with coarser degrees up to MIN_LEVELS entries."""
    series = list(spectrum.history)
    degree = series[0][0]
    while len(series) < MIN_LEVELS and degree - config.TRUNCATION_STEP >= 1:
        degree -= config.TRUNCATION_STEP
        values = spectrum_at_truncation(metric, degree)
        series.insert(0, (degree, float(np.min(np.abs(values)))))
    return series


def _emit_truncation_table(metric, spectrum: DiracSpectrumResult, writer: ArtifactWriter, svg: bool):
    series = _truncation_series(metric, spectrum)
    if len(series) < MIN_LEVELS:
        logger.info(f"{metric.label}: only {len(series)} truncation levels, convergence table skipped")
        return None
    return emit_convergence_table(series, writer, 'truncation_convergence', 'L', metric.label, svg)


def _symmetry_record(spectrum: DiracSpectrumResult) -> CheckRecord:
    scale = max(1.0, float(np.max(np.abs(spectrum.eigenvalues))))
    return CheckRecord.compare(
        'spectral-symmetry', spectrum.metric_label, spectrum.symmetry_defect, 0.0, SYMMETRY_TOL * scale,
        provenance={'lhs': 'DiracSpectrumResult.symmetry_defect', 'rhs': 'symmetry'},
        kind=AGREEMENT, relative=False,
    )


def run_spectrum(experiment: ExperimentConfig, writer: ArtifactWriter) -> List[CheckRecord]:
    """Spectrum of a surface's induced metric or of a nodal-sample file."""
    if experiment.samples:
        metric = read_nodal_samples(experiment.samples)
        subject = metric
    else:
        surface = make_surface(experiment.surface)
        metric = uniformize_axisymmetric(surface).metric
        subject = metric if surface.is_hyperbolic else surface

    spectrum = conformal_dirac_spectrum(metric)
    writer.write_table('spectrum', ['index', 'eigenvalue'], spectrum_rows(spectrum))
    writer.write_json('spectrum_summary', spectrum.to_dict())
    _emit_truncation_table(metric, spectrum, writer, experiment.plot)

    records = list(check_bar_and_hijazi(subject, spectrum, experiment.tol))
    records.append(_symmetry_record(spectrum))
    records.append(check_dual_solver(metric, spectrum))
    return records


def run_thm1(experiment: ExperimentConfig, writer: ArtifactWriter) -> List[CheckRecord]:
    """Eigenvalue chain, Bar and Minkowski records on a convex Euclidean surface."""
    surface = make_surface(experiment.surface)
    metric = uniformize_axisymmetric(surface).metric
    try:
        spectrum = conformal_dirac_spectrum(metric)
    except NumericalError as e:
        logger.error(f"Spectrum of {surface.label} failed: {e}", exc_info=True)
        return [CheckRecord.inconclusive(name, surface.label, str(e)) for name in CHAIN_THEOREMS]

    writer.write_json('spectrum_summary', {
        **spectrum.to_dict(),
        'area': surface.area,
        'total_mean_curvature': surface.total_mean_curvature,
    })
    records = check_eigenvalue_chain(surface, experiment.tol, spectrum)
    records.append(check_dual_solver(metric, spectrum))
    return records


def run_large_sphere(experiment: ExperimentConfig, writer: ArtifactWriter) -> List[CheckRecord]:
    """Mass recovery and the integral and pointwise bounds on large coordinate spheres."""
    chart = make_chart(experiment.chart)
    series = sample_coordinate_spheres(chart, experiment.radii, experiment.n_theta)
    fit = large_sphere_mass_recovery(chart, experiment.radii, experiment.n_theta, series=series)
    hmz = check_hmz_integral_improvement(chart, experiment.radii, experiment.tol, experiment.n_theta, series=series)
    pointwise = check_hmz_pointwise(chart, experiment.radii, experiment.tol, experiment.n_theta, series=series)

    r = series.array('radii')
    estimates = series.mass_defect / (4.0 * np.pi)
    writer.write_table(
        'spheres',
        ['radius', 'lambda1', 'area', 'total_mean_curvature', 'beta', 'mass_estimate'],
        zip(r, series.lambda1, series.area, series.total_mean_curvature, series.beta, estimates),
    )
    writer.write_json('fit', fit.to_dict())
    if experiment.plot and r.size:
        line_plot(
            writer, 'mass_estimates', r,
            {'m_est': estimates, 'r^2 (1/r - lambda1)': r ** 2 * (1.0 / r - series.array('lambda1'))},
            xlabel='r', ylabel='mass estimate', title=chart.label,
        )
    return fit.checks + [hmz, pointwise]


def _step_convergence(experiment: ExperimentConfig, chart, writer: ArtifactWriter):
    """Area of the largest geodesic sphere under step halving."""
    radius = experiment.radii[-1]
    levels = [experiment.n_steps // 4, experiment.n_steps // 2, experiment.n_steps]
    if levels[0] < 1:
        logger.info(f"n_steps={experiment.n_steps} too small for a step-halving table")
        return None
    series = [
        (radius / steps, geodesic_sphere(chart, experiment.point, radius, n_theta=experiment.n_theta, n_steps=steps).area)
        for steps in levels
    ]
    return emit_convergence_table(series, writer, 'step_convergence', 'h', f"{chart.label} r={radius:g}", experiment.plot)


def run_small_sphere(experiment: ExperimentConfig, writer: ArtifactWriter) -> List[CheckRecord]:
    """Eigenvalue and area expansions of small geodesic spheres."""
    chart = make_chart(experiment.chart)
    series = sample_geodesic_spheres(chart, experiment.point, experiment.radii, experiment.n_theta, experiment.n_steps)
    fit = small_sphere_expansion(
        chart, experiment.point, experiment.radii, experiment.n_theta, experiment.n_steps, series=series,
    )
    area = small_sphere_area_fit(
        chart, experiment.point, experiment.radii, experiment.n_theta, experiment.n_steps, series=series,
    )

    r = series.array('radii')
    writer.write_table(
        'spheres',
        ['radius', 'lambda1', 'area', 'total_mean_curvature', 'mass_defect'],
        zip(r, series.lambda1, series.area, series.total_mean_curvature, series.mass_defect),
    )
    writer.write_json('fit', {'lambda1': fit.to_dict(), 'area': area.to_dict()})
    _step_convergence(experiment, chart, writer)
    if experiment.plot:
        line_plot(
            writer, 'remainder', r, {'lambda1 - 1/r': series.array('lambda1') - 1.0 / r},
            xlabel='r', ylabel='lambda1 - 1/r', title=chart.label, loglog=True,
        )
    return fit.checks + area.checks


def _flow_records(trajectory: FlowTrajectory, tol: float) -> List[CheckRecord]:
    label = trajectory.label
    q = trajectory.monotone_quantities
    increase = float(np.max(np.diff(q))) if q.size > 1 else 0.0
    residuals = [s.residual for s in trajectory.states if np.isfinite(s.residual)]
    records = [
        CheckRecord.compare(
            'flow-monotone', label, increase, 0.0, MONOTONE_TOL * max(1.0, float(np.max(np.abs(q)))),
            provenance={'lhs': 'largest step change of Q(rho)', 'rhs': 'nonincreasing'},
            relative=False,
        ),
        CheckRecord.compare(
            'flow-mass-bound', label, MASS_NORMALIZATION * trajectory.mass, float(q[-1]),
            tol * max(1.0, abs(float(q[0]))),
            provenance={'lhs': '8 pi x tail-fitted mass', 'rhs': 'Q(rho_max)'},
            relative=False,
        ),
    ]
    if residuals:
        records.append(CheckRecord.compare(
            'flow-residual', label, max(residuals), RESIDUAL_TOL, 0.0,
            provenance={'lhs': 'flow.derive_pde_residual', 'rhs': 'residual tolerance'},
            relative=False,
        ))
    else:
        records.append(CheckRecord.inconclusive('flow-residual', label, 'no residual checkpoints recorded'))
    return records


def _certificate_records(certificate: Theorem1Certificate, tol: float) -> List[CheckRecord]:
    label = certificate.label
    scale = max(1.0, abs(certificate.total_mean_curvature))
    return [
        CheckRecord.compare(
            'thm1.1-certificate', label, certificate.thm1_lhs, certificate.thm1_rhs, tol,
            provenance={'lhs': 'spectral.conformal_dirac_spectrum', 'rhs': 'int H0 / (2 |Sigma|)'},
        ),
        CheckRecord.compare(
            'certificate-Q0', label, certificate.Q0,
            certificate.total_mean_curvature - 2.0 * certificate.lambda1 * certificate.area,
            tol * scale,
            provenance={'lhs': 'Q(0) of the flow', 'rhs': 'int H0 - 2 lambda1 |Sigma|'},
            kind=AGREEMENT, relative=False,
        ),
        CheckRecord.compare(
            'certificate-mass-bound', label, MASS_NORMALIZATION * certificate.mass, certificate.Q0, tol * scale,
            provenance={'lhs': '8 pi x mass', 'rhs': 'Q(0)'},
            relative=False,
        ),
        CheckRecord.compare(
            'certificate-mass-nonnegative', label, 0.0, certificate.mass, tol,
            provenance={'lhs': 'zero', 'rhs': 'tail-fitted mass'},
            relative=False,
        ),
    ]


def _schwarzschild_record(experiment: ExperimentConfig, trajectory: FlowTrajectory) -> Optional[CheckRecord]:
    """Round base with constant data: the extension is Schwarzschild with m = r/2 (1 - 1/u0^2)."""
    shape, params = parse_descriptor(experiment.surface)
    u0_kind, _, value = experiment.u0.partition(':')
    if shape != 'sphere' or u0_kind != 'const':
        return None
    radius, u0 = float(params['r']), float(value)
    expected = 0.5 * radius * (1.0 - 1.0 / u0 ** 2)
    return CheckRecord.compare(
        'flow-schwarzschild', trajectory.label, trajectory.mass, expected, FLOW_MASS_TOL,
        provenance={'lhs': 'tail-fitted mass', 'rhs': 'r/2 (1 - 1/u0^2)'},
        kind=AGREEMENT, relative=False,
    )


def run_shitam_flow(experiment: ExperimentConfig, writer: ArtifactWriter) -> List[CheckRecord]:
    """Quasi-spherical extension of a convex surface; with u0=dirac also the eigenvalue certificate."""
    surface = make_surface(experiment.surface)
    u0_kind, _, value = experiment.u0.partition(':')
    spectrum = None
    if u0_kind == 'dirac':
        spectrum = conformal_dirac_spectrum(uniformize_axisymmetric(surface).metric)
        u0 = dirac_initial_data(surface, spectrum.lambda1)
    else:
        u0 = float(value)

    trajectory = run_flow(surface, u0, experiment.rho_max, experiment.resolution)
    writer.write_table('trajectory', ['rho', 'min_u', 'max_u', 'Q', 'residual'], trajectory.rows())
    writer.write_json('flow_summary', trajectory.to_dict())
    if experiment.plot:
        line_plot(
            writer, 'monotone_quantity', trajectory.rho, {'Q': trajectory.monotone_quantities},
            xlabel='rho', ylabel='Q(rho)', title=trajectory.label,
        )

    records = _flow_records(trajectory, experiment.tol)
    schwarzschild = _schwarzschild_record(experiment, trajectory)
    if schwarzschild is not None:
        records.append(schwarzschild)
    if spectrum is not None:
        certificate = theorem1_certificate(surface, spectrum, trajectory, experiment.tol)
        writer.write_json('certificate', certificate.to_dict())
        records.extend(_certificate_records(certificate, experiment.tol))
    return records


def run_hyperbolic(experiment: ExperimentConfig, writer: ArtifactWriter) -> List[CheckRecord]:
    """Hyperbolic eigenvalue records and, with kappa_limit, the flat-limit comparison."""
    surface = make_surface(experiment.surface)
    records = hyperbolic_checks(surface, tol=experiment.tol)
    if experiment.kappa_limit is not None:
        shape, params = parse_descriptor(experiment.surface)
        if shape == 'hyp-geodesic-sphere':
            a = c = float(params['r'])
        else:
            a, c = float(params['a']), float(params['c'])
        records.extend(kappa_continuation(a, c, experiment.kappa_limit, experiment.tol))
    writer.write_json('weights', {
        'surface': surface.label,
        'kappa': surface.kappa,
        'area': surface.area,
        'lambda_pm': next((r.extras.get('lambda_pm') for r in records if r.theorem == 'thm1.7'), None),
    })
    return records


def run_sweep(experiment: ExperimentConfig, writer: ArtifactWriter) -> List[CheckRecord]:
    """Randomized property sweep over axisymmetric bump metrics."""
    return property_sweep(experiment.count, experiment.seed, experiment.truncation, experiment.threads)


EXPERIMENTS: Dict[str, Callable[[ExperimentConfig, ArtifactWriter], List[CheckRecord]]] = {
    'spectrum': run_spectrum,
    'thm1': run_thm1,
    'large-sphere': run_large_sphere,
    'small-sphere': run_small_sphere,
    'shitam-flow': run_shitam_flow,
    'hyperbolic': run_hyperbolic,
    'sweep': run_sweep,
}


def _overrides(experiment: ExperimentConfig) -> Dict[str, Any]:
    values: Dict[str, Any] = {'THREADS': experiment.threads, 'SEED': experiment.seed}
    if experiment.truncation is not None and experiment.kind != 'sweep':
        values['DEFAULT_TRUNCATION'] = experiment.truncation
        values['MAX_TRUNCATION'] = max(config.MAX_TRUNCATION, experiment.truncation)
    return values


def run(experiment: ExperimentConfig) -> int:
    """
    Validate, execute and report one experiment.

    Args:
        experiment: Experiment configuration

    Returns:
        Exit status: 0 all records hold, 1 a record is violated, 2 numerical
        failure, 64 invalid configuration, 74 input/output failure
    """
    errors = experiment.validate()
    if errors:
        logger.error(f"Validation errors: {errors}")
        return ConfigurationError.exit_code

    config_hash = experiment.config_hash()
    writer = ArtifactWriter(experiment.out_dir, config_hash, experiment.output_format, prefix=experiment.kind)
    logger.info(f"Running {experiment.kind} (config {config_hash[:12]})")

    try:
        with settings_override(**_overrides(experiment)):
            records = EXPERIMENTS[experiment.kind](experiment, writer)
        writer.write_json('config', experiment.to_dict())
        writer.write_records('records', records)
        if experiment.html:
            data = ReportTemplate.summary_data(
                records, experiment.kind, TOOL_VERSION, config_hash, experiment.to_dict(),
            )
            writer.write_html('report', ReportTemplate.generate_report(data))
    except LabError as e:
        logger.error(f"Experiment {experiment.kind} failed: {e}", exc_info=True)
        return e.exit_code

    status = exit_status(records)
    failed = [f"{r.theorem}={r.verdict}" for r in records if not r.passed]
    logger.info(
        f"{experiment.kind} finished with status {status}: {len(records) - len(failed)} of {len(records)} records passed"
        + (f" ({', '.join(failed)})" if failed else "")
    )
    return status
