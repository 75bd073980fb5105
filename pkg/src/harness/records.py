"""
Check records and asymptotic-expansion fits produced by the harness.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

HOLDS = 'holds'
EQUALITY = 'equality'
VIOLATED = 'violated'
INCONCLUSIVE = 'inconclusive'
# Input outside the check's hypotheses; ignored by the exit status.
NOT_APPLICABLE = 'not-applicable'

# An inequality record asserts lhs <= rhs; an agreement record asserts lhs == rhs.
INEQUALITY = 'inequality'
AGREEMENT = 'agreement'


@dataclass
class CheckRecord:
    """
    One quantitative check of an inequality or identity.

    Inequalities are oriented so that the claim reads lhs <= rhs and
    slack = rhs - lhs. Agreement records have slack = -|rhs - lhs|, so
    they can only come out as equality or violated.
    """
    theorem: str
    inputs: str
    lhs: float
    rhs: float
    tolerance: float
    provenance: Dict[str, str] = field(default_factory=dict)
    kind: str = INEQUALITY
    failure: Optional[str] = None
    extras: Dict[str, Any] = field(default_factory=dict)
    applicable: bool = True

    @classmethod
    def compare(
        cls,
        theorem: str,
        inputs: str,
        lhs: float,
        rhs: float,
        tol: float,
        provenance: Optional[Dict[str, str]] = None,
        kind: str = INEQUALITY,
        relative: bool = True,
        **extras,
    ) -> 'CheckRecord':
        """Build a record; a relative tolerance is scaled by max(|lhs|, |rhs|, 1e-300)."""
        lhs, rhs = float(lhs), float(rhs)
        tolerance = tol * max(abs(lhs), abs(rhs), 1e-300) if relative else tol
        record = cls(
            theorem=theorem, inputs=inputs, lhs=lhs, rhs=rhs, tolerance=float(tolerance),
            provenance=dict(provenance or {}), kind=kind, extras=dict(extras),
        )
        logger.debug(f"{theorem} on {inputs}: lhs={lhs:.12g} rhs={rhs:.12g} -> {record.verdict}")
        return record

    @classmethod
    def inconclusive(cls, theorem: str, inputs: str, reason: str, **extras) -> 'CheckRecord':
        return cls(
            theorem=theorem, inputs=inputs, lhs=float('nan'), rhs=float('nan'),
            tolerance=float('nan'), failure=reason, extras=dict(extras),
        )

    @classmethod
    def not_applicable(cls, theorem: str, inputs: str, reason: str, **extras) -> 'CheckRecord':
        return cls(
            theorem=theorem, inputs=inputs, lhs=float('nan'), rhs=float('nan'),
            tolerance=float('nan'), failure=reason, extras=dict(extras), applicable=False,
        )

    @property
    def slack(self) -> float:
        if self.kind == AGREEMENT:
            return -abs(self.rhs - self.lhs)
        return self.rhs - self.lhs

    @property
    def verdict(self) -> str:
        if not self.applicable:
            return NOT_APPLICABLE
        if self.failure is not None or not np.isfinite(self.slack):
            return INCONCLUSIVE
        if abs(self.slack) <= self.tolerance:
            return EQUALITY
        if self.slack < -self.tolerance:
            return VIOLATED
        return HOLDS

    @property
    def passed(self) -> bool:
        return self.verdict in (HOLDS, EQUALITY, NOT_APPLICABLE)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'theorem': self.theorem,
            'inputs': self.inputs,
            'kind': self.kind,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'slack': self.slack,
            'tolerance': self.tolerance,
            'verdict': self.verdict,
            'provenance': self.provenance,
            'failure': self.failure,
            'extras': _plain(self.extras),
        }


def _plain(value):
    """Convert numpy scalars/arrays inside nested containers to JSON types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def fit_powers(
    radii: np.ndarray,
    samples: np.ndarray,
    powers: Sequence[int],
) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Least-squares fit of samples against sum_k a_k r^powers[k].

    Columns are normalized before solving.

    Returns:
        (coefficients, standard errors, root-mean-square residual); the
        errors are nan when there are no spare degrees of freedom
    """
    radii = np.asarray(radii, dtype=float)
    samples = np.asarray(samples, dtype=float)
    design = np.column_stack([radii ** p for p in powers])
    scale = np.linalg.norm(design, axis=0)
    normalized = design / scale
    solution, _, rank, _ = np.linalg.lstsq(normalized, samples, rcond=None)
    if rank < len(powers):
        logger.warning(f"Rank-deficient expansion fit ({rank} of {len(powers)} columns)")
    residual = samples - normalized @ solution
    dof = radii.size - len(powers)
    if dof > 0:
        variance = float(residual @ residual) / dof
        covariance = variance * np.linalg.pinv(normalized.T @ normalized)
        errors = np.sqrt(np.abs(np.diag(covariance))) / scale
    else:
        errors = np.full(len(powers), np.nan)
    rms = float(np.sqrt(np.mean(residual ** 2)))
    return solution / scale, errors, rms


def empirical_order(radii: np.ndarray, remainder: np.ndarray) -> float:
    """Slope of log|remainder| against log r."""
    remainder = np.abs(np.asarray(remainder, dtype=float))
    radii = np.asarray(radii, dtype=float)
    usable = remainder > 0
    if np.count_nonzero(usable) < 2:
        return float('nan')
    slope, _ = np.polyfit(np.log(radii[usable]), np.log(remainder[usable]), 1)
    return float(slope)


@dataclass
class ExpansionFit:
    """Fit of an observable sampled at several radii against a power ansatz."""

    observable: str
    inputs: str
    radii: np.ndarray
    samples: np.ndarray
    powers: Tuple[int, ...]
    coefficients: np.ndarray
    uncertainties: np.ndarray
    residual: float
    targets: Dict[int, Tuple[float, str]] = field(default_factory=dict)
    extras: Dict[str, Any] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    checks: List[CheckRecord] = field(default_factory=list)
    related: Dict[str, 'ExpansionFit'] = field(default_factory=dict)

    @classmethod
    def fit(
        cls,
        observable: str,
        inputs: str,
        radii,
        samples,
        powers: Sequence[int],
        targets: Optional[Dict[int, Tuple[float, str]]] = None,
        **extras,
    ) -> 'ExpansionFit':
        radii = np.asarray(radii, dtype=float)
        samples = np.asarray(samples, dtype=float)
        if radii.size < len(powers):
            raise ValueError(f"{observable}: {radii.size} samples cannot fit {len(powers)} coefficients")
        coefficients, errors, residual = fit_powers(radii, samples, powers)
        logger.info(
            f"Fitted {observable} on {inputs}: "
            + ', '.join(f"r^{p}: {c:.8g}" for p, c in zip(powers, coefficients))
        )
        return cls(
            observable=observable, inputs=inputs, radii=radii, samples=samples,
            powers=tuple(powers), coefficients=coefficients, uncertainties=errors,
            residual=residual, targets=dict(targets or {}), extras=dict(extras),
        )

    def coefficient(self, power: int) -> float:
        return float(self.coefficients[self.powers.index(power)])

    def uncertainty(self, power: int) -> float:
        return float(self.uncertainties[self.powers.index(power)])

    def target_record(self, power: int, theorem: str, tol: float, relative: bool = True) -> CheckRecord:
        """Agreement of the fitted r^power coefficient with its target."""
        target, source = self.targets[power]
        record = CheckRecord.compare(
            theorem, f"{self.inputs}|{self.observable}|r^{power}",
            self.coefficient(power), target, tol,
            provenance={'lhs': f"least-squares fit of {self.observable}", 'rhs': source},
            kind=AGREEMENT,
            relative=relative and target != 0,
            uncertainty=self.uncertainty(power),
        )
        self.checks.append(record)
        return record

    def rows(self) -> List[list]:
        return [[r, s] for r, s in zip(self.radii.tolist(), self.samples.tolist())]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'observable': self.observable,
            'inputs': self.inputs,
            'radii': self.radii.tolist(),
            'samples': self.samples.tolist(),
            'coefficients': {str(p): c for p, c in zip(self.powers, self.coefficients.tolist())},
            'uncertainties': {str(p): e for p, e in zip(self.powers, self.uncertainties.tolist())},
            'residual': self.residual,
            'targets': {str(p): {'value': v, 'source': s} for p, (v, s) in self.targets.items()},
            'extras': _plain(self.extras),
            'failures': list(self.failures),
            'checks': [record.to_dict() for record in self.checks],
            'related': {name: fit.to_dict() for name, fit in self.related.items()},
        }
