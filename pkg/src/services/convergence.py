"""
Convergence tables with Richardson order estimates.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.services.artifacts import ArtifactWriter
from src.utils.errors import PreconditionError

logger = logging.getLogger(__name__)

CONVERGED = 'converged'
CONVERGED_FLOOR = 1e-14
MIN_LEVELS = 3

# 'h' levels are step sizes; 'L' levels are truncation degrees (spacing 1/L).
VARIABLES = ('h', 'L')

Order = Union[float, str, None]


@dataclass
class ConvergenceTable:
    label: str
    variable: str
    levels: List[float]
    values: List[float]
    differences: List[Optional[float]] = field(default_factory=list)
    orders: List[Order] = field(default_factory=list)

    @property
    def columns(self) -> List[str]:
        return [self.variable, 'value', 'difference', 'order']

    def rows(self) -> List[list]:
        return [
            [level, value, difference, order]
            for level, value, difference, order in zip(self.levels, self.values, self.differences, self.orders)
        ]

    @property
    def final_order(self) -> Order:
        return self.orders[-1] if self.orders else None


def _spacing(level: float, variable: str) -> float:
    return level if variable == 'h' else 1.0 / level


def richardson_orders(levels: Sequence[float], values: Sequence[float], variable: str = 'h') -> Tuple[list, list]:
    """
    Successive differences and the observed order of each refinement triple.

    For a value behaving like v* + C s^p in the spacing s, consecutive
    differences shrink by (s_i / s_{i+1})^p. A triple whose differences
    are at round-off level reports CONVERGED.

    Returns:
        (differences, orders), each aligned with ``levels``; the first
        difference and the first two orders are None
    """
    values = np.asarray(values, dtype=float)
    differences: List[Optional[float]] = [None]
    orders: List[Order] = [None, None][:len(values)]
    for i in range(1, len(values)):
        differences.append(float(abs(values[i] - values[i - 1])))

    for i in range(2, len(values)):
        coarse, fine = differences[i - 1], differences[i]
        floor = CONVERGED_FLOOR * max(1.0, float(np.max(np.abs(values[i - 2:i + 1]))))
        if min(coarse, fine) <= floor:
            orders.append(CONVERGED)
            continue
        ratio = _spacing(levels[i - 1], variable) / _spacing(levels[i], variable)
        orders.append(float(np.log(coarse / fine) / np.log(ratio)))
    return differences, orders


def build_convergence_table(series: Sequence[Tuple[float, float]], variable: str = 'h', label: str = '') -> ConvergenceTable:
    """
    Order the series from coarse to fine and estimate convergence orders.

    Raises:
        PreconditionError: fewer than three levels, repeated levels or an unknown variable
    """
    if variable not in VARIABLES:
        raise PreconditionError(f"Unknown resolution variable '{variable}' (expected one of {VARIABLES})")
    if len(series) < MIN_LEVELS:
        raise PreconditionError(
            f"Convergence table needs at least {MIN_LEVELS} resolution levels, got {len(series)}"
        )
    ordered = sorted(((float(level), float(value)) for level, value in series), reverse=variable == 'h')
    levels = [level for level, _ in ordered]
    if len(set(levels)) != len(levels):
        raise PreconditionError("Resolution levels must be distinct")
    if any(level <= 0 for level in levels):
        raise PreconditionError("Resolution levels must be positive")

    values = [value for _, value in ordered]
    differences, orders = richardson_orders(levels, values, variable)
    table = ConvergenceTable(label, variable, levels, values, differences, orders)
    logger.info(f"Convergence table {label or variable}: final order {table.final_order}")
    return table


def emit_convergence_table(
    series: Sequence[Tuple[float, float]],
    writer: ArtifactWriter,
    stem: str = 'convergence',
    variable: str = 'h',
    label: str = '',
    svg: bool = False,
) -> ConvergenceTable:
    """
    Write ``<stem>.csv`` with the Richardson orders and optionally a log-log
    plot of the successive differences as ``<stem>.svg``.
    """
    table = build_convergence_table(series, variable, label)
    writer.write_table(stem, table.columns, table.rows())
    if svg:
        from src.services.plots import line_plot

        line_plot(
            writer, stem, table.levels[1:], {'|difference|': table.differences[1:]},
            xlabel=variable, ylabel='successive difference', title=label, loglog=True,
        )
    return table
