"""
Static SVG plots.
"""
import logging
from pathlib import Path
from typing import Dict, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.services.artifacts import ArtifactWriter  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed element ids keep re-rendered SVGs byte-identical.
matplotlib.rcParams['svg.hashsalt'] = 'dirac-lab'


def line_plot(
    writer: ArtifactWriter,
    stem: str,
    x: Sequence[float],
    series: Dict[str, Sequence[float]],
    xlabel: str,
    ylabel: str,
    title: str = '',
    loglog: bool = False,
) -> Path:
    """Plot each named series against ``x`` and write ``<stem>.svg``."""
    x = np.asarray(x, dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name, values in series.items():
        values = np.asarray(values, dtype=float)
        if loglog:
            usable = (x > 0) & (np.abs(values) > 0) & np.isfinite(values)
            if not np.any(usable):
                logger.warning(f"{stem}: series {name} has nothing to draw on log axes")
                continue
            ax.loglog(x[usable], np.abs(values[usable]), marker='o', label=name)
        else:
            ax.plot(x, values, marker='o', label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    ax.grid(True, which='both', alpha=0.3)
    fig.tight_layout()
    try:
        return writer.write_svg(stem, fig)
    finally:
        plt.close(fig)
