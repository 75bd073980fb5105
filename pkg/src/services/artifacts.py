"""
Output artifacts: CSV tables, JSON reports, HTML summaries and SVG plots.

Every file carries the tool version and the experiment's config hash, and
is written to a temporary sibling that replaces the target in one step.
"""
import csv
import hashlib
import io
import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Union

import numpy as np

from src.harness.records import CheckRecord
from src.utils.errors import ArtifactError

logger = logging.getLogger(__name__)

TOOL_VERSION = "dirac-lab 1.0.0"

RECORD_COLUMNS = [
    'theorem', 'inputs', 'kind', 'lhs', 'rhs', 'slack', 'tolerance', 'verdict', 'failure',
]

PathLike = Union[str, Path]


def canonical_json(payload: Any) -> str:
    return json.dumps(json_ready(payload), sort_keys=True, separators=(',', ':'), allow_nan=False)


def config_digest(payload: Any) -> str:
    """sha256 of the canonical JSON form of ``payload``."""
    return hashlib.sha256(canonical_json(payload).encode('utf-8')).hexdigest()


def json_ready(value: Any) -> Any:
    """Numpy values to JSON types; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_ready(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def format_cell(value: Any) -> str:
    """Round-trippable text for one CSV cell."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def atomic_write_bytes(path: PathLike, data: bytes) -> Path:
    """Write ``data`` to ``path`` through a fsynced temporary file and os.replace."""
    path = Path(path)
    tmp = path.with_name(path.name + '.tmp')
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with tmp.open('wb') as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(str(tmp), str(path))
    except OSError as e:
        if tmp.exists():
            tmp.unlink()
        raise ArtifactError(f"Cannot write {path}: {e}") from e
    logger.debug(f"Wrote {path} ({len(data)} bytes)")
    return path


def atomic_write_text(path: PathLike, text: str) -> Path:
    return atomic_write_bytes(path, text.encode('utf-8'))


class ArtifactWriter:
    """
    Writes the artifacts of one experiment run into ``out_dir``.

    File names are ``<prefix>_<stem>.<suffix>``, or ``<stem>.<suffix>`` without a prefix.
    """

    def __init__(self, out_dir: PathLike, config_hash: str, output_format: str = 'json', prefix: str = ''):
        if output_format not in ('csv', 'json'):
            raise ValueError(f"Unknown output format '{output_format}'")
        self.out_dir = Path(out_dir)
        self.config_hash = config_hash
        self.output_format = output_format
        self.prefix = prefix
        self.written: List[Path] = []

    @property
    def header_lines(self) -> List[str]:
        return [f"version={TOOL_VERSION}", f"config_hash={self.config_hash}"]

    def path(self, stem: str, suffix: str) -> Path:
        name = f"{self.prefix}_{stem}" if self.prefix else stem
        return self.out_dir / f"{name}.{suffix}"

    def _record(self, path: Path) -> Path:
        self.written.append(path)
        logger.info(f"Wrote artifact {path}")
        return path

    def write_table(self, stem: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """CSV with ``#`` header lines, a column row and one row per item."""
        buffer = io.StringIO()
        for line in self.header_lines:
            buffer.write(f"# {line}\n")
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(cell) for cell in row])
        return self._record(atomic_write_text(self.path(stem, 'csv'), buffer.getvalue()))

    def write_json(self, stem: str, payload: Any) -> Path:
        document = {'version': TOOL_VERSION, 'config_hash': self.config_hash, 'data': json_ready(payload)}
        text = json.dumps(document, indent=2, sort_keys=True, allow_nan=False) + '\n'
        return self._record(atomic_write_text(self.path(stem, 'json'), text))

    def write_records(self, stem: str, records: Sequence[CheckRecord]) -> Path:
        """The check-record report in the configured format."""
        if self.output_format == 'json':
            return self.write_json(stem, [record.to_dict() for record in records])
        rows = []
        for record in records:
            data = record.to_dict()
            rows.append([data[column] for column in RECORD_COLUMNS])
        return self.write_table(stem, RECORD_COLUMNS, rows)

    def write_html(self, stem: str, html: str) -> Path:
        return self._record(atomic_write_text(self.path(stem, 'html'), html))

    def write_svg(self, stem: str, figure) -> Path:
        """Save a matplotlib figure as SVG without a timestamp."""
        buffer = io.BytesIO()
        figure.savefig(
            buffer,
            format='svg',
            metadata={'Date': None, 'Description': ' '.join(self.header_lines)},
        )
        return self._record(atomic_write_bytes(self.path(stem, 'svg'), buffer.getvalue()))


def read_table(path: PathLike) -> Optional[dict]:
    """Parse a table written by ArtifactWriter into header values, columns and rows."""
    path = Path(path)
    try:
        lines = path.read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise ArtifactError(f"Cannot read {path}: {e}") from e
    header = {}
    body = []
    for line in lines:
        if line.startswith('# '):
            key, _, value = line[2:].partition('=')
            header[key] = value
        else:
            body.append(line)
    parsed = list(csv.reader(body))
    if not parsed:
        return None
    return {'header': header, 'columns': parsed[0], 'rows': parsed[1:]}
