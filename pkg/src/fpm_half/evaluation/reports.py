"""CSV reports with self-describing headers."""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from ..exceptions import DataInconsistencyError
from .metrics import LineProfile

logger = logging.getLogger(__name__)


def _cell(value: Any) -> Any:
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_table(path: Path, fieldnames: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    """Write rows of named values; floats keep full precision."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames))
        writer.writeheader()
        count = 0
        for row in rows:
            writer.writerow({key: _cell(value) for key, value in row.items()})
            count += 1
    logger.debug("Wrote %d rows to %s", count, path)
    return path


def write_profiles(path: Path, profiles: Mapping[str, LineProfile | np.ndarray]) -> Path:
    """Write equal-length profiles as columns next to a ``position`` column.

    Raises:
        DataInconsistencyError: If the profiles differ in length
    """
    columns = {
        name: np.asarray(p.values if isinstance(p, LineProfile) else p, dtype=np.float64)
        for name, p in profiles.items()
    }
    lengths = {values.size for values in columns.values()}
    if len(lengths) > 1:
        raise DataInconsistencyError(f"Profiles differ in length: {sorted(lengths)}")
    length = lengths.pop() if lengths else 0

    rows = (
        {"position": k, **{name: values[k] for name, values in columns.items()}}
        for k in range(length)
    )
    return write_table(path, ["position", *columns], rows)
