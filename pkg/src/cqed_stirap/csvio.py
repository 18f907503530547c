"""CSV writing/reading with lossless plain-decimal floats."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np


def format_number(x) -> str:
    """Shortest positional decimal that round-trips to the same double (no exponent)."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return np.format_float_positional(x, unique=True, trim="0")


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else format_number(v) for v in row])


def read_csv(path):
    """Return ``(header, rows)``; cells that parse as numbers become floats."""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[_maybe_float(c) for c in row] for row in reader]
    return header, rows


def _maybe_float(cell):
    try:
        return float(cell)
    except ValueError:
        return cell
