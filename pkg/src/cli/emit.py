"""
Serialisation of result tables

CSV artifacts start with a single `# metadata: {...}` line followed by the
table; JSON artifacts are `{"metadata": {...}, "rows": [...]}`. Floats are
written at 6 significant digits in both formats, NaN as empty / null.
"""

import json
import logging
import math
import os
import sys
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from src import __version__

logger = logging.getLogger(__name__)

LIBRARY = "gpd-calibration"
FORMATS = ("csv", "json")
FLOAT_FORMAT = "%.6g"
METADATA_PREFIX = "# metadata: "


def build_metadata(subcommand: str, seed: int, options: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "library": LIBRARY,
        "version": __version__,
        "subcommand": subcommand,
        "seed": seed,
        "options": options,
    }


def _plain(value):
    """JSON-safe scalar rounded to 6 significant digits."""
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(f"{value:.6g}")
    return value


def render(table: pd.DataFrame, fmt: str, metadata: Dict[str, Any]) -> str:
    if fmt == "csv":
        header = METADATA_PREFIX + json.dumps(metadata, sort_keys=True, default=str)
        body = table.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return header + "\n" + body
    if fmt == "json":
        rows = [{k: _plain(v) for k, v in record.items()} for record in table.to_dict(orient="records")]
        return json.dumps({"metadata": metadata, "rows": rows}, indent=2, sort_keys=False, default=str) + "\n"
    raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")


def emit(table: pd.DataFrame, fmt: str, metadata: Dict[str, Any], output: Optional[str] = None) -> str:
    """Render the table and write it to `output`, or stdout when omitted."""
    text = render(table, fmt, metadata)
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        os.makedirs(os.path.dirname(output) or ".", exist_ok=True)
        with open(output, "w", newline="") as f:
            f.write(text)
        logger.info("Wrote %d rows to %s", len(table), output)
    return text


def read_artifact(path: str):
    """Parse an emitted artifact back into (table, metadata)."""
    with open(path) as f:
        first = f.readline()
    if first.startswith(METADATA_PREFIX):
        metadata = json.loads(first[len(METADATA_PREFIX):])
        return pd.read_csv(path, skiprows=1), metadata
    with open(path) as f:
        payload = json.load(f)
    return pd.DataFrame(payload["rows"]), payload["metadata"]


def load_column(path: str) -> np.ndarray:
    """Numeric series from a CSV file.

    Uses the `price` column when present, else the last column. A file
    whose first line is a number is read as a headerless single column.
    """
    frame = pd.read_csv(path)
    if _looks_numeric(frame.columns[-1]):
        frame = pd.read_csv(path, header=None)
    columns = {str(c).strip().lower(): c for c in frame.columns}
    column = columns.get("price", frame.columns[-1])
    values = pd.to_numeric(frame[column], errors="raise").to_numpy(dtype=float)
    logger.info("Loaded %d values from %s (column %s)", values.size, path, column)
    return values


def _looks_numeric(label) -> bool:
    try:
        float(str(label))
    except ValueError:
        return False
    return True
