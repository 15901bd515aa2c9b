"""JSON and CSV serialization of reports.

JSON keeps field order from the record types and writes floats in Python's
shortest round-trip form, so identical runs give identical bytes.  Non-finite
floats, which JSON lacks, are written as the strings ``"inf"``, ``"-inf"``
and ``"nan"``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def to_plain(obj):
    """Recursively convert a report into JSON-ready builtins."""
    if hasattr(obj, "to_dict") and callable(obj.to_dict):
        return to_plain(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_plain(asdict(obj))
    if isinstance(obj, Mapping):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def from_plain(obj):
    """Inverse of the non-finite float encoding used by :func:`to_plain`."""
    if isinstance(obj, dict):
        return {k: from_plain(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [from_plain(v) for v in obj]
    if isinstance(obj, str) and obj in _NONFINITE:
        return _NONFINITE[obj]
    return obj


def dumps(report) -> str:
    return json.dumps(to_plain(report), indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def loads(text: str, cls=None):
    """Parse JSON text; with ``cls`` rebuild the record via ``cls.from_dict``."""
    data = from_plain(json.loads(text))
    return data if cls is None else cls.from_dict(data)


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def write_table(stream, header: Sequence[str], rows: Iterable[Sequence]):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])


PROFILE_COLUMNS = ("r", "u", "du_dr", "residual")


def profile_csv(r, u, du, residual) -> str:
    buf = io.StringIO()
    write_table(buf, PROFILE_COLUMNS, zip(r, u, du, residual))
    return buf.getvalue()


def scalar_fields(report, prefix: str = "") -> dict:
    """Flatten the scalar entries of a report (nested dicts joined with ``.``)."""
    out = {}
    d = to_plain(report) if not isinstance(report, dict) else report
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            if "values" in v and "n_nodes" in v:
                continue  # sampled profiles belong in the CSV profile table
            out.update(scalar_fields(v, key + "."))
        elif isinstance(v, list):
            continue
        else:
            out[key] = from_plain(v)
    return out
