"""CSV/JSON emitters with byte-stable output (17 significant digits, LF)."""
import io
import json
import math

import numpy as np


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def to_csv(header, rows) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def read_csv(text: str):
    """Parse text written by ``to_csv`` into (header, rows of strings)."""
    lines = [ln for ln in text.split("\n") if ln]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v} cannot be written as JSON")
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def to_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


AMPLITUDE_HEADER = ("n", "branch", "k_over_kappa", "re_r", "im_r", "re_t", "im_t", "defect")
PER_N_HEADER = ("n", "re_K", "im_K", "Delta", "delta_P")


def amplitude_csv(rows) -> str:
    return to_csv(AMPLITUDE_HEADER, rows)


def per_n_csv(report) -> str:
    return to_csv(PER_N_HEADER,
                  [(e.n, e.K.real, e.K.imag, e.Delta, e.delta_P) for e in report.per_n])
