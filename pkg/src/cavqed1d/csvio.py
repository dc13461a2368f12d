"""CSV persistence: header comment line + column header + rows.

Every data file starts with a single '# key=value ...' comment recording
the run configuration hash and normalization conventions, followed by a
plain CSV header and rows. Bodies are deterministic for identical
configurations (fixed float formatting, no timestamps).
"""

import numpy as np

FLOAT_FMT = "%.12g"


def write_csv(path, columns, rows, meta=None):
    with open(path, "w") as fh:
        if meta:
            pairs = " ".join(f"{k}={v}" for k, v in meta.items())
            fh.write(f"# {pairs}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return FLOAT_FMT % float(value)


def read_csv(path):
    """(meta dict, column list, list of string rows) of a package CSV."""
    meta = {}
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    start = 0
    if lines and lines[0].startswith("#"):
        for pair in lines[0][1:].strip().split():
            if "=" in pair:
                k, v = pair.split("=", 1)
                meta[k] = v
        start = 1
    columns = lines[start].split(",") if len(lines) > start else []
    rows = [ln.split(",") for ln in lines[start + 1 :] if ln]
    return meta, columns, rows
