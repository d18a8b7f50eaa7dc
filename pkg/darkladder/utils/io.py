#!/usr/bin/env python3

"""Result files: versioned CSV, JSON-lines trajectory records, summary.txt."""

import json
import logging
import os
import tempfile

import numpy as np

logger = logging.getLogger(__name__)

CSV_VERSION = "v1"
CSV_FMT = "%.10e"


def csv_banner(name):
    return f"darkladder-csv {CSV_VERSION} {name}"


def _atomic_write(path, write):
    """Write through a temporary file in the target directory, then rename."""
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            write(f)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    logger.debug("wrote %s", path)
    return path


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return CSV_FMT % v
    return str(v)


def write_csv(path, name, columns, rows):
    """CSV with a `# darkladder-csv v1 <name>` line, a header row, then `rows`."""
    columns = list(columns)

    def write(f):
        f.write(f"# {csv_banner(name)}\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} cells, header has {len(columns)}")
            f.write(",".join(_cell(v) for v in row) + "\n")

    return _atomic_write(path, write)


def read_csv(path):
    """(columns, float array) of a CSV with optional `#` comment lines."""
    with open(path, "r", encoding="utf-8") as f:
        lines = [l for l in f if l.strip() and not l.startswith("#")]
    if not lines:
        raise ValueError(f"{path} has no header row")
    columns = [c.strip() for c in lines[0].split(",")]
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2) if len(lines) > 1 else np.empty((0, len(columns)))
    return columns, data


def write_jsonl(path, records):
    def write(f):
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")

    return _atomic_write(path, write)


def read_jsonl(path):
    with open(path, "r", encoding="utf-8") as f:
        return [json.loads(l) for l in f if l.strip()]


def write_summary(path, summary):
    """`key: value` lines, one per entry."""
    def write(f):
        for k, v in summary.items():
            if isinstance(v, (float, np.floating)):
                f.write(f"{k}: {v:.6f}\n")
            else:
                f.write(f"{k}: {v}\n")

    return _atomic_write(path, write)
