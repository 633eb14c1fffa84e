"""CSV/JSON persistence of time series and alpha-scan summaries.

Numbers are written with 12 significant digits (``%.12g``) so repeated runs
of the exact propagator give byte-identical files.
"""

import csv
import json
import os
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "{:.12g}"
SUMMARY_HEADER = ("alpha", "Qbar_up", "Qbar_dn", "counterprop_flag")


def fmt(x):
    x = float(x)
    if x == 0:
        return "0"  # folds -0.0
    return FLOAT_FORMAT.format(x)


def timeseries_header(L):
    return (
        ["t", "J_up", "J_dn", "Q_up", "Q_dn"]
        + [f"n_{i}" for i in range(1, L + 1)]
        + [f"nup_{i}" for i in range(1, L + 1)]
        + [f"ndn_{i}" for i in range(1, L + 1)]
    )


def timeseries_table(series):
    """(header, rows) with every value already formatted as text."""
    L = series.n.shape[1]
    cols = np.column_stack([series.t, series.J_up, series.J_dn, series.Q_up, series.Q_dn,
                            series.n, series.n_up, series.n_dn])
    rows = [[fmt(v) for v in row] for row in cols]
    return timeseries_header(L), rows


def _write_atomic(path, write):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        write(fh)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
    return path


def write_timeseries(series, path_stem, formats=("csv",)):
    """Write ``series`` to ``<stem>.csv`` and/or ``<stem>.json``; returns the paths."""
    header, rows = timeseries_table(series)
    written = []
    for f in formats:
        if f == "csv":
            def write(fh):
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                w.writerows(rows)
        elif f == "json":
            records = [{k: float(v) for k, v in zip(header, row)} for row in rows]

            def write(fh):
                json.dump(records, fh, indent=1)
                fh.write("\n")
        else:
            raise ValueError(f"unknown output format {f!r}")
        written.append(_write_atomic(f"{path_stem}.{f}", write))
    return written


def write_summary(scan, path_stem, formats=("csv",)):
    rows = [[fmt(a), fmt(qu), fmt(qd), str(int(flag))] for a, qu, qd, flag in scan.summary_rows()]
    written = []
    for f in formats:
        if f == "csv":
            def write(fh):
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(SUMMARY_HEADER)
                w.writerows(rows)
        elif f == "json":
            records = [
                {"alpha": float(a), "Qbar_up": float(qu), "Qbar_dn": float(qd), "counterprop_flag": int(c)}
                for a, qu, qd, c in rows
            ]

            def write(fh):
                json.dump(records, fh, indent=1)
                fh.write("\n")
        else:
            raise ValueError(f"unknown output format {f!r}")
        written.append(_write_atomic(f"{path_stem}.{f}", write))
    return written


def read_timeseries_csv(path):
    """Load a time-series CSV as a dict of float arrays keyed by column name."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    return {name: data[:, k] for k, name in enumerate(header)}
