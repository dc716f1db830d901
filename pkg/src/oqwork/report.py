"""CSV emission for sweep results.

Floats are written with ``repr`` (shortest string that round-trips), UTF-8,
comma separated, LF line endings, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

QUBIT_HEADER = ("t", "q00", "q01", "q10", "q11", "neg_oq", "w_q", "w_cl")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _table_names(prefix: str, shape) -> list:
    return [f"{prefix}{i}{f}" for i in range(shape[0]) for f in range(shape[1])]


def qubit_rows(rows) -> tuple:
    body = [[r.t, *np.ravel(r.q), r.neg_oq, r.w_q, r.w_cl] for r in rows]
    return QUBIT_HEADER, body


def nv_header(shape=(3, 3), n_out: int = 3) -> tuple:
    return ("t", *_table_names("oq", shape), *_table_names("mhq", shape),
            "neg_oq", "neg_mhq", "w_oq", "w_mhq",
            *(f"epm{f}" for f in range(n_out)), "dark_epm")


def nv_rows(rows) -> tuple:
    header = nv_header(rows[0].oq.shape, len(rows[0].epm)) if rows else nv_header()
    body = [[r.t, *np.ravel(r.oq), *np.ravel(r.mhq), r.neg_oq, r.neg_mhq,
             r.w_oq, r.w_mhq, *r.epm, r.dark_epm] for r in rows]
    return header, body


def write_csv(path, header, body) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in body:
            w.writerow([fmt(x) for x in row])


def write_metadata(csv_path, meta: dict) -> Path:
    """Sidecar ``<csv>.meta.json`` describing the run configuration."""
    path = Path(str(csv_path) + ".meta.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return path


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, (tuple, np.ndarray)):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")
