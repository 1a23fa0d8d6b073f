"""CSV ingestion and deterministic machine-readable outputs.

Input tables are comma-separated UTF-8 with a header row; ordinal columns
hold integers (any consecutive code range, remapped so the lowest declared
code becomes level 1) or strings with an explicit level-order map.  ``NA``
or empty cells are rejected with the location of the first offending cell.
Numeric output cells are printed with 17 significant digits so downstream
diffs are exact.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from ordfit.data import OrdinalDataset
from ordfit.errors import ConfigError, DataError

_NA_STRINGS = {"", "NA", "NaN", "nan", "na"}


def fmt(x) -> str:
    """Render a number for CSV output: full precision, stable across runs."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if np.isnan(xf):
        return "NA"
    return format(xf, ".17g")


def read_table(path):
    """Raw CSV contents: (header, rows of strings).  Header is required."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty; a header row is required")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header) or any(h == "" for h in header):
        raise DataError(f"{path} header must have unique non-empty column names")
    body = rows[1:]
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise DataError(
                f"{path}: row has {len(row)} cells, expected {len(header)}",
                row=i + 2,
            )
    return header, body


def _parse_column(name, values, level_map):
    """One ordinal column to levels 1..k.  Returns (codes, k, remap_info)."""
    if level_map is not None:
        lookup = {lab: i + 1 for i, lab in enumerate(level_map)}
        codes = np.empty(len(values), dtype=np.int64)
        for i, v in enumerate(values):
            if v in _NA_STRINGS:
                raise DataError("missing value", row=i + 2, column=name)
            if v not in lookup:
                raise DataError(
                    f"value {v!r} not in the declared level order for {name!r}",
                    row=i + 2,
                    column=name,
                )
            codes[i] = lookup[v]
        return codes, len(level_map), {"levels": list(level_map)}
    codes = np.empty(len(values), dtype=np.int64)
    for i, v in enumerate(values):
        vs = v.strip()
        if vs in _NA_STRINGS:
            raise DataError("missing value", row=i + 2, column=name)
        try:
            codes[i] = int(vs)
        except ValueError as exc:
            raise DataError(
                f"non-integer value {v!r} in column {name!r} "
                "(declare a level order for string columns)",
                row=i + 2,
                column=name,
            ) from exc
    lo, hi = int(codes.min()), int(codes.max())
    shift = 1 - lo
    k = hi - lo + 1
    if k < 2:
        raise DataError(f"column {name!r} has a single observed code", column=name)
    return codes + shift, k, {"code_shift": shift, "observed_range": [lo, hi]}


def read_ordinal_csv(path, response, level_maps=None):
    """Load an ordinal dataset from CSV.

    ``response`` names the response column; ``level_maps`` optionally maps
    column names to ordered label lists for string-coded columns.  Returns
    the dataset plus metadata (per-column remaps, empty-category warnings).
    """
    level_maps = level_maps or {}
    header, body = read_table(path)
    if response not in header:
        raise ConfigError(f"response column {response!r} not found in {path}")
    if not body:
        raise DataError(f"{path} has no data rows")
    columns = {h: [row[i] for row in body] for i, h in enumerate(header)}
    meta = {"remaps": {}, "warnings": []}
    y, c, info = _parse_column(response, columns[response], level_maps.get(response))
    meta["remaps"][response] = info
    pred_names = [h for h in header if h != response]
    if not pred_names:
        raise DataError(f"{path} has no predictor columns")
    x_cols, levels = [], []
    for name in pred_names:
        codes, k, info = _parse_column(name, columns[name], level_maps.get(name))
        meta["remaps"][name] = info
        observed = np.unique(codes)
        if observed.size < k:
            missing = sorted(set(range(1, k + 1)) - set(observed.tolist()))
            meta["warnings"].append(
                f"column {name!r}: categories {missing} observed zero times; "
                "kept in the design (the penalty makes them estimable)"
            )
        x_cols.append(codes)
        levels.append(k)
    data = OrdinalDataset(
        x=np.column_stack(x_cols),
        y=y,
        levels=np.asarray(levels),
        c=c,
        names=pred_names,
    )
    return data, meta


def write_dataset_csv(path, data: OrdinalDataset, response_name="y"):
    """Write a dataset as a plain level-coded CSV (round-trips exactly)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(data.names) + [response_name])
        for i in range(data.n):
            writer.writerow(
                [str(int(v)) for v in data.x[i]] + [str(int(data.y[i]))]
            )


def write_table(path, header, rows):
    """Tidy CSV with full-precision numeric cells."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(v) for v in obj)
    return obj


def write_json(path, doc):
    """Deterministic JSON document: sorted keys, no timestamps."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_config_file(path):
    """Flat key-value config: one ``key = value`` per line, # comments.

    Keys match the CLI flag names (dashes allowed); ``levels.<column>``
    entries declare ordered level labels for string-coded columns.
    """
    entries = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries
