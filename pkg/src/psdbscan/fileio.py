"""File formats: vector CSV in, linkage CSV in, label CSV out, metrics JSON.

Vector rows are `id,c1,...,cd` with dense ids 0..N-1; linkage rows are
`src,dst` edges.  Labels are written as `id,label` with NOISE as -1.
Parse failures report the offending line number.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DataError
from .neighborhood import Dataset, NeighborGraph, ingest_linkage
from .sequential import NOISE, ClusteringResult

LABEL_HEADER = "id,label"


def parse_vector_file(path) -> Dataset:
    rows: dict[int, list[float]] = {}
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise DataError(f"{path}: line {lineno}: expected id plus coordinates")
            try:
                pid = int(parts[0])
                coords = [float(v) for v in parts[1:]]
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: non-numeric field ({exc})") from None
            if any(not np.isfinite(c) for c in coords):
                raise DataError(f"{path}: line {lineno}: non-finite coordinate")
            if dim is None:
                dim = len(coords)
            elif len(coords) != dim:
                raise DataError(
                    f"{path}: line {lineno}: dimension {len(coords)} differs from {dim}"
                )
            if pid in rows:
                raise DataError(f"{path}: line {lineno}: duplicate id {pid}")
            rows[pid] = coords
    if not rows:
        raise DataError(f"{path}: no data rows")
    n = len(rows)
    missing = sorted(set(range(n)) - set(rows))
    extra = sorted(set(rows) - set(range(n)))
    if missing or extra:
        raise DataError(
            f"{path}: ids must be exactly 0..{n - 1}; missing {missing[:5]}, unexpected {extra[:5]}"
        )
    coords = np.asarray([rows[i] for i in range(n)], dtype=np.float64)
    return Dataset.from_coords(coords)


def parse_linkage_file(path, n: int | None = None) -> NeighborGraph:
    """Edge-list CSV; when n is omitted it is inferred as max id + 1."""
    edges: list[tuple[int, int]] = []
    max_id = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise DataError(f"{path}: line {lineno}: expected `src,dst`")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataError(f"{path}: line {lineno}: non-integer id") from None
            if a < 0 or b < 0:
                raise DataError(f"{path}: line {lineno}: negative id")
            edges.append((a, b))
            max_id = max(max_id, a, b)
    if n is None:
        n = max_id + 1
    elif max_id >= n:
        raise DataError(f"{path}: id {max_id} out of range for n={n}")
    return ingest_linkage(edges, n)


def write_labels(path, result: ClusteringResult) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(LABEL_HEADER + "\n")
        for i, label in enumerate(result.labels):
            fh.write(f"{i},{int(label)}\n")


def read_labels(path) -> np.ndarray:
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line == LABEL_HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise DataError(f"{path}: line {lineno}: expected `id,label`")
            labels.append((int(parts[0]), int(parts[1])))
    labels.sort()
    return np.asarray([lab for _, lab in labels], dtype=np.int64)


def write_vector_file(path, dataset: Dataset) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, row in enumerate(dataset.coords):
            fh.write(f"{i}," + ",".join(repr(float(v)) for v in row) + "\n")


def write_metrics(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
