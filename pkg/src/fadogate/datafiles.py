"""Manifest and feature-cache file formats.

Manifest: CSV rows of `path,label` with labels from {fado, other}. An
optional literal `path,label` header row is tolerated.

Feature cache: CSV with header `path,label,f0..f31`, one row per song,
label +1 (fado) or -1 (other), floats at 9 significant digits. Caches
decouple slow audio extraction from fast experimentation; training and
evaluation consume caches only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import FileFormatError
from .features import N_FEATURES
from .svm import LabeledDataset

FADO_LABEL = 1
OTHER_LABEL = -1

_LABEL_NAMES = {FADO_LABEL: "fado", OTHER_LABEL: "other"}
_NAME_LABELS = {v: k for k, v in _LABEL_NAMES.items()}

CACHE_HEADER = ["path", "label"] + [f"f{i}" for i in range(N_FEATURES)]


def label_name(label: int) -> str:
    return _LABEL_NAMES[label]


def label_from_name(name: str) -> int:
    try:
        return _NAME_LABELS[name.strip().lower()]
    except KeyError:
        raise FileFormatError(f"label must be fado or other, got {name!r}")


@dataclass
class ManifestEntry:
    path: str
    label: int


def read_manifest(path) -> list:
    entries = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if lineno == 1 and [c.strip().lower() for c in row] == ["path", "label"]:
                continue
            if len(row) != 2:
                raise FileFormatError(
                    f"expected 'path,label', got {len(row)} fields",
                    line=lineno)
            song_path, label_token = row[0].strip(), row[1]
            if not song_path:
                raise FileFormatError("empty path", line=lineno)
            try:
                label = label_from_name(label_token)
            except FileFormatError as exc:
                raise FileFormatError(str(exc), line=lineno)
            entries.append(ManifestEntry(song_path, label))
    if not entries:
        raise FileFormatError(f"{path}: manifest has no rows")
    return entries


def write_manifest(entries, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "label"])
        for entry in entries:
            writer.writerow([entry.path, label_name(entry.label)])


def write_cache(rows, path) -> None:
    """Write (song_path, label, values) triples as a feature cache."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CACHE_HEADER)
        for song_path, label, values in rows:
            writer.writerow([song_path, label]
                            + [format(float(v), ".9g") for v in values])


def read_cache(path) -> LabeledDataset:
    """Parse a feature cache into a dataset.

    Raises:
        FileFormatError: wrong header, bad field count, non-numeric or
            non-finite value, or unknown label; carries the line number.
    """
    ids = []
    labels = []
    vectors = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError(f"{path}: empty cache file")
        if header != CACHE_HEADER:
            raise FileFormatError(
                f"bad cache header (expected path,label,f0..f{N_FEATURES - 1})",
                line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 + N_FEATURES:
                raise FileFormatError(
                    f"expected {2 + N_FEATURES} fields, got {len(row)}",
                    line=lineno)
            if row[1] not in ("1", "-1"):
                raise FileFormatError(f"label must be 1 or -1, got {row[1]!r}",
                                      line=lineno)
            try:
                values = [float(v) for v in row[2:]]
            except ValueError:
                raise FileFormatError("non-numeric feature value", line=lineno)
            if not all(np.isfinite(values)):
                raise FileFormatError("non-finite feature value", line=lineno)
            ids.append(row[0])
            labels.append(int(row[1]))
            vectors.append(values)
    if not ids:
        raise FileFormatError(f"{path}: cache has no data rows")
    return LabeledDataset(np.array(vectors), np.array(labels), ids)
