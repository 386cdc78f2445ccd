"""Text serialization of trained models.

Format (version header on line 1, floats at 17 significant digits so the
round trip is lossless):

    fadogate-svm v1
    gamma <g>
    bias <b>
    C <c>
    nsv <k>
    <coef> <f0> ... <f_d-1>     k support-vector lines, scaled space
    scaler
    <min> <max>                 one line per feature dimension
"""

from __future__ import annotations

import numpy as np

from .errors import FileFormatError
from .svm import FeatureScaler, SvmModel

FORMAT_HEADER = "fadogate-svm v1"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_model(model: SvmModel, path) -> None:
    lines = [
        FORMAT_HEADER,
        f"gamma {_fmt(model.gamma)}",
        f"bias {_fmt(model.bias)}",
        f"C {_fmt(model.C)}",
        f"nsv {len(model.support_vectors)}",
    ]
    for coef, sv in zip(model.dual_coeffs, model.support_vectors):
        lines.append(" ".join([_fmt(coef)] + [_fmt(v) for v in sv]))
    lines.append("scaler")
    for lo, hi in zip(model.scaler.mins, model.scaler.maxs):
        lines.append(f"{_fmt(lo)} {_fmt(hi)}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _scalar(lines, idx, key) -> float:
    try:
        name, value = lines[idx].split()
    except (IndexError, ValueError):
        raise FileFormatError(f"expected '{key} <value>'", line=idx + 1)
    if name != key:
        raise FileFormatError(f"expected key {key!r}, found {name!r}",
                              line=idx + 1)
    try:
        return float(value)
    except ValueError:
        raise FileFormatError(f"bad float {value!r}", line=idx + 1)


def load_model(path) -> SvmModel:
    """Parse a model file written by save_model.

    Raises:
        FileFormatError: wrong header, malformed line, or truncated file;
            the message carries the offending line number.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh]

    if not lines or lines[0] != FORMAT_HEADER:
        raise FileFormatError(
            f"not a model file (expected header {FORMAT_HEADER!r})", line=1)
    gamma = _scalar(lines, 1, "gamma")
    bias = _scalar(lines, 2, "bias")
    c_param = _scalar(lines, 3, "C")
    nsv = int(_scalar(lines, 4, "nsv"))
    if nsv < 1:
        raise FileFormatError("model must have at least one support vector",
                              line=5)

    coeffs = np.empty(nsv)
    rows = []
    dim = None
    for k in range(nsv):
        idx = 5 + k
        if idx >= len(lines):
            raise FileFormatError("truncated support-vector block",
                                  line=len(lines))
        parts = lines[idx].split()
        if dim is None:
            dim = len(parts) - 1
        if len(parts) != dim + 1 or dim < 1:
            raise FileFormatError("inconsistent support-vector width",
                                  line=idx + 1)
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise FileFormatError("bad float in support vector", line=idx + 1)
        coeffs[k] = values[0]
        rows.append(values[1:])

    marker = 5 + nsv
    if marker >= len(lines) or lines[marker] != "scaler":
        raise FileFormatError("missing 'scaler' section", line=marker + 1)
    mins, maxs = [], []
    for d in range(dim):
        idx = marker + 1 + d
        if idx >= len(lines):
            raise FileFormatError("truncated scaler block", line=len(lines))
        parts = lines[idx].split()
        if len(parts) != 2:
            raise FileFormatError("scaler line needs '<min> <max>'",
                                  line=idx + 1)
        try:
            mins.append(float(parts[0]))
            maxs.append(float(parts[1]))
        except ValueError:
            raise FileFormatError("bad float in scaler line", line=idx + 1)

    return SvmModel(
        support_vectors=np.array(rows),
        dual_coeffs=coeffs,
        bias=bias,
        gamma=gamma,
        C=c_param,
        scaler=FeatureScaler(np.array(mins), np.array(maxs)),
    )
