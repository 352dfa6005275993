"""Point files (strict CSV) and ellipsoid documents (sorted-key JSON text)."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateEllipsoid
from .geometry import Ellipsoid, PointSet, condition_number, log_volume_or_neg_inf


class InputError(ValueError):
    """Malformed point file or document."""


def read_points(path, header: bool = False) -> PointSet:
    """One point per row, no header unless ``header``; rejects NaN, inf and ragged rows."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror or err}") from err
    rows = []
    width = None
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if header and lineno == 1:
            continue
        if not row or all(not c.strip() for c in row):
            continue
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"{path}: row {lineno} has {len(row)} columns, expected {width}")
        try:
            vals = [float(c) for c in row]
        except ValueError as err:
            raise InputError(f"{path}: row {lineno} is not numeric ({err})") from None
        if not all(math.isfinite(v) for v in vals):
            raise InputError(f"{path}: row {lineno} contains a non-finite value")
        rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no points")
    return PointSet.from_array(np.array(rows, dtype=float))


def write_points(path, points) -> None:
    pts = points.points if isinstance(points, PointSet) else np.atleast_2d(np.asarray(points, dtype=float))
    lines = [",".join(_num(float(v)) for v in row) for row in pts]
    Path(path).write_text("".join(line + "\n" for line in lines))


def _num(x: float) -> str:
    if math.isnan(x):
        raise ValueError("NaN cannot be serialized")
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == 0:
        return "0.0"  # folds -0.0 so output is stable
    s = f"{x:.17g}"
    return s if any(ch in s for ch in ".en") else s + ".0"


def _dump(obj, indent=0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (list, tuple, dict)) for v in obj):
            return "[" + ", ".join(_dump(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _dump(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_line(obj: dict) -> str:
    """Single-line form of a flat dict, same number formatting as :func:`dumps`."""
    return "{" + ", ".join(f"{json.dumps(str(k))}: {_dump(obj[k])}" for k in sorted(obj)) + "}"


def dumps(obj) -> str:
    """Sorted keys, 17 significant digits, ``Infinity`` for infinite values."""
    return _dump(obj) + "\n"


@dataclass(frozen=True, eq=False)
class EllipsoidDocument:
    dim: int
    center: np.ndarray
    shape: np.ndarray
    log_volume: float
    condition_number: float
    degenerate_basis: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_ellipsoid(cls, e: Ellipsoid, **meta) -> EllipsoidDocument:
        try:
            cond = condition_number(e)
        except DegenerateEllipsoid:
            cond = math.inf
        basis = e.flat_basis() if e.degenerate else None
        return cls(e.dim, e.center.copy(), e.shape.copy(), log_volume_or_neg_inf(e), cond, basis, dict(meta))

    def ellipsoid(self) -> Ellipsoid:
        return Ellipsoid(self.center, self.shape)

    def to_dict(self) -> dict:
        m = np.array(self.shape, dtype=float)
        lower = np.tril(m)
        m = lower + np.tril(m, -1).T  # exact mirror of the lower triangle
        return {
            "dim": int(self.dim),
            "center": [float(v) for v in self.center],
            "shape": [[float(v) for v in row] for row in m],
            "log_volume": float(self.log_volume),
            "condition_number": float(self.condition_number),
            "degenerate_basis": None if self.degenerate_basis is None
            else [[float(v) for v in row] for row in self.degenerate_basis],
            "meta": dict(self.meta),
        }

    def dumps(self) -> str:
        return dumps(self.to_dict())

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> EllipsoidDocument:
        try:
            d = json.loads(text)
            dim = int(d["dim"])
            center = np.array(d["center"], dtype=float).reshape(dim)
            shape = np.array(d["shape"], dtype=float).reshape(dim, dim)
            basis = d.get("degenerate_basis")
            basis = None if basis is None else np.array(basis, dtype=float).reshape(-1, dim)
            return cls(dim, center, shape, float(d["log_volume"]), float(d["condition_number"]),
                       basis, dict(d.get("meta") or {}))
        except (KeyError, TypeError, ValueError) as err:
            raise InputError(f"malformed ellipsoid document: {err}") from None

    @classmethod
    def read(cls, path) -> EllipsoidDocument:
        try:
            text = Path(path).read_text()
        except OSError as err:
            raise InputError(f"cannot read {path}: {err.strerror or err}") from err
        return cls.loads(text)
