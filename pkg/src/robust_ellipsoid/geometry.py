"""Point sets, ellipsoids and the closed-form operations on them.

An ellipsoid is stored as a center ``c`` and a PSD shape matrix ``M`` with
``E = {x : (x - c)^T M^{-1} (x - c) <= 1}``; the semi-axes have lengths
``sqrt(eig(M))``. Volumes are only ever handled as natural logs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateEllipsoid, DimensionMismatch

# eigenvalues below this fraction of the largest one count as zero
DEGENERATE_RTOL = 1e-14
SYMMETRY_RTOL = 1e-10
# absolute offset (relative to the ellipsoid scale) tolerated off a flat
FLAT_ATOL = 1e-9


def _frozen(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PointSet:
    """``n`` points in ``R^dim`` with stable integer ids."""

    points: np.ndarray
    ids: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
        ids = np.array(self.ids, dtype=np.int64, copy=True).reshape(-1)
        if ids.shape[0] != pts.shape[0]:
            raise ValueError("need exactly one id per point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if ids.size and (ids.min() < 0 or np.unique(ids).size != ids.size):
            raise ValueError("ids must be distinct and non-negative")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "ids", _frozen(ids))

    @classmethod
    def from_array(cls, points, dim=None) -> PointSet:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            if dim is None:
                raise ValueError("1-d input needs an explicit dim")
            pts = pts.reshape(-1, dim)
        if pts.size == 0 and dim is not None:
            pts = pts.reshape(0, dim)
        return cls(pts, np.arange(pts.shape[0]))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.n

    def select(self, mask) -> PointSet:
        """Sub-set by boolean mask or positional index array; ids survive."""
        return PointSet(self.points[mask], self.ids[mask])

    def remove(self, ids) -> PointSet:
        keep = ~np.isin(self.ids, np.asarray(ids, dtype=np.int64))
        return self.select(keep)

    def by_ids(self, ids) -> PointSet:
        pos = {int(i): p for p, i in enumerate(self.ids)}
        idx = np.array([pos[int(i)] for i in ids], dtype=np.int64)
        return PointSet(self.points[idx], self.ids[idx])


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """``{x : (x - center)^T shape^{-1} (x - center) <= 1}``."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        c = np.array(self.center, dtype=float, copy=True).reshape(-1)
        m = np.array(self.shape, dtype=float, copy=True)
        d = c.shape[0]
        if m.shape != (d, d):
            raise DimensionMismatch(f"shape {m.shape} does not match center dim {d}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(c))):
            raise ValueError("ellipsoid entries must be finite")
        scale = max(np.linalg.norm(m), np.finfo(float).tiny)
        if np.linalg.norm(m - m.T) > SYMMETRY_RTOL * scale:
            raise ValueError("shape matrix is not symmetric")
        m = 0.5 * (m + m.T)
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "shape", _frozen(m))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @cached_property
    def _eig(self):
        lam, vec = np.linalg.eigh(self.shape)
        if lam[0] < -1e-10 * max(abs(lam[-1]), 1.0):
            raise ValueError(f"shape matrix is not PSD (min eigenvalue {lam[0]:.3g})")
        return np.clip(lam, 0.0, None), vec

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eig[0]

    @property
    def axes(self) -> np.ndarray:
        """Principal directions as columns, matching ``eigenvalues``."""
        return self._eig[1]

    @property
    def degenerate(self) -> bool:
        lam = self.eigenvalues
        return bool(lam[-1] <= 0.0 or lam[0] <= DEGENERATE_RTOL * lam[-1])

    def flat_basis(self) -> np.ndarray:
        """Orthonormal rows spanning the directions the ellipsoid has extent in."""
        lam, vec = self._eig
        keep = lam > DEGENERATE_RTOL * max(lam[-1], 0.0) if lam[-1] > 0 else np.zeros(lam.shape, bool)
        return vec[:, keep].T.copy()

    def quad_form(self, x) -> np.ndarray:
        """``(x - c)^T M^{-1} (x - c)`` row-wise; ``inf`` off a degenerate flat."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.dim:
            raise DimensionMismatch(f"points have dim {x.shape[1]}, ellipsoid {self.dim}")
        lam, vec = self._eig
        y = (x - self.center) @ vec
        live = lam > DEGENERATE_RTOL * lam[-1] if lam[-1] > 0 else np.zeros(lam.shape, bool)
        q = np.sum(y[:, live] ** 2 / lam[live], axis=1)
        if not live.all():
            scale = max(np.sqrt(lam[-1]), 1.0)
            off = np.linalg.norm(y[:, ~live], axis=1)
            q = np.where(off > FLAT_ATOL * scale, np.inf, q)
        return q

    def contains(self, x, slack=1e-9) -> np.ndarray:
        return self.quad_form(x) <= 1.0 + slack

    def affine_image(self, A, b) -> Ellipsoid:
        """Image under ``x -> A x + b``."""
        A = np.asarray(A, dtype=float)
        return Ellipsoid(A @ self.center + b, A @ self.shape @ A.T)


def log_unit_ball_volume(d: int) -> float:
    return 0.5 * d * np.log(np.pi) - gammaln(0.5 * d + 1.0)


def log_volume(e: Ellipsoid) -> float:
    """Natural log of ``vol(e)``; raises for zero-volume ellipsoids."""
    if e.degenerate:
        raise DegenerateEllipsoid("ellipsoid has zero volume")
    return float(log_unit_ball_volume(e.dim) + 0.5 * np.sum(np.log(e.eigenvalues)))


def log_volume_or_neg_inf(e: Ellipsoid) -> float:
    return -np.inf if e.degenerate else log_volume(e)


def condition_number(e: Ellipsoid) -> float:
    """Ratio of the longest to the shortest semi-axis."""
    if e.degenerate:
        raise DegenerateEllipsoid("condition number is infinite")
    lam = e.eigenvalues
    return float(np.sqrt(lam[-1] / lam[0]))


@dataclass(frozen=True)
class Coverage:
    count: int
    fraction: float
    member_ids: np.ndarray


def coverage(e: Ellipsoid, a: PointSet, slack: float = 1e-9) -> Coverage:
    """Points of ``a`` inside the closed ellipsoid (boundary included)."""
    if a.dim != e.dim:
        raise DimensionMismatch(f"point dim {a.dim} != ellipsoid dim {e.dim}")
    if a.n == 0:
        return Coverage(0, 0.0, np.zeros(0, dtype=np.int64))
    inside = e.contains(a.points, slack)
    count = int(inside.sum())
    return Coverage(count, count / a.n, a.ids[inside].copy())


def lift(a: PointSet) -> PointSet:
    """Append a trailing coordinate equal to 1 to every point."""
    return PointSet(np.hstack([a.points, np.ones((a.n, 1))]), a.ids)


def drop_last(a: PointSet) -> PointSet:
    return PointSet(a.points[:, :-1], a.ids)


def symmetrize(a: PointSet) -> PointSet:
    """Points followed by their negations; negated copies get ids offset by n.

    The offset grows past ``n`` only when the input ids are not ``0..n-1``
    and a plain ``n`` offset would collide.
    """
    offset = a.n if a.n == 0 else max(a.n, int(a.ids.max()) + 1)
    return PointSet(np.vstack([a.points, -a.points]), np.concatenate([a.ids, a.ids + offset]))
