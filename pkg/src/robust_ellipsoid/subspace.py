"""Robust subspace recovery from unit vectors with outliers.

Recipe: jitter every point with a small isotropic Gaussian and renormalize
(this keeps the inliers from sitting on an exact flat), symmetrize, find an
origin-centered coverage ellipsoid, and keep the axes whose squared length
is at least ``eps**2``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .coverage import AlgoConfig, CoverageResult, approximate_origin_ellipsoid
from .errors import ZeroVector
from .geometry import Ellipsoid, PointSet, symmetrize
from .solver import SolverConfig, span_mvee_origin

UNIT_TOL = 1e-8


@dataclass(frozen=True)
class SubspaceConfig:
    """``eps_star_override`` replaces the default jitter scale ``eps**(4/gamma)``.

    ``ellipsoid_cfg`` defaults to an :class:`AlgoConfig` built from
    ``alpha_hint``, ``gamma`` and ``seed``.
    """

    gamma: float
    eps: float
    eps_star_override: float | None = None
    alpha_hint: float = 0.05
    ellipsoid_cfg: AlgoConfig | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.eps_star_override is not None and not self.eps_star_override > 0:
            raise ValueError("eps_star_override must be positive")

    @property
    def eps_star(self) -> float:
        if self.eps_star_override is not None:
            return float(self.eps_star_override)
        return self.eps ** (4.0 / self.gamma)

    def algo(self) -> AlgoConfig:
        if self.ellipsoid_cfg is not None:
            return self.ellipsoid_cfg
        return AlgoConfig(alpha=self.alpha_hint, gamma=self.gamma, seed=self.seed)


@dataclass(frozen=True, eq=False)
class SubspaceResult:
    basis: np.ndarray
    dim: int
    distances: np.ndarray
    close_count: int
    ellipsoid: Ellipsoid
    eigenvalues: np.ndarray
    search: CoverageResult | None = None


def _unit(a: PointSet, what="input") -> PointSet:
    norms = np.linalg.norm(a.points, axis=1)
    if np.any(norms < 1e-300):
        raise ZeroVector(f"{what} contains a zero vector")
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        warnings.warn(f"{what} points are not unit length; normalizing", stacklevel=3)
        return PointSet(a.points / norms[:, None], a.ids)
    return a


def perturb_normalize(a: PointSet, eps_star: float, rng) -> PointSet:
    """``a_i + z_i`` with ``z_i ~ N(0, eps_star^2/d I)``, then scaled to unit length.

    ``rng`` is a numpy Generator or anything ``default_rng`` accepts.
    With ``eps_star == 0`` the (normalized) input comes back unchanged.
    """
    if eps_star < 0:
        raise ValueError("eps_star must be non-negative")
    a = _unit(a)
    if eps_star == 0:
        return a
    rng = np.random.default_rng(rng)
    d = a.dim
    p = a.points + rng.standard_normal(a.points.shape) * (eps_star / math.sqrt(d))
    norms = np.linalg.norm(p, axis=1, keepdims=True)
    if np.any(norms < 1e-300):
        raise ZeroVector("perturbed point has zero length")
    return PointSet(p / norms, a.ids)


def _check_sample_size(n, d, eps_star):
    if eps_star > 0 and n < d * math.log(d / eps_star):
        warnings.warn(f"n = {n} is small for d = {d} and eps_star = {eps_star:.3g}", stacklevel=3)


def recover_subspace(a: PointSet, cfg: SubspaceConfig) -> SubspaceResult:
    """Subspace through the origin that most points are ``eps``-close to.

    Distances are those of the original (normalized, unperturbed) points.

    Raises
    ------
    NoFeasibleCandidate
        When no recorded ellipsoid reaches the coverage floor.
    """
    a = _unit(a)
    eps_star = cfg.eps_star
    _check_sample_size(a.n, a.dim, eps_star)
    jittered = perturb_normalize(a, eps_star, np.random.default_rng(cfg.seed))
    search = approximate_origin_ellipsoid(symmetrize(jittered), cfg.algo())
    e = search.best.ellipsoid
    lam, vec = np.linalg.eigh(e.shape)
    keep = lam >= cfg.eps**2
    basis = vec[:, keep][:, ::-1].T.copy()
    resid = a.points - (a.points @ basis.T) @ basis
    dist = np.clip(np.linalg.norm(resid, axis=1), 0.0, 1.0)
    close = int(np.sum(dist <= cfg.eps))
    return SubspaceResult(basis, int(keep.sum()), dist, close, e, lam, search)


class FatnessStatus(enum.Enum):
    OK = "ok"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not_applicable"


class FatnessCheck(NamedTuple):
    lambda_min: float
    bound: float
    degenerate: bool
    status: FatnessStatus


def fatness_min_eigenvalue(a_perturbed: PointSet, coverage_fraction: float, *, eps_star: float,
                           cfg: AlgoConfig | None = None, solver: SolverConfig | None = None) -> FatnessCheck:
    """Smallest eigenvalue of the origin-centered enclosing ellipsoid vs ``eps_star^2/(256 d)``.

    With ``coverage_fraction == 1`` this is the plain enclosing ellipsoid of
    the symmetrized points.  Otherwise the coverage search is run with its
    floor set to ``coverage_fraction * 2n`` and the best candidate is used.
    ``eps_star == 0`` means the points were never jittered, so the status is
    ``NOT_APPLICABLE``.
    """
    if not 0.8 <= coverage_fraction <= 1.0:
        raise ValueError("coverage_fraction must lie in [4/5, 1]")
    sym = symmetrize(a_perturbed)
    d = a_perturbed.dim
    if coverage_fraction >= 1.0:
        e = span_mvee_origin(sym, solver)
    else:
        cfg = cfg or AlgoConfig(alpha=min(0.5, 1.0 - coverage_fraction) or 0.01, gamma=0.5)
        e = approximate_origin_ellipsoid(sym, cfg, min_coverage=coverage_fraction * sym.n).best.ellipsoid
    lam_min = float(e.eigenvalues[0])
    bound = eps_star**2 / (256.0 * d)
    if eps_star == 0:
        return FatnessCheck(lam_min, bound, e.degenerate, FatnessStatus.NOT_APPLICABLE)
    status = FatnessStatus.OK if lam_min >= bound else FatnessStatus.VIOLATED
    return FatnessCheck(lam_min, bound, e.degenerate, status)
