"""Brute-force and high-precision reference solutions for tiny instances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, RankDeficient
from .geometry import Ellipsoid, PointSet, coverage, log_volume_or_neg_inf
from .solver import SolverConfig, solve_mvee


@dataclass(frozen=True)
class OracleBudget:
    max_subsets: int = 200_000
    tol: float = 1e-12

    def __post_init__(self):
        if self.max_subsets < 1:
            raise ValueError("max_subsets must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def solver(self) -> SolverConfig:
        return SolverConfig(eta=self.tol)


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Unpacks as ``(ellipsoid, covered_ids)``."""

    ellipsoid: Ellipsoid
    covered_ids: np.ndarray
    subset_ids: np.ndarray
    log_volume: float
    subsets_checked: int

    def __iter__(self):
        return iter((self.ellipsoid, self.covered_ids))


def _subset_mvee(sub: PointSet, cfg: SolverConfig) -> Ellipsoid:
    try:
        e, _ = solve_mvee(sub, cfg)
    except RankDeficient as err:
        e = err.ellipsoid
    return e


def brute_force_min_k_ellipsoid(a: PointSet, k: int, budget: OracleBudget | None = None) -> OracleResult:
    """Smallest ellipsoid containing at least ``k`` of the points.

    Enumerates every ``k``-subset in lexicographic order of positions and
    keeps the one whose enclosing ellipsoid has the least log-volume.
    Flat subsets score ``-inf`` and win; among equal scores the first subset
    in enumeration order is kept.

    Raises
    ------
    BudgetExceeded
        If ``C(n, k)`` exceeds ``budget.max_subsets``.
    """
    budget = budget or OracleBudget()
    n = a.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    total = math.comb(n, k)
    if total > budget.max_subsets:
        raise BudgetExceeded(f"C({n}, {k}) = {total} subsets exceeds the budget of {budget.max_subsets}")
    cfg = budget.solver()
    best = None
    best_lv = math.inf
    best_idx = None
    for idx in itertools.combinations(range(n), k):
        sub = a.select(np.array(idx))
        e = _subset_mvee(sub, cfg)
        lv = log_volume_or_neg_inf(e)
        if best is None or lv < best_lv:
            best, best_lv, best_idx = e, lv, idx
    cov = coverage(best, a)
    return OracleResult(best, cov.member_ids, a.ids[list(best_idx)].copy(), best_lv, total)


def high_precision_mvee(a: PointSet, eta: float = 1e-12) -> Ellipsoid:
    """Enclosing ellipsoid solved to a tight certificate.

    Same ascent as :func:`solve_mvee` with a 100x larger iteration budget.

    Raises
    ------
    RankDeficient
        If the points do not affinely span the space.
    """
    n, k = a.n, a.dim + 1
    cfg = SolverConfig(eta=eta, max_iters=100 * SolverConfig().iteration_budget(n, k))
    e, _ = solve_mvee(a, cfg)
    return e
