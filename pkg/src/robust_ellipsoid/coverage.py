"""Approximate coverage ellipsoids by iterated dual-weighted outlier removal.

For every candidate bounding ball and every restart, the in-ball points are
lifted, and rounds of "solve the MVEE dual, drop each point with probability
equal to its weight" are run.  The MVEE of the survivors is recorded before
each removal (and once more after the last one); the smallest recorded
ellipsoid that still covers enough of the *original* points wins.
"""

from __future__ import annotations

import hashlib
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import NoFeasibleCandidate, RankDeficient
from .geometry import Ellipsoid, PointSet, coverage, drop_last, lift, log_volume_or_neg_inf
from .solver import (
    DualSolution,
    SolverConfig,
    extract_primal_origin,
    flat_mvee,
    free_center_from_lifted,
    solve_dual_origin,
    solve_mvee,
    span_mvee_origin,
)

THREADS_ENV = "ROBUST_ELLIPSOID_THREADS"


@dataclass(frozen=True)
class AlgoConfig:
    """Parameters of the coverage-ellipsoid search.

    ``iter_const_c`` and ``coverage_const_c2`` are the unnamed constants of
    the round count ``J = ceil(c alpha n / (gamma (d+1)))`` and of the
    coverage floor ``(1 - c2 alpha / gamma) n``.  ``max_balls`` keeps only
    that many distinct bounding balls, smallest radius first; ``None`` runs
    every ball.
    """

    alpha: float
    gamma: float
    iter_const_c: float = 56.0
    coverage_const_c2: float = 4.0
    restarts: int | None = None
    removal_cap_factor: float | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    max_balls: int | None = None
    threads: int | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_balls is not None and self.max_balls < 1:
            raise ValueError("max_balls must be >= 1")

    def rounds(self, n: int, k: int) -> int:
        """Removal rounds per branch; ``k`` is the dimension the dual lives in."""
        return max(1, math.ceil(self.iter_const_c * self.alpha * n / (self.gamma * k)))

    def restarts_for(self, n: int) -> int:
        if self.restarts is not None:
            return self.restarts
        return max(1, math.ceil(math.log2(max(n, 2))))

    def cap_fraction(self) -> float:
        if self.removal_cap_factor is not None:
            return self.removal_cap_factor
        return self.coverage_const_c2 * self.alpha / self.gamma

    def removal_cap(self, n: int) -> int:
        return math.floor(self.cap_fraction() * n + 1e-9)

    def coverage_floor(self, n: int) -> float:
        return (1.0 - self.coverage_const_c2 * self.alpha / self.gamma) * n

    def thread_count(self) -> int:
        t = self.threads
        if t is None:
            t = int(os.environ.get(THREADS_ENV, "0") or 0)
        if t <= 0:
            t = os.cpu_count() or 1
        return t


@dataclass(frozen=True, eq=False)
class BoundingBall:
    center_id: int
    radius_id: int
    radius: float
    count: int
    member_ids: np.ndarray

    @property
    def key(self):
        return (self.center_id, self.radius_id)


@dataclass(frozen=True, eq=False)
class CandidateRecord:
    ellipsoid: Ellipsoid
    coverage_count: int
    log_volume: float
    ball_id: tuple | None
    round: int
    restart: int
    survivor_ids: np.ndarray
    dual: DualSolution | None = None
    removed_total: int = 0

    def sort_key(self):
        return (self.restart, self.ball_id or (-1, -1), self.round)


@dataclass(frozen=True)
class BranchSummary:
    ball_id: tuple | None
    restart: int
    rounds_run: int
    solves: int
    removed_total: int
    aborted: bool
    rank_deficient: bool
    planned_rounds: int

    @property
    def reached_end(self) -> bool:
        return self.rounds_run >= self.planned_rounds


@dataclass(frozen=True, eq=False)
class CoverageResult:
    best: CandidateRecord
    candidates: list
    branches: list
    floor: float
    planned_rounds: int
    removal_cap: int

    def __iter__(self):
        return iter((self.best, self.candidates))


def candidate_bounding_balls(a: PointSet, alpha: float, dedupe: bool = True) -> list[BoundingBall]:
    """Balls ``B(a_i, |a_i - a_j|)`` holding at least ``(1 - alpha) n`` points.

    Ordered by (center position, radius position); duplicate member sets are
    dropped, keeping the first occurrence.
    """
    return _balls(a, alpha, dedupe=dedupe)


def _balls(a, alpha, dedupe=True, limit=None):
    n = a.n
    if n == 0:
        return []
    need = (1.0 - alpha) * n - 1e-9
    D = cdist(a.points, a.points)
    rows = []
    for i in range(n):
        srt = np.sort(D[i])
        counts = np.searchsorted(srt, D[i], side="right")
        js = np.nonzero(counts >= need)[0]
        rows.append((i, js, counts[js]))

    if limit is not None:
        flat = [(D[i, j], i, j, c) for i, js, cs in rows for j, c in zip(js, cs)]
        flat.sort(key=lambda t: (t[0], int(a.ids[t[1]]), int(a.ids[t[2]])))
        order = [(i, j, c) for _, i, j, c in flat]
    else:
        order = [(i, j, c) for i, js, cs in rows for j, c in zip(js, cs)]

    seen_local = set()
    seen = set()
    out = []
    for i, j, c in order:
        if dedupe and (i, c) in seen_local:
            continue
        members = np.nonzero(D[i] <= D[i, j])[0]
        if dedupe:
            seen_local.add((i, c))
            h = hashlib.blake2b(np.sort(a.ids[members]).tobytes(), digest_size=16).digest()
            if h in seen:
                continue
            seen.add(h)
        out.append(BoundingBall(int(a.ids[i]), int(a.ids[j]), float(D[i, j]), int(c), a.ids[members].copy()))
        if limit is not None and len(out) >= limit:
            break
    return out


@dataclass(frozen=True, eq=False)
class RoundResult:
    removed_ids: np.ndarray
    dual: DualSolution | None
    flat: Ellipsoid | None = None


def removal_round(points: PointSet, cfg: SolverConfig, rng, *, dual: DualSolution | None = None,
                  init=None, origin: bool = False) -> RoundResult:
    """One dual solve followed by independent removal with probability ``w_i``.

    ``points`` are the survivors in the space the dual is solved in (the
    lifted space for free-center problems).  Weights are clamped to [0, 1].
    If the survivors do not span, nothing is removed and ``flat`` carries
    the zero-volume enclosing ellipsoid (in un-lifted coordinates unless
    ``origin``).
    """
    if dual is None:
        try:
            dual = solve_dual_origin(points, cfg, init=init)
        except RankDeficient:
            flat = span_mvee_origin(points, cfg) if origin else flat_mvee(drop_last(points), cfg)
            return RoundResult(np.zeros(0, dtype=np.int64), None, flat)
    pos = {int(i): p for p, i in enumerate(dual.ids)}
    w = dual.clamped_weights()[[pos[int(i)] for i in points.ids]]
    removed = rng.random(points.n) < w
    return RoundResult(points.ids[removed].copy(), dual)


def _branch(full, local, to_world, *, origin, ball_id, restart, J, cap, cfg, rng):
    """Run one (ball, restart) branch; ``local`` are the un-lifted local points."""
    survivors = local if origin else lift(local)
    records = []
    removed_total = 0
    rounds_run = 0
    solves = 0
    aborted = False
    deficient = False
    warm = "pivoted"
    for j in range(J + 1):
        if survivors.n == 0:
            break
        res = removal_round(survivors, cfg.solver, rng, init=warm, origin=origin)
        solves += 1
        if res.dual is None:
            e = to_world(res.flat)
            deficient = True
        elif origin:
            e = to_world(extract_primal_origin(res.dual))
        else:
            e = to_world(free_center_from_lifted(res.dual, drop_last(survivors)))
        cov = coverage(e, full)
        records.append(CandidateRecord(
            e, cov.count, log_volume_or_neg_inf(e), ball_id, j, restart,
            survivors.ids.copy(), res.dual, removed_total,
        ))
        if deficient or j == J:
            break
        if removed_total + res.removed_ids.size > cap:
            aborted = True
            break
        keep = ~np.isin(survivors.ids, res.removed_ids)
        warm = res.dual.weights[keep] if keep.any() else "pivoted"
        survivors = survivors.select(keep)
        removed_total += res.removed_ids.size
        rounds_run += 1
    summary = BranchSummary(ball_id, restart, rounds_run, solves, removed_total, aborted, deficient, J)
    return records, summary


def _select(candidates, floor):
    ok = [c for c in candidates if c.coverage_count >= floor - 1e-9]
    if not ok:
        raise NoFeasibleCandidate(floor, sorted(candidates, key=lambda c: (-c.coverage_count, c.log_volume))[:10])
    lo = min(c.log_volume for c in ok)
    tied = [c for c in ok if c.log_volume <= lo + 1e-9]
    return min(tied, key=CandidateRecord.sort_key)


def _run_branches(tasks, threads):
    if threads <= 1 or len(tasks) <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: t(), tasks))


def _trivial(a, cfg):
    try:
        e, sol = solve_mvee(a, cfg.solver)
    except RankDeficient as err:
        e, sol = err.ellipsoid, None
    cov = coverage(e, a)
    rec = CandidateRecord(e, cov.count, log_volume_or_neg_inf(e), None, 0, 0, a.ids.copy(), sol, 0)
    summary = BranchSummary(None, 0, 0, 1, 0, False, sol is None, 0)
    return CoverageResult(rec, [rec], [summary], float(a.n), 0, 0)


def approximate_coverage_ellipsoid(a: PointSet, cfg: AlgoConfig) -> CoverageResult:
    """Smallest recorded ellipsoid covering at least ``(1 - c2 alpha/gamma) n`` points.

    Deterministic given ``cfg.seed``: each branch draws from its own stream
    seeded by ``(seed, center id, radius id, restart)``.  When
    ``alpha <= 1/n`` no point may be dropped and the plain MVEE is returned.

    Raises
    ------
    NoFeasibleCandidate
        Carries the recorded candidates with the best coverage.
    """
    n, d = a.n, a.dim
    if n == 0:
        raise ValueError("empty point set")
    if cfg.alpha <= 1.0 / n:
        return _trivial(a, cfg)
    if cfg.gamma * d > cfg.alpha * n:
        warnings.warn(f"gamma*d = {cfg.gamma * d:.3g} exceeds alpha*n = {cfg.alpha * n:.3g}", stacklevel=2)

    J = cfg.rounds(n, d + 1)
    cap = cfg.removal_cap(n)
    floor = cfg.coverage_floor(n)
    balls = _balls(a, cfg.alpha, dedupe=True, limit=cfg.max_balls)
    restarts = cfg.restarts_for(n)
    pos = {int(i): p for p, i in enumerate(a.ids)}

    tasks = []
    for ball in balls:
        center = a.points[pos[ball.center_id]]
        r = ball.radius if ball.radius > 0 else 1.0
        members = a.by_ids(ball.member_ids)
        local = PointSet((members.points - center) / r, members.ids)

        def to_world(e, center=center, r=r):
            return Ellipsoid(r * e.center + center, (r * r) * e.shape)

        for s in range(restarts):
            rng = np.random.default_rng([cfg.seed, ball.center_id, ball.radius_id, s])
            tasks.append(lambda local=local, to_world=to_world, s=s, rng=rng, key=ball.key: _branch(
                a, local, to_world, origin=False, ball_id=key, restart=s,
                J=J, cap=cap, cfg=cfg, rng=rng))

    results = _run_branches(tasks, cfg.thread_count())
    candidates = [c for recs, _ in results for c in recs]
    branches = [b for _, b in results]
    best = _select(candidates, floor)
    return CoverageResult(best, candidates, branches, floor, J, cap)


def approximate_origin_ellipsoid(a: PointSet, cfg: AlgoConfig, min_coverage: float | None = None) -> CoverageResult:
    """Origin-centered variant: no lift, no bounding balls.

    Meant for point sets symmetric about the origin, whose minimum enclosing
    ellipsoid is origin-centered anyway.  The dual lives in ``R^d`` so
    rounds use ``J = ceil(c alpha n / (gamma d))``.
    """
    n, d = a.n, a.dim
    if n == 0:
        raise ValueError("empty point set")
    floor = cfg.coverage_floor(n) if min_coverage is None else float(min_coverage)
    if cfg.alpha <= 1.0 / n:
        J = 0
    else:
        J = cfg.rounds(n, d)
    cap = cfg.removal_cap(n)
    restarts = cfg.restarts_for(n) if J > 0 else 1

    def to_world(e):
        return e

    tasks = []
    for s in range(restarts):
        rng = np.random.default_rng([cfg.seed, s])
        tasks.append(lambda s=s, rng=rng: _branch(
            a, a, to_world, origin=True, ball_id=None, restart=s,
            J=J, cap=cap, cfg=cfg, rng=rng))
    results = _run_branches(tasks, cfg.thread_count())
    candidates = [c for recs, _ in results for c in recs]
    branches = [b for _, b in results]
    best = _select(candidates, floor)
    return CoverageResult(best, candidates, branches, floor, J, cap)
