import math

import numpy as np
import pytest

from robust_ellipsoid.coverage import (
    AlgoConfig,
    approximate_coverage_ellipsoid,
    approximate_origin_ellipsoid,
    candidate_bounding_balls,
    removal_round,
)
from robust_ellipsoid.errors import NoFeasibleCandidate
from robust_ellipsoid.geometry import PointSet, coverage, lift, log_volume
from robust_ellipsoid.instances import PlantedEllipsoidSpec, gen_planted_ellipsoid
from robust_ellipsoid.oracle import brute_force_min_k_ellipsoid
from robust_ellipsoid.solver import DualSolution, SolverConfig, solve_dual_origin, solve_mvee


def planted(d, n, beta, alpha, seed):
    return gen_planted_ellipsoid(PlantedEllipsoidSpec(d, n, beta, alpha, rotation_seed=seed, sample_seed=seed))


class TestConfig:
    def test_rounds_and_floor(self):
        cfg = AlgoConfig(alpha=0.05, gamma=0.25)
        assert cfg.rounds(200, 3) == math.ceil(56 * 0.05 * 200 / (0.25 * 3))
        assert cfg.coverage_floor(200) == pytest.approx(40.0)
        assert cfg.removal_cap(200) == 160
        assert cfg.restarts_for(200) == 8

    @pytest.mark.parametrize("kw", [dict(alpha=0.0, gamma=0.5), dict(alpha=0.1, gamma=1.0),
                                    dict(alpha=0.1, gamma=0.5, restarts=0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            AlgoConfig(**kw)

    def test_threads_env(self, monkeypatch):
        monkeypatch.setenv("ROBUST_ELLIPSOID_THREADS", "3")
        assert AlgoConfig(alpha=0.1, gamma=0.5).thread_count() == 3
        assert AlgoConfig(alpha=0.1, gamma=0.5, threads=2).thread_count() == 2


class TestBalls:
    def test_line_example(self):
        a = PointSet.from_array([[0.0], [1.0], [10.0]])
        balls = candidate_bounding_balls(a, 1 / 3, dedupe=False)
        keys = {(b.center_id, b.radius) for b in balls}
        assert (0, 1.0) in keys and (0, 10.0) in keys
        assert (0, 0.0) not in keys
        b01 = next(b for b in balls if (b.center_id, b.radius) == (0, 1.0))
        assert sorted(b01.member_ids.tolist()) == [0, 1] and b01.count == 2

    def test_single_point(self):
        balls = candidate_bounding_balls(PointSet.from_array([[3.0, 4.0]]), 0.5)
        assert len(balls) == 1 and balls[0].radius == 0.0

    def test_planted_ball_exists(self):
        inst = planted(2, 200, 10, 0.05, 3)
        semi = math.sqrt(inst.truth.eigenvalues.max())
        ok = [b for b in candidate_bounding_balls(inst.points, 0.05)
              if set(inst.inlier_ids.tolist()) <= set(b.member_ids.tolist()) and b.radius <= 2 * semi]
        assert ok

    def test_dedupe_and_count(self, rng):
        a = PointSet.from_array(rng.standard_normal((30, 2)))
        full = candidate_bounding_balls(a, 0.2, dedupe=False)
        dd = candidate_bounding_balls(a, 0.2)
        assert len(full) <= 30 * 30 and len(dd) <= len(full)
        sets = [tuple(sorted(b.member_ids.tolist())) for b in dd]
        assert len(sets) == len(set(sets))
        for b in full:
            c = a.points[b.center_id]
            inside = np.linalg.norm(a.points - c, axis=1) <= b.radius
            assert inside.sum() == b.count >= 0.8 * 30 - 1e-9


def _fake_dual(points, w):
    k = points.dim
    return DualSolution(points.ids.copy(), np.asarray(w, float), np.eye(k), np.zeros(points.n), 0.0, 0, True, 1e-7)


class TestRemovalRound:
    def test_injected_weights(self):
        pts = lift(PointSet.from_array(np.random.default_rng(0).standard_normal((5, 2))))
        w = np.zeros(5)
        w[3] = 1.0
        for s in range(20):
            res = removal_round(pts, SolverConfig(), np.random.default_rng(s), dual=_fake_dual(pts, w))
            assert res.removed_ids.tolist() == [3]
        res = removal_round(pts, SolverConfig(), np.random.default_rng(0), dual=_fake_dual(pts, np.zeros(5)))
        assert res.removed_ids.size == 0

    def test_clamps(self):
        pts = lift(PointSet.from_array(np.random.default_rng(0).standard_normal((3, 2))))
        res = removal_round(pts, SolverConfig(), np.random.default_rng(0), dual=_fake_dual(pts, [1.0 + 1e-7, 2.0, -1e-9]))
        assert res.removed_ids.tolist() == [0, 1]

    def test_mean_removed(self):
        pts = lift(PointSet.from_array(np.random.default_rng(11).standard_normal((100, 2))))
        dual = solve_dual_origin(pts)
        rng = np.random.default_rng(11)
        counts = [removal_round(pts, SolverConfig(), rng, dual=dual).removed_ids.size for _ in range(500)]
        assert abs(np.mean(counts) - 3.0) <= 3 * math.sqrt(3)
        # and the tighter statistical check: standard error is below 0.08
        assert abs(np.mean(counts) - dual.clamped_weights().sum()) <= 0.3

    def test_flat_short_circuit(self):
        pts = lift(PointSet.from_array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))
        res = removal_round(pts, SolverConfig(), np.random.default_rng(0))
        assert res.dual is None and res.removed_ids.size == 0
        assert res.flat.degenerate


@pytest.fixture(scope="module")
def run():
    inst = planted(2, 120, 6, 0.1, 2)
    cfg = AlgoConfig(alpha=0.1, gamma=0.3, seed=2, max_balls=4, restarts=3, threads=1)
    return inst, cfg, approximate_coverage_ellipsoid(inst.points, cfg)


class TestPipeline:
    def test_trivial_alpha(self, rng):
        a = PointSet.from_array(rng.standard_normal((20, 2)))
        res = approximate_coverage_ellipsoid(a, AlgoConfig(alpha=0.04, gamma=0.5))
        e, _ = solve_mvee(a)
        assert len(res.candidates) == 1
        assert np.allclose(res.best.ellipsoid.shape, e.shape) and res.best.coverage_count == 20

    def test_planted_strong_coverage(self):
        # c2 = 1 raises the floor to 0.8n; at the default 4.0 the floor is 0.2n
        inst = planted(2, 200, 10, 0.05, 5)
        cfg = AlgoConfig(alpha=0.05, gamma=0.25, coverage_const_c2=1.0, seed=5, restarts=2, threads=1)
        res = approximate_coverage_ellipsoid(inst.points, cfg)
        assert res.best.coverage_count >= 0.8 * 200
        assert res.best.log_volume <= log_volume(inst.truth) + 2 * 0.25 * 3 * math.log(40)

    def test_planted_default_floor(self):
        inst = planted(2, 200, 10, 0.05, 5)
        cfg = AlgoConfig(alpha=0.05, gamma=0.25, seed=5, max_balls=3, restarts=2, threads=1)
        res = approximate_coverage_ellipsoid(inst.points, cfg)
        assert res.floor == pytest.approx(40.0) and res.best.coverage_count >= 40
        assert res.best.log_volume <= log_volume(inst.truth) + 2 * 0.25 * 3 * math.log(40)

    def test_branch_invariants(self, run):
        inst, cfg, res = run
        by_branch = {}
        for c in res.candidates:
            by_branch.setdefault((c.ball_id, c.restart), []).append(c)
        assert len(by_branch) == len(res.branches)
        for b in res.branches:
            recs = sorted(by_branch[(b.ball_id, b.restart)], key=lambda c: c.round)
            assert [c.round for c in recs] == list(range(len(recs)))
            assert b.solves == len(recs) <= res.planned_rounds + 1
            if b.reached_end:
                assert b.solves == res.planned_rounds + 1
            for prev, cur in zip(recs, recs[1:]):
                assert set(cur.survivor_ids.tolist()) <= set(prev.survivor_ids.tolist())
                assert cur.log_volume <= prev.log_volume + 10 * cfg.solver.eta * 3
            for c in recs:
                assert c.removed_total <= res.removal_cap
                assert c.removed_total == recs[0].survivor_ids.size - c.survivor_ids.size
                cov = coverage(c.ellipsoid, inst.points)
                assert cov.count == c.coverage_count

    def test_selection(self, run):
        _, _, res = run
        ok = [c for c in res.candidates if c.coverage_count >= res.floor]
        assert res.best.log_volume == min(c.log_volume for c in ok)

    def test_deterministic_across_threads(self, run):
        inst, cfg, res = run
        other = approximate_coverage_ellipsoid(inst.points, AlgoConfig(**{**cfg.__dict__, "threads": 4}))
        assert len(other.candidates) == len(res.candidates)
        for x, y in zip(res.candidates, other.candidates):
            assert np.array_equal(x.ellipsoid.shape, y.ellipsoid.shape)
            assert np.array_equal(x.survivor_ids, y.survivor_ids)
        assert np.array_equal(other.best.ellipsoid.center, res.best.ellipsoid.center)

    def test_seed_changes_streams(self, run):
        inst, cfg, res = run
        other = approximate_coverage_ellipsoid(inst.points, AlgoConfig(**{**cfg.__dict__, "seed": 99}))
        assert [c.survivor_ids.size for c in other.candidates] != [c.survivor_ids.size for c in res.candidates]

    def test_oracle_lower_bounds(self):
        for seed in range(5):
            a = PointSet.from_array(np.random.default_rng(seed).standard_normal((10, 2)))
            res = approximate_coverage_ellipsoid(a, AlgoConfig(alpha=0.2, gamma=0.5, seed=seed, threads=1))
            opt = brute_force_min_k_ellipsoid(a, res.best.coverage_count)
            assert res.best.log_volume >= opt.log_volume - 1e-6

    def test_no_feasible(self, rng):
        a = PointSet.from_array(rng.standard_normal((30, 2)))
        with pytest.raises(NoFeasibleCandidate) as info:
            approximate_origin_ellipsoid(a, AlgoConfig(alpha=0.1, gamma=0.5, restarts=1), min_coverage=31)
        assert info.value.candidates and info.value.floor == 31

    def test_gamma_warning(self, rng):
        a = PointSet.from_array(rng.standard_normal((12, 3)))
        with pytest.warns(UserWarning, match="gamma"):
            approximate_coverage_ellipsoid(a, AlgoConfig(alpha=0.1, gamma=0.9, max_balls=1, restarts=1, threads=1))


class TestOrigin:
    def test_symmetric_center_matches_lifted(self, rng):
        x = rng.standard_normal((15, 2))
        a = PointSet.from_array(np.vstack([x, -x]))
        e, _ = solve_mvee(a, SolverConfig(eta=1e-10))
        assert np.allclose(e.center, 0, atol=1e-6)
        res = approximate_origin_ellipsoid(a, AlgoConfig(alpha=0.01, gamma=0.5))
        assert np.allclose(res.best.ellipsoid.shape, e.shape, atol=1e-5)

    def test_origin_rounds(self, rng):
        a = PointSet.from_array(rng.standard_normal((60, 3)))
        cfg = AlgoConfig(alpha=0.1, gamma=0.5, restarts=2, threads=1)
        res = approximate_origin_ellipsoid(a, cfg)
        assert res.planned_rounds == cfg.rounds(60, 3)
        assert np.allclose(res.best.ellipsoid.center, 0)
