"""Minimum-volume enclosing ellipsoids through the D-optimal design dual.

The origin-centered dual

    max  log det(sum_i w_i a_i a_i^T)   s.t.  w >= 0,  sum_i w_i = k

is solved by Frank-Wolfe coordinate ascent with away steps (the
Todd-Yildirim variant of Khachiyan's method).  Iterates keep ``u = w / k``
on the simplex together with ``V^{-1}`` for ``V = sum_i u_i a_i a_i^T``,
updated by rank-one formulas.  Leverages are reported in the scaled form
``g_i = a_i^T V^{-1} a_i = k a_i^T M^{-1} a_i``, so the optimality
certificate reads ``max_i g_i <= (1 + eta) k`` and positive-weight points
sit at ``g_i = k``.

Free-center ellipsoids go through the lift ``a -> (a, 1)`` and a Schur
complement on the lifted moment matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
from numba import njit

from .errors import DimensionMismatch, NotATightFrame, RankDeficient
from .geometry import Ellipsoid, PointSet, lift

# lambda_min(A^T A) below this fraction of trace/k means "does not span"
RANK_RTOL = 1e-14
# share of a warm start handed to a pivoted spanning subset when the
# supplied weights alone are singular
WARM_PIVOT_MASS = 1e-3
# Frank-Wolfe runs to this tolerance before the interior-point polish
POLISH_FROM = 1e-2
POLISH_ROUNDS = 20
POLISH_MAX_FREE = 1500
POLISH_BAND = 0.05
IP_ITERS = 80


@dataclass(frozen=True)
class SolverConfig:
    eta: float = 1e-7
    max_iters: int | None = None
    support_threshold: float = 1e-8
    ridge: float = 0.0
    refresh_every: int = 200
    polish: bool = True

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.ridge < 0:
            raise ValueError("ridge must be non-negative")

    def iteration_budget(self, n: int, k: int) -> int:
        if self.max_iters is not None:
            return self.max_iters
        return max(1, math.ceil(100 * k * math.log(max(n, 2))))


@dataclass(frozen=True, eq=False)
class DualSolution:
    """Weights on the points of one origin-centered dual solve.

    ``weights`` sum to ``k`` and follow the order of ``ids``; ``moment`` is
    ``sum_i w_i a_i a_i^T``; ``leverages`` are ``k a_i^T moment^{-1} a_i``.
    ``converged`` is False when the iteration budget ran out first, in which
    case the certificate is stale.
    """

    ids: np.ndarray
    weights: np.ndarray
    moment: np.ndarray
    leverages: np.ndarray
    logdet: float
    iterations: int
    converged: bool
    eta: float
    support_threshold: float = 1e-8

    @property
    def k(self) -> int:
        return self.moment.shape[0]

    @property
    def max_leverage(self) -> float:
        return float(self.leverages.max()) if self.leverages.size else 0.0

    @property
    def support_ids(self) -> np.ndarray:
        return self.ids[self.weights > self.support_threshold]

    def clamped_weights(self) -> np.ndarray:
        return np.clip(self.weights, 0.0, 1.0)

    def weight_of(self, ids) -> float:
        """Total weight placed on the given ids."""
        return float(self.weights[np.isin(self.ids, np.asarray(ids, dtype=np.int64))].sum())


def _span(X, rtol=RANK_RTOL):
    """Eigen-split of the uniform second moment; returns (rank, lam, vec, keep)."""
    n, k = X.shape
    V0 = X.T @ X / max(n, 1)
    lam, vec = np.linalg.eigh(0.5 * (V0 + V0.T))
    thresh = rtol * max(np.trace(V0), 0.0) / k
    keep = lam > thresh if np.trace(V0) > 0 else np.zeros(k, bool)
    return int(keep.sum()), lam, vec, keep


def _pivot_support(Xw, k):
    """k well-spread linearly independent rows (QR with column pivoting)."""
    _, _, piv = sla.qr(Xw.T, mode="economic", pivoting=True)
    return piv[:k]


def _refresh(Xw, u):
    V = (Xw.T * u) @ Xw
    Vinv = np.linalg.inv(V)
    Vinv = 0.5 * (Vinv + Vinv.T)
    g = np.einsum("ij,ij->i", Xw @ Vinv, Xw)
    return Vinv, g


@njit(cache=True, nogil=True)
def _refresh_nb(Xw, u):
    n, k = Xw.shape
    V = np.zeros((k, k))
    for l in range(n):
        ul = u[l]
        if ul > 0.0:
            for p in range(k):
                xp = ul * Xw[l, p]
                for q in range(k):
                    V[p, q] += xp * Xw[l, q]
    Vinv = np.linalg.inv(V)
    Vinv = 0.5 * (Vinv + Vinv.T)
    Y = Xw @ Vinv
    g = np.empty(n)
    for l in range(n):
        s = 0.0
        for p in range(k):
            s += Y[l, p] * Xw[l, p]
        g[l] = s
    return Vinv, g


@njit(cache=True, nogil=True)
def _ascent(Xw, u, eta, max_iters, refresh_every, two_sided=True):
    """Frank-Wolfe with away steps on log det(sum u_i x_i x_i^T).

    Stops once ``max g <= (1 + eta) k`` and, when ``two_sided``, also
    ``min g >= (1 - eta) k`` over the support.  Returns
    ``(u, g, iterations, converged)``; ``u`` is updated in place.
    """
    n, k = Xw.shape
    Vinv, g = _refresh_nb(Xw, u)
    vx = np.empty(k)
    it = 0
    since = 0
    converged = False
    while True:
        j = 0
        i = -1
        for l in range(n):
            if g[l] > g[j]:
                j = l
            if u[l] > 0.0 and (i < 0 or g[l] < g[i]):
                i = l
        g_plus = g[j]
        g_minus = g[i]
        eps_plus = g_plus / k - 1.0
        eps_minus = 1.0 - g_minus / k
        if eps_plus <= eta and (eps_minus <= eta or not two_sided):
            if since == 0:
                converged = True
                break
            # never certify from an incrementally updated inverse
            Vinv, g = _refresh_nb(Xw, u)
            since = 0
            continue
        if it >= max_iters:
            break

        drop = False
        if eps_plus >= eps_minus or u[i] >= 1.0:
            idx = j
            tau = (g_plus - k) / (k * (g_plus - 1.0))
        else:
            idx = i
            lo = -u[i] / (1.0 - u[i])
            if g_minus <= 1.0:
                tau = lo
            else:
                tau = max((g_minus - k) / (k * (g_minus - 1.0)), lo)
            drop = tau == lo

        it += 1
        if tau >= 1.0 - 1e-12:
            u[:] = 0.0
            u[idx] = 1.0
            Vinv, g = _refresh_nb(Xw, u)
            since = 0
            continue

        for p in range(k):
            s = 0.0
            for q in range(k):
                s += Vinv[p, q] * Xw[idx, q]
            vx[p] = s
        coef = tau / ((1.0 - tau) + tau * g[idx])
        scale = 1.0 / (1.0 - tau)
        for p in range(k):
            for q in range(k):
                Vinv[p, q] = (Vinv[p, q] - coef * vx[p] * vx[q]) * scale
        keep = 1.0 - tau
        for l in range(n):
            h = 0.0
            for p in range(k):
                h += Xw[l, p] * vx[p]
            g[l] = (g[l] - coef * h * h) * scale
            u[l] *= keep
        u[idx] += tau
        if drop or u[idx] < 0.0:
            u[idx] = 0.0
        since += 1
        if since >= refresh_every:
            tot = u.sum()
            for l in range(n):
                u[l] /= tot
            Vinv, g = _refresh_nb(Xw, u)
            since = 0
    return u, g, it, converged


def _certified(g, u, eta, k):
    return g.max() <= (1.0 + eta) * k and g[u > 0].min() >= (1.0 - eta) * k


@njit(cache=True, nogil=True)
def _interior(X, u0, gap_tol, max_iters=IP_ITERS):
    """Primal-dual interior point for the design problem restricted to ``X``.

    Solves ``g(u) + z - lam = 0``, ``u z = mu``, ``sum u = 1`` by Newton
    steps while driving ``mu`` to zero; ``-H`` with
    ``H_ij = (x_i^T V^{-1} x_j)^2`` is the Hessian of ``log det V(u)``.
    Returns ``(u, z, ok)``.
    """
    m, k = X.shape
    u = 0.5 * u0 / u0.sum() + 0.5 / m
    z = np.empty(m)
    lam = float(k)
    sigma = 0.1
    kkt = np.zeros((m + 1, m + 1))
    rhs = np.empty(m + 1)
    dz = np.empty(m)
    for it in range(max_iters):
        V = np.zeros((k, k))
        for i in range(m):
            for p in range(k):
                xp = u[i] * X[i, p]
                for q in range(k):
                    V[p, q] += xp * X[i, q]
        # V is positive definite as long as u > 0 on a spanning set
        L = np.linalg.cholesky(V)
        Y = np.linalg.solve(L, X.T)
        B = Y.T @ Y
        if it == 0:
            for i in range(m):
                z[i] = max(lam - B[i, i], 0.0) + 1e-2 * k / m
        gap = 0.0
        rmax = 0.0
        for i in range(m):
            gap += u[i] * z[i]
            rmax = max(rmax, abs(B[i, i] + z[i] - lam))
        if rmax <= 1e-12 * k and gap <= gap_tol:
            return u, z, True
        mu = sigma * gap / m
        for i in range(m):
            for j in range(m):
                kkt[i, j] = B[i, j] * B[i, j]
            kkt[i, i] += z[i] / u[i]
            kkt[i, m] = 1.0
            kkt[m, i] = 1.0
            rhs[i] = B[i, i] + z[i] - lam + (mu - u[i] * z[i]) / u[i]
        kkt[m, m] = 0.0
        rhs[m] = 1.0 - u.sum()
        step = np.linalg.solve(kkt, rhs)
        a = 1.0
        for i in range(m):
            dz[i] = (mu - u[i] * z[i] - z[i] * step[i]) / u[i]
            if step[i] < 0.0:
                a = min(a, -0.99 * u[i] / step[i])
            if dz[i] < 0.0:
                a = min(a, -0.99 * z[i] / dz[i])
        for i in range(m):
            u[i] += a * step[i]
            z[i] += a * dz[i]
        lam += a * step[m]
        sigma = 0.01 if a > 0.9 else 0.1
    return u, z, False


def _safe_interior(X, u0, gap_tol):
    try:
        return _interior(np.ascontiguousarray(X), np.ascontiguousarray(u0), float(gap_tol), IP_ITERS)
    except np.linalg.LinAlgError:
        return u0, u0, False


def _polish(Xw, u, eta, rounds=POLISH_ROUNDS, max_free=POLISH_MAX_FREE):
    """Finish a coarse Frank-Wolfe point with interior-point solves.

    Candidates are the support points with leverage near ``k`` plus the
    worst ``2k`` points whose leverage exceeds the certificate.  After each
    interior solve, weights that are clearly inactive (``u_i < z_i / k``)
    are dropped and the survivors are solved again on their own; then the
    certificate is checked on all points and the worst violators join the
    candidate set for the next round.
    Returns ``(u, g, rounds, converged)``.
    """
    n, k = Xw.shape
    _, g = _refresh(Xw, u)
    cand = (u > 0) & (g >= (1.0 - POLISH_BAND) * k)
    viol = np.flatnonzero((g > (1.0 + eta) * k) & ~cand)
    cand[viol[np.argsort(-g[viol], kind="stable")[: 2 * k]]] = True
    for r in range(rounds):
        idx = np.flatnonzero(cand)
        if idx.size > max_free:
            return u, g, r, False
        uc, z, ok = _safe_interior(Xw[idx], np.maximum(u[idx], 0.0), 1e-3 * eta * k)
        if not ok:
            return u, g, r, False
        live = idx[uc >= z / k]
        if live.size < idx.size:
            # re-solve on the survivors so the dropped mass is not lost
            uc, z, ok = _safe_interior(Xw[live], uc[uc >= z / k], 1e-3 * eta * k)
            if not ok:
                return u, g, r, False
            idx = live
            uc = np.where(uc < z / k, 0.0, uc)
        trial = np.zeros(n)
        trial[idx] = uc / uc.sum()
        try:
            _, g_trial = _refresh(Xw, trial)
        except np.linalg.LinAlgError:
            return u, g, r, False
        u, g = trial, g_trial
        if _certified(g, u, eta, k):
            return u, g, r + 1, True
        # bring in the worst violators only; on degenerate data hundreds of
        # points can sit just above the certificate
        viol = np.flatnonzero((g > (1.0 + eta) * k) & ~cand)
        cand[viol[np.argsort(-g[viol], kind="stable")[: 2 * k]]] = True
    return u, g, rounds, False


def _nonsingular(Xw, u):
    V = (Xw.T * u) @ Xw
    lam = np.linalg.eigvalsh(0.5 * (V + V.T))
    return lam[0] > 1e-10 * max(lam[-1], 0.0)


def _optimize(Xw, u0, cfg, budget):
    """Frank-Wolfe to a coarse tolerance, interior-point polish, Frank-Wolfe fallback."""
    Xw = np.ascontiguousarray(Xw)
    eta = float(cfg.eta)
    coarse = max(eta, POLISH_FROM)
    if not cfg.polish or coarse == eta:
        return _ascent(Xw, u0.copy(), eta, int(budget), int(cfg.refresh_every))
    u, g, iters, converged = _ascent(Xw, u0.copy(), coarse, int(budget), int(cfg.refresh_every), False)
    if not converged:
        return u, g, iters, converged
    u, g, rounds, converged = _polish(Xw, u.copy(), eta)
    iters += rounds
    if not converged and iters < budget:
        u, g, more, converged = _ascent(Xw, u.copy(), eta, int(budget - iters), int(cfg.refresh_every))
        iters += more
    return u, g, iters, converged


def _initial_weights(Xw, init, n, k):
    if init is None or (isinstance(init, str) and init == "uniform"):
        return np.full(n, 1.0 / n)
    if isinstance(init, str):
        if init != "pivoted":
            raise ValueError(f"unknown init {init!r}")
        u = np.zeros(n)
        u[_pivot_support(Xw, k)] = 1.0 / k
        return u
    u = np.clip(np.asarray(init, dtype=float).reshape(-1), 0.0, None)
    if u.shape[0] != n:
        raise ValueError("init weights must have one entry per point")
    piv = _pivot_support(Xw, k)
    if u.sum() <= 0:
        u = np.zeros(n)
        u[piv] = 1.0 / k
        return u
    u = u / u.sum()
    if _nonsingular(Xw, u):
        return u
    # top up with a spanning set so the start is nonsingular
    u = (1.0 - WARM_PIVOT_MASS) * u
    u[piv] += WARM_PIVOT_MASS / k
    return u


def solve_dual_origin(a, cfg: SolverConfig | None = None, init=None) -> DualSolution:
    """Maximize ``log det(sum_i w_i a_i a_i^T)`` over ``w >= 0, sum w = k``.

    Parameters
    ----------
    a : PointSet or (n, k) array
    cfg : SolverConfig
    init : None, "uniform", "pivoted" or an array of starting weights
        Uniform weights ``k/n`` by default.  Array starts are used as given
        when nonsingular, otherwise topped up with a pivoted spanning subset.

    Raises
    ------
    RankDeficient
        If the points do not span ``R^k`` (and ``cfg.ridge == 0``).
    """
    cfg = cfg or SolverConfig()
    if not isinstance(a, PointSet):
        a = PointSet.from_array(np.atleast_2d(a))
    X = a.points
    n, k = X.shape
    if n == 0:
        raise RankDeficient(0, np.zeros((0, k)), "no points to solve on")
    rank, lam, vec, keep = _span(X)
    if rank < k:
        if cfg.ridge > 0:
            return _ridge_solve(a, cfg, vec[:, keep], init)
        raise RankDeficient(rank, vec[:, keep][:, ::-1].T.copy())

    # tie-break on lowest id: work in ascending-id order
    order = np.argsort(a.ids, kind="stable")
    Xs = X[order]
    # whitening keeps thin instances well conditioned; leverages and the
    # optimal weights are invariant under it
    T = vec / np.sqrt(lam)
    Xw = Xs @ T
    if init is not None and not isinstance(init, str):
        init = np.asarray(init, dtype=float)[order]
    u0 = _initial_weights(Xw, init, n, k)
    u, g, iters, converged = _optimize(Xw, u0, cfg, cfg.iteration_budget(n, k))

    inv = np.empty_like(order)
    inv[order] = np.arange(n)
    u = u[inv]
    g = g[inv]
    w = k * u
    Vw = (Xw.T * u[order]) @ Xw
    logdet = float(k * math.log(k) + np.linalg.slogdet(Vw)[1] + np.sum(np.log(lam)))
    moment = (X.T * w) @ X
    return DualSolution(
        ids=a.ids.copy(),
        weights=w,
        moment=0.5 * (moment + moment.T),
        leverages=g,
        logdet=logdet,
        iterations=iters,
        converged=converged,
        eta=cfg.eta,
        support_threshold=cfg.support_threshold,
    )


def _ridge_solve(a, cfg, basis_cols, init):
    """Solve inside the span and pad the moment with a small isotropic term."""
    X = a.points
    n, k = X.shape
    r = basis_cols.shape[1]
    if r == 0:
        raise RankDeficient(0, np.zeros((0, k)), "all points are zero")
    inner = solve_dual_origin(PointSet(X @ basis_cols, a.ids), SolverConfig(eta=cfg.eta, max_iters=cfg.max_iters), init)
    w = inner.weights * (k / r)
    moment = (X.T * w) @ X
    P = np.eye(k) - basis_cols @ basis_cols.T
    moment = moment + cfg.ridge * (np.trace(moment) / k) * P
    moment = 0.5 * (moment + moment.T)
    sign, logdet = np.linalg.slogdet(moment)
    g = k * np.einsum("ij,ij->i", np.linalg.solve(moment, X.T).T, X)
    return DualSolution(a.ids.copy(), w, moment, g, float(logdet), inner.iterations,
                        inner.converged, cfg.eta, cfg.support_threshold)


def extract_primal_origin(sol: DualSolution) -> Ellipsoid:
    """Origin-centered ellipsoid ``{x : x^T M^{-1} x <= 1}`` from a dual solve.

    The moment matrix is inflated by ``max(1, max_leverage / k)`` so every
    point stays inside even when the solve is only approximate.
    """
    k = sol.k
    scale = max(1.0, sol.max_leverage / k)
    return Ellipsoid(np.zeros(k), sol.moment * scale)


def free_center_from_lifted(sol: DualSolution, a: PointSet) -> Ellipsoid:
    """Free-center ellipsoid in ``R^d`` from a dual solve on ``lift(a)``.

    ``c = sum w_i a_i / (d+1)``, ``M = sum w_i (a_i - c)(a_i - c)^T`` and the
    shape is ``d/(d+1) M``, inflated so that every point of ``a`` is covered.
    """
    d = a.dim
    if sol.k != d + 1:
        raise DimensionMismatch(f"dual solved in dim {sol.k}, points have dim {d}")
    w = sol.weights
    c = w @ a.points / (d + 1)
    Y = a.points - c
    M = (Y.T * w) @ Y
    shape = (d / (d + 1)) * M
    # lifted leverage g = (d+1)(q_M + 1/(d+1)) and (x-c)^T shape^{-1} (x-c) = (g - 1)/d
    q_max = (sol.max_leverage - 1.0) / d if d > 0 else 0.0
    return Ellipsoid(c, shape * max(1.0, q_max))


def solve_mvee(a: PointSet, cfg: SolverConfig | None = None, init=None):
    """Free-center minimum-volume enclosing ellipsoid of ``a``.

    Returns ``(ellipsoid, dual)`` where ``dual`` lives on the lifted points
    (weights sum to ``d + 1``).  If the points lie on a proper affine flat,
    raises :class:`RankDeficient` with ``.ellipsoid`` set to the zero-volume
    enclosing ellipsoid inside that flat.
    """
    cfg = cfg or SolverConfig()
    try:
        sol = solve_dual_origin(lift(a), cfg, init)
    except RankDeficient as err:
        flat = flat_mvee(a, cfg)
        basis = flat.flat_basis()
        raise RankDeficient(basis.shape[0], basis, f"points span an affine flat of dim {basis.shape[0]}", flat) from err
    return free_center_from_lifted(sol, a), sol


def flat_mvee(a: PointSet, cfg: SolverConfig | None = None) -> Ellipsoid:
    """Minimum enclosing ellipsoid of ``a`` inside its affine hull (maybe degenerate)."""
    cfg = cfg or SolverConfig()
    d = a.dim
    if a.n == 0:
        raise RankDeficient(0, np.zeros((0, d)), "no points")
    c0 = a.points.mean(axis=0)
    Y = a.points - c0
    _, s, vt = np.linalg.svd(Y, full_matrices=False)
    if s.size == 0 or s[0] <= 1e-300:
        return Ellipsoid(c0, np.zeros((d, d)))
    r = int(np.sum(s > 1e-7 * s[0]))
    B = vt[:r]
    if r == d:
        e, _ = solve_mvee(a, cfg)
        return e
    inner, _ = solve_mvee(PointSet(Y @ B.T, a.ids), cfg)
    return Ellipsoid(c0 + B.T @ inner.center, B.T @ inner.shape @ B)


def span_mvee_origin(a: PointSet, cfg: SolverConfig | None = None) -> Ellipsoid:
    """Origin-centered minimum enclosing ellipsoid inside the linear span of ``a``."""
    cfg = cfg or SolverConfig()
    k = a.dim
    if a.n == 0:
        return Ellipsoid(np.zeros(k), np.zeros((k, k)))
    _, s, vt = np.linalg.svd(a.points, full_matrices=False)
    if s[0] <= 1e-300:
        return Ellipsoid(np.zeros(k), np.zeros((k, k)))
    r = int(np.sum(s > 1e-7 * s[0]))
    B = vt[:r]
    inner = extract_primal_origin(solve_dual_origin(PointSet(a.points @ B.T, a.ids), cfg))
    return Ellipsoid(np.zeros(k), B.T @ inner.shape @ B)


class SlacknessEntry(NamedTuple):
    id: int
    weight: float
    leverage: float
    residual: float


def slackness_residuals(sol: DualSolution, a: PointSet) -> list[SlacknessEntry]:
    """Per point ``w_i (leverage_i / k - 1)``; zero at an exact optimum."""
    if a.dim != sol.k:
        raise DimensionMismatch(f"points have dim {a.dim}, dual has dim {sol.k}")
    if a.n != sol.ids.size or not np.array_equal(np.sort(a.ids), np.sort(sol.ids)):
        raise DimensionMismatch("points and dual solution cover different ids")
    pos = {int(i): p for p, i in enumerate(sol.ids)}
    idx = np.array([pos[int(i)] for i in a.ids], dtype=np.int64)
    w = sol.weights[idx]
    k = sol.k
    cho = sla.cho_factor(sol.moment)
    lev = k * np.einsum("ij,ij->i", sla.cho_solve(cho, a.points.T).T, a.points)
    res = w * (lev / k - 1.0)
    return [SlacknessEntry(int(i), float(wi), float(li), float(ri)) for i, wi, li, ri in zip(a.ids, w, lev, res)]


def brascamp_lieb_gap(P, weights, vectors, *, norm_tol=1e-8, iso_tol=1e-6) -> float:
    """``sum_i w_i log(b_i^T P b_i) - log det P`` for a weighted tight frame.

    Non-negative whenever ``sum_i w_i b_i b_i^T = I`` with unit ``b_i``.
    """
    P = np.asarray(P, dtype=float)
    w = np.asarray(weights, dtype=float).reshape(-1)
    B = np.atleast_2d(np.asarray(vectors, dtype=float))
    k = P.shape[0]
    if P.shape != (k, k) or B.shape != (w.size, k):
        raise DimensionMismatch("P, weights and vectors disagree in shape")
    if np.any(w <= 0):
        raise NotATightFrame("frame weights must be positive")
    if np.any(np.abs(np.linalg.norm(B, axis=1) - 1.0) > norm_tol):
        raise NotATightFrame("frame vectors are not unit length")
    if np.linalg.norm((B.T * w) @ B - np.eye(k)) > iso_tol:
        raise NotATightFrame("weighted frame is not isotropic")
    sign, logdet = np.linalg.slogdet(P)
    if sign <= 0:
        raise ValueError("P must be positive definite")
    proj = np.einsum("ij,jk,ik->i", B, P, B)
    return float(w @ np.log(proj) - logdet)


def tight_frame(sol: DualSolution, a: PointSet):
    """Frame ``b_i = M^{-1/2} a_i`` with weights ``w_i`` over positive-weight points."""
    lam, vec = np.linalg.eigh(sol.moment)
    root_inv = (vec / np.sqrt(lam)) @ vec.T
    pos = {int(i): p for p, i in enumerate(a.ids)}
    live = sol.weights > 0
    idx = np.array([pos[int(i)] for i in sol.ids[live]], dtype=np.int64)
    return sol.weights[live].copy(), a.points[idx] @ root_inv


@dataclass(frozen=True, eq=False)
class FreeCenterDual:
    """Free-center dual in ``R^d``: weights summing to ``d``."""

    ids: np.ndarray
    weights: np.ndarray
    center: np.ndarray
    moment: np.ndarray
    iterations: int
    converged: bool

    def ellipsoid(self) -> Ellipsoid:
        return Ellipsoid(self.center, self.moment)

    def lifted_weights(self) -> np.ndarray:
        d = self.center.size
        return self.weights * (d + 1) / d


def solve_dual_free_center(a: PointSet, cfg: SolverConfig | None = None) -> FreeCenterDual:
    """Free-center dual solved directly in ``R^d`` (no lift).

    Coordinate ascent on ``log det sum_i w_i (a_i - c)(a_i - c)^T`` with
    ``c`` the weighted mean and ``sum w = d``.  Moving mass ``tau`` onto
    point ``j`` has the closed-form best step ``(q_j - 1) / (q_j (d + 1))``
    with ``q_j = (a_j - c)^T M^{-1} (a_j - c)``.  Each step rebuilds ``M``
    from scratch; this is a cross-check route, not the production path.
    """
    cfg = cfg or SolverConfig()
    X = a.points
    n, d = X.shape
    if _span(np.hstack([X, np.ones((n, 1))]))[0] < d + 1:
        raise RankDeficient(0, np.zeros((0, d)), "points lie on an affine flat")
    p = np.full(n, 1.0 / n)
    budget = 50 * cfg.iteration_budget(n, d + 1)
    eta = cfg.eta
    it = 0
    converged = False
    while True:
        c = p @ X
        Y = X - c
        C = (Y.T * p) @ Y
        q = np.einsum("ij,ij->i", np.linalg.solve(C, Y.T).T, Y) / d
        j = int(np.argmax(q))
        masked = np.where(p > 0, q, np.inf)
        i = int(np.argmin(masked))
        e_plus, e_minus = q[j] - 1.0, 1.0 - masked[i]
        if e_plus <= eta and e_minus <= eta:
            converged = True
            break
        if it >= budget:
            break
        it += 1
        if e_plus >= e_minus or p[i] >= 1.0:
            idx, tau = j, (q[j] - 1.0) / (q[j] * (d + 1))
            drop = False
        else:
            idx = i
            lo = -p[i] / (1.0 - p[i])
            tau = lo if q[i] <= 0 else max((q[i] - 1.0) / (q[i] * (d + 1)), lo)
            drop = tau == lo
        p *= 1.0 - tau
        p[idx] += tau
        if drop:
            p[idx] = 0.0
        np.clip(p, 0.0, None, out=p)
        p /= p.sum()
    w = d * p
    c = p @ X
    Y = X - c
    M = (Y.T * w) @ Y
    return FreeCenterDual(a.ids.copy(), w, c, 0.5 * (M + M.T), it, converged)
