"""Seeded instance generators: planted ellipsoids, planted subspaces and the
edge-vector construction over regular graphs used for hard instances."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import special_ortho_group

from .errors import GraphNotRegular
from .geometry import Ellipsoid, PointSet


@dataclass(frozen=True)
class PlantedEllipsoidSpec:
    dim: int
    n: int
    beta: float
    alpha: float
    outlier_radius_factor: float = 2.0
    center: tuple | None = None
    rotation_seed: int = 0
    sample_seed: int = 0

    def __post_init__(self):
        if self.beta < 1:
            raise ValueError("beta must be >= 1")
        if not 0 <= self.alpha < 1:
            raise ValueError("alpha must lie in [0, 1)")
        if self.dim < 1 or self.n < 1:
            raise ValueError("dim and n must be positive")
        if self.outlier_radius_factor <= 1:
            raise ValueError("outliers must sit outside the planted ellipsoid")

    @property
    def n_outliers(self) -> int:
        return math.floor(self.alpha * self.n + 1e-9)


@dataclass(frozen=True, eq=False)
class PlantedEllipsoid:
    points: PointSet
    truth: Ellipsoid
    inlier_ids: np.ndarray
    outlier_ids: np.ndarray

    def __iter__(self):
        return iter((self.points, self.truth, self.inlier_ids, self.outlier_ids))


def _rotation(d, rng):
    if d == 1:
        return np.ones((1, 1))
    return special_ortho_group.rvs(d, random_state=rng)


def _unit_rows(rng, n, d):
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    while np.any(norms == 0):  # pragma: no cover - measure zero
        bad = norms[:, 0] == 0
        g[bad] = rng.standard_normal((bad.sum(), d))
        norms = np.linalg.norm(g, axis=1, keepdims=True)
    return g / norms


def gen_planted_ellipsoid(spec: PlantedEllipsoidSpec) -> PlantedEllipsoid:
    """Inliers uniform in a beta-conditioned ellipsoid, outliers on a far shell.

    Semi-axes are geometrically spaced from 1 to ``beta``; outliers sit at
    distance ``outlier_radius_factor * beta`` from the center, so they are
    strictly outside.  Inliers come first (ids ``0..n_in-1``).
    """
    d, n = spec.dim, spec.n
    rot = _rotation(d, np.random.default_rng(spec.rotation_seed))
    semi = np.geomspace(1.0, spec.beta, d) if d > 1 else np.array([spec.beta])
    center = np.zeros(d) if spec.center is None else np.asarray(spec.center, dtype=float)
    shape = (rot * semi**2) @ rot.T
    truth = Ellipsoid(center, shape)

    rng = np.random.default_rng(spec.sample_seed)
    n_out = spec.n_outliers
    n_in = n - n_out
    ball = _unit_rows(rng, n_in, d) * rng.random((n_in, 1)) ** (1.0 / d)
    inliers = center + (ball * semi) @ rot.T
    outliers = center + spec.outlier_radius_factor * spec.beta * _unit_rows(rng, n_out, d)
    pts = PointSet(np.vstack([inliers, outliers.reshape(n_out, d)]), np.arange(n))
    return PlantedEllipsoid(pts, truth, np.arange(n_in), np.arange(n_in, n))


@dataclass(frozen=True, eq=False)
class PlantedSubspace:
    points: PointSet
    basis: np.ndarray
    inlier_ids: np.ndarray

    def __iter__(self):
        return iter((self.points, self.basis, self.inlier_ids))


def gen_planted_subspace(d: int, planted_dim: int, n: int, alpha: float, seed: int) -> PlantedSubspace:
    """Unit inliers in a random ``planted_dim`` subspace plus unit outliers in R^d."""
    if not 1 <= planted_dim <= d:
        raise ValueError("need 1 <= planted_dim <= d")
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((d, planted_dim)))
    basis = q.T.copy()
    n_out = math.floor(alpha * n + 1e-9)
    n_in = n - n_out
    inliers = _unit_rows(rng, n_in, planted_dim) @ basis
    inliers /= np.linalg.norm(inliers, axis=1, keepdims=True)
    outliers = _unit_rows(rng, n_out, d)
    pts = PointSet(np.vstack([inliers, outliers]), np.arange(n))
    return PlantedSubspace(pts, basis, np.arange(n_in))


# ---------------------------------------------------------------- graphs

@dataclass(frozen=True)
class Graph:
    n_vertices: int
    edges: tuple

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def regular_degree(self) -> int:
        deg = self.degrees()
        if deg.size == 0 or np.any(deg != deg[0]):
            raise GraphNotRegular(f"degrees range over {sorted(set(deg.tolist()))}")
        return int(deg[0])


def _graph(d, edges):
    es = tuple(sorted({(min(i, j), max(i, j)) for i, j in edges}))
    if any(i == j for i, j in es):
        raise ValueError("self loops are not allowed")
    return Graph(d, es)


def cycle_graph(d: int) -> Graph:
    return _graph(d, [(i, (i + 1) % d) for i in range(d)])


def complete_graph(d: int) -> Graph:
    return _graph(d, [(i, j) for i in range(d) for j in range(i + 1, d)])


def hypercube_graph(k: int) -> Graph:
    d = 2**k
    return _graph(d, [(v, v ^ (1 << b)) for v in range(d) for b in range(k) if v < v ^ (1 << b)])


def circulant_graph(d: int, offsets) -> Graph:
    """Vertex i joined to i +- s for each offset; regular when offsets < d/2."""
    return _graph(d, [(i, (i + s) % d) for i in range(d) for s in offsets])


def read_graph(path) -> Graph:
    """Text format: first line ``d Delta``, then one ``i j`` edge per line (0-indexed)."""
    lines = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    d, delta = int(lines[0][0]), int(lines[0][1])
    g = _graph(d, [(int(i), int(j)) for i, j in lines[1:]])
    if any(not (0 <= v < d) for e in g.edges for v in e):
        raise ValueError("edge endpoint out of range")
    if g.regular_degree() != delta:
        raise GraphNotRegular(f"header says degree {delta}, graph has {g.regular_degree()}")
    return g


def write_graph(g: Graph, path) -> None:
    lines = [f"{g.n_vertices} {g.regular_degree()}"] + [f"{i} {j}" for i, j in g.edges]
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class SseInstanceSpec:
    """``cap_C = inf`` disables the perturbation."""

    graph: Graph
    delta: float
    eta_pad: float
    cap_C: float = 10.0
    seed: int = 0

    @property
    def n_padding(self) -> int:
        m = len(self.graph.edges)
        return int(round(self.eta_pad * m / self.delta))


def eta_for_alpha(alpha: float, delta: float, eps: float) -> float:
    """Padding ratio giving target outlier fraction ``alpha`` in the completeness case."""
    return (delta - (1.0 - eps) * delta**2) / alpha - delta


def edge_vectors(g: Graph) -> np.ndarray:
    U = np.zeros((len(g.edges), g.n_vertices))
    for r, (i, j) in enumerate(g.edges):
        U[r, i] = U[r, j] = 1.0 / math.sqrt(2.0)
    return U


@dataclass(frozen=True, eq=False)
class SseInstance:
    points: PointSet
    edge_map: dict

    def __iter__(self):
        return iter((self.points, self.edge_map))


def gen_sse_instance(spec: SseInstanceSpec) -> SseInstance:
    """One unit vector per edge plus ``T`` origin points, perturbed and normalized.

    ``edge_map`` sends point id to its edge ``(i, j)`` or ``None`` for padding.
    """
    g = spec.graph
    if spec.delta <= 0 or spec.eta_pad < 0:
        raise ValueError("delta must be positive and eta_pad non-negative")
    g.regular_degree()
    d = g.n_vertices
    U = edge_vectors(g)
    T = spec.n_padding
    P = np.vstack([U, np.zeros((T, d))])
    if math.isfinite(spec.cap_C):
        eps_t = float(d) ** (-spec.cap_C)
        if eps_t**2 / d < 1e-300:
            warnings.warn(f"perturbation variance {eps_t**2 / d:.3g} underflows", stacklevel=2)
        rng = np.random.default_rng(spec.seed)
        P = P + rng.standard_normal(P.shape) * (eps_t / math.sqrt(d))
        norms = np.linalg.norm(P, axis=1, keepdims=True)
        P = np.divide(P, norms, out=np.zeros_like(P), where=norms > 0)
    edge_map = {r: e for r, e in enumerate(g.edges)}
    edge_map.update({len(g.edges) + t: None for t in range(T)})
    return SseInstance(PointSet(P, np.arange(P.shape[0])), edge_map)


@dataclass(frozen=True)
class SpanCheck:
    dim_span: int
    lower: float
    upper: int
    ok: bool


def span_bounds_check(edge_subset, graph: Graph) -> SpanCheck:
    """Compare the rank of the chosen edge vectors with their vertex neighborhood.

    ``|N(F)| / 2 <= dim span{u_e : e in F} <= |N(F)|`` where ``N(F)`` is the
    set of endpoints of the edges in ``F``.
    """
    F = [(min(i, j), max(i, j)) for i, j in edge_subset]
    known = set(graph.edges)
    missing = [e for e in F if e not in known]
    if missing:
        raise ValueError(f"edges {missing[:3]} are not in the graph")
    nb = {v for e in F for v in e}
    if not F:
        return SpanCheck(0, 0.0, 0, True)
    U = np.zeros((len(F), graph.n_vertices))
    for r, (i, j) in enumerate(F):
        U[r, i] = U[r, j] = 1.0 / math.sqrt(2.0)
    s = np.linalg.svd(U, compute_uv=False)
    rank = int(np.sum(s > 1e-9 * s[0]))
    lower, upper = len(nb) / 2.0, len(nb)
    return SpanCheck(rank, lower, upper, lower <= rank <= upper)
