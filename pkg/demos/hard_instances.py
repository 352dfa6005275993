"""
Edge-vector instances over regular graphs
=========================================

Each edge ``(i, j)`` of a regular graph becomes the unit vector
``(e_i + e_j)/sqrt(2)``.  The span of a set of such vectors is tied to
how many vertices the edges touch, which is what makes small-volume
ellipsoids on these point sets hard to find.
"""

import numpy as np

from robust_ellipsoid import SseInstanceSpec, gen_sse_instance, span_bounds_check
from robust_ellipsoid.instances import cycle_graph, hypercube_graph

for name, g in [("C5", cycle_graph(5)), ("C6", cycle_graph(6)), ("Q3", hypercube_graph(3))]:
    full = span_bounds_check(g.edges, g)
    print(f"{name}: {len(g.edges)} edges on {g.n_vertices} vertices, span {full.dim_span} "
          f"(between {full.lower:g} and {full.upper})")

###############################################################################
# Odd cycles give full rank, even ones lose one dimension.  Random edge
# subsets always land between half the touched vertices and all of them.

rng = np.random.default_rng(0)
g = hypercube_graph(4)
for _ in range(5):
    F = [g.edges[i] for i in rng.choice(len(g.edges), size=int(rng.integers(1, 12)), replace=False)]
    c = span_bounds_check(F, g)
    print(f"  {len(F):2d} edges: {c.lower:4.1f} <= {c.dim_span:2d} <= {c.upper:2d}  ok={c.ok}")

###############################################################################
# The generated point set adds copies of the origin as padding and jitters
# everything slightly before renormalizing.

inst = gen_sse_instance(SseInstanceSpec(cycle_graph(8), delta=0.25, eta_pad=0.5, cap_C=2, seed=1))
P = inst.points.points
print(f"{P.shape[0]} points in R^{P.shape[1]}, "
      f"{sum(v is None for v in inst.edge_map.values())} from padding, norms in "
      f"[{np.linalg.norm(P, axis=1).min():.6f}, {np.linalg.norm(P, axis=1).max():.6f}]")
