"""
Recovering a subspace when a few points are off it
===================================================

Unit vectors on a random 3-dimensional subspace of R^6 plus 5% unit
outliers in general position.  PCA mixes the outliers into its top
directions; the ellipsoid route finds the subspace and reports which
points are close to it.
"""

import numpy as np
from scipy.linalg import subspace_angles

from robust_ellipsoid import AlgoConfig, SubspaceConfig, gen_planted_subspace, recover_subspace

inst = gen_planted_subspace(d=6, planted_dim=3, n=500, alpha=0.05, seed=3)
X = inst.points.points

###############################################################################
# Plain PCA for reference: the top 3 right singular vectors.

_, s, vt = np.linalg.svd(X, full_matrices=False)
pca = vt[:3]
print("singular values:", np.round(s, 2))
print("PCA largest principal angle to truth: %.2e rad" % subspace_angles(pca.T, inst.basis.T).max())

###############################################################################
# Ellipsoid-based recovery.  The default jitter scale eps**(4/gamma) is
# tiny; 1e-6 keeps the numbers readable without changing the answer.

cfg = SubspaceConfig(gamma=1 / 3, eps=0.1, eps_star_override=1e-6, seed=3,
                     ellipsoid_cfg=AlgoConfig(alpha=0.05, gamma=1 / 3, seed=3, restarts=2))
res = recover_subspace(inst.points, cfg)
print("ellipsoid eigenvalues:", np.array2string(res.eigenvalues, precision=3))
print(f"recovered dimension {res.dim}, {res.close_count}/{inst.points.n} points within 0.1")
print("largest principal angle to truth: %.2e rad" % subspace_angles(res.basis.T, inst.basis.T).max())

###############################################################################
# Distances of the planted outliers to the recovered subspace.

out = np.setdiff1d(np.arange(inst.points.n), inst.inlier_ids)
print("outlier distances: min %.3f, median %.3f" % (res.distances[out].min(), np.median(res.distances[out])))
