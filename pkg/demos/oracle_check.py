"""
Checking the search against exhaustive enumeration
===================================================

For ten points in the plane every 8-subset can be tried.  The search
never beats that optimum, and it stays within its volume allowance.
"""

import math

import numpy as np

from robust_ellipsoid import (
    AlgoConfig,
    PointSet,
    approximate_coverage_ellipsoid,
    brute_force_min_k_ellipsoid,
    condition_number,
)

print(" seed   optimum    search   allowance")
for seed in range(6):
    a = PointSet.from_array(np.random.default_rng(seed).standard_normal((10, 2)))
    opt = brute_force_min_k_ellipsoid(a, 8)
    # c2 = 0.5 sets the coverage floor to 8 of 10 points
    res = approximate_coverage_ellipsoid(a, AlgoConfig(alpha=0.2, gamma=0.5, coverage_const_c2=0.5, seed=seed))
    allowance = 2 * 0.5 * 3 * math.log(4 * condition_number(opt.ellipsoid))
    print(f"{seed:5d} {opt.log_volume:9.4f} {res.best.log_volume:9.4f} {allowance:10.3f}")
