"""Minimum-volume ellipsoids that cover most of a point set, robust subspace
recovery, and the reference solvers and instance generators around them."""

from .coverage import (
    AlgoConfig,
    BoundingBall,
    CandidateRecord,
    CoverageResult,
    approximate_coverage_ellipsoid,
    approximate_origin_ellipsoid,
    candidate_bounding_balls,
    removal_round,
)
from .errors import (
    BudgetExceeded,
    DegenerateEllipsoid,
    DimensionMismatch,
    EllipsoidError,
    GraphNotRegular,
    NoFeasibleCandidate,
    NotATightFrame,
    RankDeficient,
    ZeroVector,
)
from .geometry import (
    Coverage,
    Ellipsoid,
    PointSet,
    condition_number,
    coverage,
    lift,
    log_unit_ball_volume,
    log_volume,
    symmetrize,
)
from .instances import (
    Graph,
    PlantedEllipsoidSpec,
    SseInstanceSpec,
    gen_planted_ellipsoid,
    gen_planted_subspace,
    gen_sse_instance,
    read_graph,
    span_bounds_check,
    write_graph,
)
from .io import EllipsoidDocument, read_points, write_points
from .oracle import OracleBudget, brute_force_min_k_ellipsoid, high_precision_mvee
from .solver import (
    DualSolution,
    SolverConfig,
    brascamp_lieb_gap,
    extract_primal_origin,
    slackness_residuals,
    solve_dual_free_center,
    solve_dual_origin,
    solve_mvee,
    tight_frame,
)
from .subspace import (
    FatnessStatus,
    SubspaceConfig,
    SubspaceResult,
    fatness_min_eigenvalue,
    perturb_normalize,
    recover_subspace,
)

__version__ = "0.1.0"
