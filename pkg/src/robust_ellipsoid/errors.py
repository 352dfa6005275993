"""Exception types shared across the package."""

import numpy as np


class EllipsoidError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(EllipsoidError, ValueError):
    pass


class DegenerateEllipsoid(EllipsoidError):
    """The shape matrix has a non-positive eigenvalue (zero volume)."""


class RankDeficient(EllipsoidError):
    """Points do not span the ambient space of the problem being solved.

    ``rank`` is the numerical rank and ``basis`` an orthonormal (rank, k)
    array whose rows span the points (linear span for origin-centered
    problems, direction space of the affine hull for free-center ones).
    ``ellipsoid`` is filled in by callers that can build the flat minimum
    enclosing ellipsoid.
    """

    def __init__(self, rank, basis, message=None, ellipsoid=None):
        self.rank = int(rank)
        self.basis = np.asarray(basis)
        self.ellipsoid = ellipsoid
        super().__init__(message or f"points span only {self.rank} dimensions")


class NotATightFrame(EllipsoidError, ValueError):
    pass


class NoFeasibleCandidate(EllipsoidError):
    """No recorded candidate reached the coverage floor."""

    def __init__(self, floor, candidates, message=None):
        self.floor = floor
        self.candidates = list(candidates)
        super().__init__(
            message
            or f"no candidate covers at least {floor:.6g} points "
            f"({len(self.candidates)} candidates recorded)"
        )


class ZeroVector(EllipsoidError):
    pass


class GraphNotRegular(EllipsoidError, ValueError):
    pass


class BudgetExceeded(EllipsoidError):
    pass
