"""Exception hierarchy for curvecont.

All failures raised by the numerical machinery derive from CurveContError so
callers (in particular the CLI) can separate numeric failures from bad input.
"""


class CurveContError(Exception):
    """Base class for all curvecont failures."""


class InputError(CurveContError):
    """Malformed specification, file, or expression (CLI exit code 2)."""


# --- curves ---------------------------------------------------------------

class DegeneratePolynomial(InputError):
    """Polynomial is zero, independent of the fiber variable, or non-squarefree."""


class AtCriticalPoint(CurveContError):
    """Operation requested at or too near a ramification point."""


class RootSolverDivergence(CurveContError):
    """Simultaneous root iteration failed to reach the residual target."""


class PathHitsCritical(CurveContError):
    """A continuation path violates the safety margin around the critical set."""


class TrackingLost(CurveContError):
    """Branch tracking could no longer separate sheets."""


class QuadratureNotConverged(CurveContError):
    """Node doubling did not stabilize a contour integral."""


# --- lemniscates ----------------------------------------------------------

class PoleHit(CurveContError):
    """Rational function evaluated at (or too near) a pole."""


class ComponentEscapesBox(CurveContError):
    """Lemniscate component cover reaches the bounding box frame."""


class DepthExhausted(CurveContError):
    """Subdivision reached maximum depth without resolving the boundary."""


class TracingStalled(CurveContError):
    """Level-set marching failed to close a loop."""


class BudgetExhausted(CurveContError):
    """Lemniscate constructor ran out of candidates.

    Carries the best-scoring failed candidate (if any) and its score.
    """

    def __init__(self, message, best_candidate=None, best_score=None):
        super().__init__(message)
        self.best_candidate = best_candidate
        self.best_score = best_score


# --- series expansion -----------------------------------------------------

class PoleOnContour(CurveContError):
    """Integration cycle passes too near a pole of the integrand."""


class OutsideLemniscate(CurveContError):
    """Series evaluation requested beyond the estimated convergence level."""


class TailNotBounded(CurveContError):
    """Geometric tail bound cannot be pushed below the requested tolerance."""


class GridTooSmall(CurveContError):
    """Lattice has too few interior nodes for the stencil."""


# --- singular fibers ------------------------------------------------------

class EmptySet(CurveContError):
    """Capacity of an empty compact requested."""


class RaggedFibers(CurveContError):
    """Fiber sizes differ across the parameter grid.

    Carries the offending parameter values.
    """

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = tuple(offending)


class IllConditionedFit(CurveContError):
    """Least-squares model matrix is numerically rank deficient."""


# --- engine ---------------------------------------------------------------

class InconsistentAtlas(CurveContError):
    """Two series slices disagree beyond tolerance on an overlap."""


class OriginInSet(CurveContError):
    """Chart inversion requested on a set containing the origin."""
