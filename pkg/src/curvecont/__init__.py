"""curvecont: numerical analytic continuation along algebraic curves.

Functions holomorphic on a parameter domain times a piece of an algebraic
curve are expanded in series over a family of rational lemniscates, the
per-parameter convergence radii are estimated by a root test, the union of
the resulting convergence domains is assembled into a continuation atlas,
and the points that resist continuation are collected fiberwise, probed for
genuine singularity, and checked against a polynomial (Weierstrass-type)
model of their motion.
"""

__version__ = "0.1.0"

from .curves import (  # noqa: F401
    AlgebraicCurve,
    BivariatePolynomial,
    BranchChart,
    CurvePoint,
    branches_at,
    continue_branch,
    critical_points,
    curve_derivative,
    eval_poly,
    make_curve,
    monodromy_irreducible,
    prerotate,
    read_curve_file,
    write_curve_file,
)
