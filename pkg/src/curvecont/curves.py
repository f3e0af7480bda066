"""Algebraic curves in C^2 and branches of the coordinate projection.

A curve is the zero set of a bivariate polynomial P(xi, eta); the projection
(xi, eta) -> xi makes it a ramified covering away from a finite critical set.
This module provides the critical set, the fiber of sheet values over a base
point, predictor-corrector continuation of whole fibers along paths, loop
monodromy with a transitivity-based irreducibility verdict, and Cauchy-quadrature
differentiation of functions living on the curve.

Conventions: the projection is always the first coordinate; curves whose top
eta-coefficient degenerates can be pre-rotated with `prerotate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.signal import convolve2d

from . import polyutil
from .errors import (
    AtCriticalPoint,
    DegeneratePolynomial,
    InputError,
    PathHitsCritical,
    QuadratureNotConverged,
    TrackingLost,
)

# Relative tolerance for clustering nearby roots / matching sheets.
CLUSTER_TOL = 1e-8
# Paths must keep this (times the critical-set scale) clear of ramification.
PATH_MARGIN = 1e-3
# Residual bound certifying that a point lies on the curve.
RESIDUAL_TOL = 1e-9


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class BivariatePolynomial:
    """Dense bivariate polynomial: coeffs[i, j] multiplies xi^i * eta^j."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if not np.any(c):
            raise DegeneratePolynomial("polynomial is identically zero")
        # trim trailing zero rows/columns so stored degrees are honest
        rows = np.nonzero(np.any(c != 0, axis=1))[0]
        cols = np.nonzero(np.any(c != 0, axis=0))[0]
        c = c[: rows[-1] + 1, : cols[-1] + 1]
        object.__setattr__(self, "coeffs", c)

    @property
    def deg_xi(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def deg_eta(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def coeff_scale(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    @classmethod
    def from_terms(cls, terms) -> "BivariatePolynomial":
        """Build from {(i, j): coefficient} or an iterable of (i, j, value)."""
        if isinstance(terms, dict):
            items = [(i, j, v) for (i, j), v in terms.items()]
        else:
            items = [(i, j, v) for i, j, v in terms]
        if not items:
            raise DegeneratePolynomial("no terms given")
        di = max(i for i, _, _ in items)
        dj = max(j for _, j, _ in items)
        c = np.zeros((di + 1, dj + 1), dtype=complex)
        for i, j, v in items:
            c[i, j] += v
        return cls(c)

    def terms(self):
        for i in range(self.coeffs.shape[0]):
            for j in range(self.coeffs.shape[1]):
                v = self.coeffs[i, j]
                if v != 0:
                    yield i, j, v

    def eta_coefficients(self, xi):
        """Coefficients of P(xi, .) as a polynomial in eta; xi may be an array."""
        xi = np.asarray(xi, dtype=complex)
        out = np.empty((self.coeffs.shape[1],) + xi.shape, dtype=complex)
        for j in range(self.coeffs.shape[1]):
            out[j] = polyutil.horner(self.coeffs[:, j], xi)
        return out

    def diff_xi(self) -> "BivariatePolynomial":
        c = self.coeffs
        if c.shape[0] == 1:
            return _zero_like()
        return BivariatePolynomial(c[1:, :] * np.arange(1, c.shape[0])[:, None])

    def diff_eta(self) -> "BivariatePolynomial":
        c = self.coeffs
        if c.shape[1] == 1:
            return _zero_like()
        return BivariatePolynomial(c[:, 1:] * np.arange(1, c.shape[1])[None, :])


def _zero_like():
    # internal placeholder for a vanished derivative; callers treat it as 0
    p = object.__new__(BivariatePolynomial)
    object.__setattr__(p, "coeffs", np.zeros((1, 1), dtype=complex))
    return p


@dataclass(frozen=True)
class CurvePoint:
    xi: complex
    eta: complex

    def as_tuple(self):
        return complex(self.xi), complex(self.eta)


@dataclass(frozen=True)
class AlgebraicCurve:
    poly: BivariatePolynomial
    eta_degree: int
    critical_xi: np.ndarray
    irreducible: str = "undetermined"  # "yes" | "no" | "undetermined"

    @property
    def critical_scale(self) -> float:
        if self.critical_xi.size == 0:
            return 1.0
        return 1.0 + float(np.max(np.abs(self.critical_xi)))

    @property
    def safety_margin(self) -> float:
        return PATH_MARGIN * self.critical_scale


@dataclass(frozen=True)
class BranchChart:
    base_point: complex
    sheet_values: np.ndarray
    radius_of_validity: float


# ---------------------------------------------------------------------------
# evaluation and residuals


def eval_poly(p: BivariatePolynomial, xi, eta):
    """Evaluate P at (xi, eta); Horner in eta with Horner-in-xi coefficients."""
    xi = np.asarray(xi, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    acc = np.zeros(np.broadcast(xi, eta).shape, dtype=complex)
    for j in range(p.coeffs.shape[1] - 1, -1, -1):
        acc = acc * eta + polyutil.horner(p.coeffs[:, j], xi)
    return acc if acc.shape else complex(acc)


def residual(curve: AlgebraicCurve, pt: CurvePoint) -> float:
    return abs(eval_poly(curve.poly, pt.xi, pt.eta))


def on_curve(curve: AlgebraicCurve, pt: CurvePoint, tol: float = RESIDUAL_TOL) -> bool:
    return residual(curve, pt) <= tol * (1.0 + curve.poly.coeff_scale)


def _cluster(values: np.ndarray, tol: float) -> np.ndarray:
    """Merge points closer than tol (absolute), averaging each cluster."""
    vals = list(np.asarray(values, dtype=complex))
    out: list[complex] = []
    for v in sorted(vals, key=lambda z: (z.real, z.imag)):
        for i, u in enumerate(out):
            if abs(v - u) <= tol:
                out[i] = (u + v) / 2
                break
        else:
            out.append(v)
    return np.asarray(out, dtype=complex)


# ---------------------------------------------------------------------------
# critical points


def _sylvester_dets(a_vals: np.ndarray, b_vals: np.ndarray):
    """Determinants of the Sylvester matrix built from sampled coefficients.

    a_vals: (deg_p+1, N) coefficient samples (ascending), likewise b_vals.
    Returns (dets, hadamard_bounds), both shape (N,).
    """
    dp = a_vals.shape[0] - 1
    dq = b_vals.shape[0] - 1
    m = dp + dq
    n_samples = a_vals.shape[1]
    if m == 0:
        return np.ones(n_samples, dtype=complex), np.ones(n_samples)
    M = np.zeros((n_samples, m, m), dtype=complex)
    for r in range(dq):
        for j in range(dp + 1):
            M[:, r, r + j] = a_vals[dp - j]
    for r in range(dp):
        for j in range(dq + 1):
            M[:, dq + r, r + j] = b_vals[dq - j]
    dets = np.linalg.det(M)
    rows = np.sqrt(np.sum(np.abs(M) ** 2, axis=2))
    hadamard = np.prod(np.maximum(rows, 1e-300), axis=1)
    return dets, hadamard


def critical_points(curve_or_poly) -> np.ndarray:
    """Projection-critical xi values: resultant roots plus leading-coefficient roots.

    The resultant Res_eta(P, dP/deta) is recovered as a polynomial in xi by
    sampling Sylvester determinants on a circle and inverse FFT interpolation.
    """
    poly = curve_or_poly.poly if isinstance(curve_or_poly, AlgebraicCurve) else curve_or_poly
    if poly.deg_eta < 1:
        raise DegeneratePolynomial("polynomial does not involve the fiber variable")

    p_eta = poly.diff_eta()
    deg_bound = poly.deg_xi * (2 * poly.deg_eta - 1)
    n = 1
    while n < 2 * (deg_bound + 1):
        n *= 2
    radius = 1.0
    samples = radius * np.exp(2j * np.pi * np.arange(n) / n)

    a_vals = poly.eta_coefficients(samples)
    b_vals = p_eta.eta_coefficients(samples)
    dets, bounds = _sylvester_dets(a_vals, b_vals)
    if np.max(np.abs(dets) / bounds) < 1e-10:
        raise DegeneratePolynomial(
            "resultant vanishes identically; the curve polynomial has a repeated factor"
        )

    # values are V_s = sum_k gamma_k (r w^s)^k, so gamma = fft(V)/n rescaled
    gamma = np.fft.fft(dets) / n / radius ** np.arange(n)
    res_coeffs = polyutil.trim(gamma[: deg_bound + 1], tol=1e-10)
    roots = np.roots(res_coeffs[::-1]) if res_coeffs.size > 1 else np.zeros(0, complex)

    lead = poly.coeffs[:, -1]
    lead_roots = np.roots(polyutil.trim(lead, 1e-14)[::-1]) if lead.size > 1 else np.zeros(0, complex)

    allv = np.concatenate([roots, lead_roots])
    if allv.size == 0:
        return allv
    scale = 1.0 + float(np.max(np.abs(allv)))
    # absolute floor: multiple resultant roots split by ~sqrt(eps) in np.roots
    return _cluster(allv, max(CLUSTER_TOL * scale, 1e-7))


def make_curve(poly: BivariatePolynomial) -> AlgebraicCurve:
    """Validate and assemble an AlgebraicCurve (computes the critical set)."""
    if poly.deg_eta < 1:
        raise DegeneratePolynomial(
            "curve has no eta dependence; apply prerotate() first"
        )
    crit = critical_points(poly)
    return AlgebraicCurve(poly=poly, eta_degree=poly.deg_eta, critical_xi=crit)


# ---------------------------------------------------------------------------
# fibers and branch charts


def _fiber_coeffs(curve: AlgebraicCurve, xi: complex) -> np.ndarray:
    return curve.poly.eta_coefficients(complex(xi))


def _fiber_at(curve: AlgebraicCurve, xi: complex, start=None) -> np.ndarray:
    c = _fiber_coeffs(curve, xi)
    lead = abs(c[-1])
    if lead <= 1e-13 * (1.0 + curve.poly.coeff_scale):
        raise AtCriticalPoint(f"sheet count drops at xi={xi} (leading coefficient vanishes)")
    return polyutil.roots(c, start=start)


def fiber_gap(etas: np.ndarray) -> float:
    if etas.size < 2:
        return np.inf
    d = np.abs(etas[:, None] - etas[None, :])
    np.fill_diagonal(d, np.inf)
    return float(np.min(d))


def branches_at(curve: AlgebraicCurve, xi: complex) -> BranchChart:
    """All sheet values over xi, sorted lexicographically by (re, im)."""
    xi = complex(xi)
    if curve.critical_xi.size:
        dist = float(np.min(np.abs(curve.critical_xi - xi)))
        if dist <= CLUSTER_TOL * curve.critical_scale:
            raise AtCriticalPoint(f"xi={xi} is a critical value of the projection")
        rad = dist
    else:
        rad = np.inf
    etas = _fiber_at(curve, xi)
    order = np.lexsort((etas.imag, etas.real))
    return BranchChart(base_point=xi, sheet_values=etas[order], radius_of_validity=rad)


# ---------------------------------------------------------------------------
# path utilities


def _seg_point_dist(a: complex, b: complex, p: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(p - a)
    t = ((p - a) * ab.conjugate()).real / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def check_path_clearance(path: Sequence[complex], crits: np.ndarray, margin: float):
    if crits.size == 0:
        return
    pts = [complex(z) for z in path]
    for a, b in zip(pts[:-1], pts[1:]):
        for c in crits:
            if _seg_point_dist(a, b, complex(c)) < margin:
                raise PathHitsCritical(
                    f"path segment {a} -> {b} passes within {margin:.3g} of critical value {c}"
                )


def safe_polyline(a: complex, b: complex, obstacles: np.ndarray, clearance: float,
                  _depth: int = 0) -> list[complex]:
    """Polyline from a to b detouring around obstacle points by >= clearance."""
    if obstacles.size == 0:
        return [a, b]
    worst, worst_d = None, np.inf
    for o in obstacles:
        d = _seg_point_dist(a, b, complex(o))
        if d < worst_d:
            worst, worst_d = complex(o), d
    if worst_d >= clearance:
        return [a, b]
    if _depth > 10:
        raise PathHitsCritical("could not route a path clear of the critical set")
    direction = (b - a) / abs(b - a) if b != a else 1.0
    normal = 1j * direction
    cands = [worst + 2.5 * clearance * normal, worst - 2.5 * clearance * normal]
    def clear(w):
        return min(abs(w - complex(o)) for o in obstacles)
    w = max(cands, key=clear)
    left = safe_polyline(a, w, obstacles, clearance, _depth + 1)
    right = safe_polyline(w, b, obstacles, clearance, _depth + 1)
    return left[:-1] + right


# ---------------------------------------------------------------------------
# fiber tracking


def track_fiber(curve: AlgebraicCurve, path: Sequence[complex],
                fiber0: np.ndarray | None = None,
                record_at_nodes: bool = False,
                check_clearance: bool = True):
    """Continue the whole fiber of sheet values along a polyline of xi values.

    Predicts each sheet tangentially (d eta/d xi = -P_xi/P_eta), corrects by a
    warm-started simultaneous root iteration, and adapts the step so the
    correction stays below a tenth of the minimal sheet gap. A correction
    beyond half the gap is treated as a potential sheet jump and the step is
    rejected; TrackingLost is raised once the step underflows.

    Returns the final fiber, or (final, per-node list) with record_at_nodes.
    """
    pts = [complex(z) for z in path]
    if check_clearance:
        check_path_clearance(pts, curve.critical_xi, curve.safety_margin)

    if curve.eta_degree == 1:
        # single sheet: solve the linear fiber directly at every node
        arr = np.asarray(pts, dtype=complex)
        coef = curve.poly.eta_coefficients(arr)
        etas = -coef[0] / coef[1]
        if record_at_nodes:
            return etas[-1:].copy(), [np.array([e]) for e in etas]
        return etas[-1:].copy()

    p_xi = curve.poly.diff_xi()
    p_eta = curve.poly.diff_eta()

    xi = pts[0]
    fiber = _fiber_at(curve, xi) if fiber0 is None else np.asarray(fiber0, dtype=complex).copy()
    nodes = [fiber.copy()] if record_at_nodes else None

    for a, b in zip(pts[:-1], pts[1:]):
        if a == b:
            if record_at_nodes:
                nodes.append(fiber.copy())
            continue
        t = 0.0
        dt = 1.0
        while t < 1.0:
            gap = fiber_gap(fiber)
            dpe = eval_poly(p_eta, xi, fiber)
            dpx = eval_poly(p_xi, xi, fiber)
            with np.errstate(divide="ignore", invalid="ignore"):
                slope = np.where(np.abs(dpe) > 1e-300, -dpx / dpe, 0.0)
            while True:
                step = dt * (b - a)
                xi_new = a + (t + dt) * (b - a)
                pred = fiber + slope * step
                try:
                    corrected = polyutil.roots(_fiber_coeffs(curve, xi_new), start=pred)
                except Exception:
                    corrected = None
                if corrected is not None:
                    corr = float(np.max(np.abs(corrected - pred)))
                    new_gap = fiber_gap(corrected)
                    ok = corr <= 0.5 * gap and new_gap > 1e-12 * (1.0 + np.max(np.abs(corrected)))
                else:
                    corr, ok = np.inf, False
                if ok:
                    break
                dt *= 0.5
                if dt * abs(b - a) < 1e-12 * (1.0 + abs(b - a)):
                    raise TrackingLost(
                        f"step size underflow near xi={xi_new}; sheets not separable"
                    )
            t += dt
            xi = a + t * (b - a)
            fiber = corrected
            if corr < 0.05 * gap:
                dt = min(2.0 * dt, 1.0 - t if 1.0 - t > 0 else dt)
            elif corr > 0.1 * gap:
                dt *= 0.5
            dt = min(dt, 1.0 - t) if t < 1.0 else dt
            if dt <= 0.0:
                break
        if record_at_nodes:
            nodes.append(fiber.copy())

    if record_at_nodes:
        return fiber, nodes
    return fiber


def continue_branch(curve: AlgebraicCurve, start: CurvePoint,
                    path: Sequence[complex]) -> CurvePoint:
    """Continue the branch through `start` along the polyline of xi values."""
    if not on_curve(curve, start, tol=1e-7):
        raise InputError(f"start point {start} does not lie on the curve")
    pts = [complex(z) for z in path]
    if abs(pts[0] - complex(start.xi)) > 1e-12 * (1 + abs(start.xi)):
        pts = [complex(start.xi)] + pts
    fiber0 = _fiber_at(curve, pts[0])
    idx = int(np.argmin(np.abs(fiber0 - start.eta)))
    gap = fiber_gap(fiber0)
    if abs(fiber0[idx] - start.eta) > 0.49 * gap:
        raise TrackingLost("start point cannot be matched to a sheet")
    fiber = track_fiber(curve, pts, fiber0=fiber0)
    return CurvePoint(pts[-1], complex(fiber[idx]))


# ---------------------------------------------------------------------------
# monodromy


def _match_permutation(end: np.ndarray, startf: np.ndarray, gap: float) -> np.ndarray:
    cost = np.abs(end[:, None] - startf[None, :])
    rows, cols = linear_sum_assignment(cost)
    if np.max(cost[rows, cols]) > 0.45 * gap:
        raise TrackingLost("loop endpoints do not match the starting fiber")
    perm = np.empty(len(startf), dtype=int)
    perm[rows] = cols
    return perm


def _circle(center: complex, rad: float, n: int, start_angle: float) -> list[complex]:
    ang = start_angle + 2 * np.pi * np.arange(n + 1) / n
    return list(center + rad * np.exp(1j * ang))


def loop_permutation(curve: AlgebraicCurve, loop: Sequence[complex]) -> np.ndarray:
    """Sheet permutation induced by tracking the fiber around a closed loop.

    perm[i] = j means the sheet starting at canonical index i ends at index j.
    The fiber at loop[0] is taken in canonical (lexicographic) order.
    """
    chart = branches_at(curve, complex(loop[0]))
    startf = chart.sheet_values
    end = track_fiber(curve, loop, fiber0=startf)
    return _match_permutation(end, startf, fiber_gap(startf))


def monodromy_generators(curve: AlgebraicCurve, circle_nodes: int = 24):
    """Keyhole-loop permutations around each finite critical value.

    Returns (base_point, list of (critical_value, permutation)).
    """
    crits = curve.critical_xi
    if crits.size == 0:
        base = 1.0 + 0j
        return base, []
    center = complex(np.mean(crits))
    spread = max(float(np.max(np.abs(crits - center))), 1.0)
    base = None
    for k in range(32):
        cand = center + (2.0 * spread + 1.0) * np.exp(1j * (0.5 + 2.399963 * k))
        if np.min(np.abs(crits - cand)) > 10 * curve.safety_margin:
            base = cand
            break
    if base is None:
        raise PathHitsCritical("could not place a monodromy base point")

    margin = curve.safety_margin
    gens = []
    for i, c in enumerate(crits):
        others = np.delete(crits, i)
        if others.size:
            rad = 0.45 * float(np.min(np.abs(others - c)))
        else:
            rad = 0.5 * spread
        rad = max(min(rad, 0.5 * abs(base - c)), 4 * margin)
        entry = complex(c) + rad * (base - c) / abs(base - c)
        approach = safe_polyline(base, entry, others, 3 * margin)
        start_angle = float(np.angle(entry - c))
        loop = approach[:-1] + _circle(complex(c), rad, circle_nodes, start_angle) \
            + list(reversed(approach))[1:]
        perm = loop_permutation(curve, loop)
        gens.append((complex(c), perm))
    return base, gens


def monodromy_irreducible(curve: AlgebraicCurve, circle_nodes: int = 24) -> str:
    """Ternary irreducibility verdict from monodromy transitivity.

    "yes" when the loop permutations act transitively on sheets (sufficient
    for irreducibility), "no" when provably intransitive, "undetermined" when
    tracking failed. One sheet is trivially transitive.
    """
    if curve.eta_degree == 1:
        return "yes"
    try:
        _, gens = monodromy_generators(curve, circle_nodes=circle_nodes)
    except (TrackingLost, PathHitsCritical, AtCriticalPoint):
        return "undetermined"
    n = curve.eta_degree
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, perm in gens:
        for i, j in enumerate(perm):
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[ri] = rj
    classes = {find(i) for i in range(n)}
    return "yes" if len(classes) == 1 else "no"


# ---------------------------------------------------------------------------
# differentiation on the curve


def curve_derivative(curve: AlgebraicCurve, f: Callable[[CurvePoint], complex],
                     a: CurvePoint, k: int, radius: float | None = None,
                     tol: float = 1e-11, max_nodes: int = 4096) -> complex:
    """k-th derivative at a of f composed with the local inverse of the projection.

    Computed as a Cauchy-integral quadrature on a circle around xi(a), with
    the circle lifted to a's sheet by fiber tracking. Nodes double until the
    value stabilizes.
    """
    if k < 0:
        raise InputError("derivative order must be >= 0")
    z0 = complex(a.xi)
    if curve.critical_xi.size:
        chart = float(np.min(np.abs(curve.critical_xi - z0)))
        if chart <= CLUSTER_TOL * curve.critical_scale:
            raise AtCriticalPoint(f"xi={z0} is a critical value")
    else:
        chart = np.inf
    r = min(chart / 2.0, radius) if radius is not None else (chart / 2.0 if np.isfinite(chart) else 1.0)

    fiber0 = _fiber_at(curve, z0)
    idx = int(np.argmin(np.abs(fiber0 - a.eta)))

    prev = None
    n = 64
    while n <= max_nodes:
        ring = list(z0 + r * np.exp(2j * np.pi * np.arange(n + 1) / n))
        path = [z0, ring[0]] + ring
        _, nodes = track_fiber(curve, path, fiber0=fiber0, record_at_nodes=True,
                               check_clearance=False)
        ring_fibers = nodes[2:2 + n]
        vals = np.array([
            f(CurvePoint(ring[m], complex(ring_fibers[m][idx]))) for m in range(n)
        ], dtype=complex)
        phase = np.exp(-2j * np.pi * k * np.arange(n) / n)
        est = math.factorial(k) / (n * r ** k) * np.sum(vals * phase)
        if prev is not None and abs(est - prev) <= tol * (1.0 + abs(est)):
            return complex(est)
        prev = est
        n *= 2
    raise QuadratureNotConverged(
        f"derivative quadrature did not stabilize below {tol} with {max_nodes} nodes"
    )


# ---------------------------------------------------------------------------
# coordinate rotation


def _poly2_pow(base: np.ndarray, n: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for _ in range(n):
        out = convolve2d(out, base)
    return out


def rotate_poly(poly: BivariatePolynomial, angle: float) -> BivariatePolynomial:
    """Substitute the rotation xi -> c*xi' - s*eta', eta -> s*xi' + c*eta'."""
    c, s = np.cos(angle), np.sin(angle)
    fx = np.array([[0, -s], [c, 0]], dtype=complex)   # rows: xi' exponent, cols: eta'
    fy = np.array([[0, c], [s, 0]], dtype=complex)
    acc = np.zeros((1, 1), dtype=complex)
    for i, j, v in poly.terms():
        term = v * convolve2d(_poly2_pow(fx, i), _poly2_pow(fy, j))
        if term.shape[0] > acc.shape[0] or term.shape[1] > acc.shape[1]:
            grown = np.zeros((max(term.shape[0], acc.shape[0]),
                              max(term.shape[1], acc.shape[1])), dtype=complex)
            grown[: acc.shape[0], : acc.shape[1]] = acc
            acc = grown
        acc[: term.shape[0], : term.shape[1]] += term
    return BivariatePolynomial(acc)


def prerotate(poly: BivariatePolynomial, max_tries: int = 32):
    """Rotate coordinates until the top eta-coefficient is constant in xi.

    Returns (rotated_polynomial, angle). A generic rotation achieves this;
    deterministic golden-angle sweep keeps the result reproducible.
    """
    total = max(i + j for i, j, _ in poly.terms())
    for kk in range(max_tries):
        ang = 0.0 if kk == 0 else 0.37 + 2.399963 * (kk - 1)
        rot = rotate_poly(poly, ang) if kk else poly
        if rot.deg_eta == total:
            lead = rot.coeffs[:, -1]
            if polyutil.trim(lead, 1e-12).size == 1:
                return rot, ang
    raise DegeneratePolynomial("no rotation exposed a constant leading coefficient")


# ---------------------------------------------------------------------------
# curve description files


def read_curve_file(path) -> BivariatePolynomial:
    """Parse a monomial-per-line curve file: `i j re im`, '#' comments."""
    items = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.replace(",", " ").split()
            if len(parts) != 4:
                raise InputError(f"{path}:{ln}: expected 'i j re im', got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
                re, im = float(parts[2]), float(parts[3])
            except ValueError as exc:
                raise InputError(f"{path}:{ln}: {exc}") from exc
            if i < 0 or j < 0:
                raise InputError(f"{path}:{ln}: negative exponent")
            items.append((i, j, complex(re, im)))
    if not items:
        raise InputError(f"{path}: no monomials found")
    return BivariatePolynomial.from_terms(items)


def write_curve_file(poly: BivariatePolynomial, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, j, v in poly.terms():
            fh.write(f"{i} {j} {v.real:.17g} {v.imag:.17g}\n")
