"""Series expansion over rational lemniscates and convergence-radius fields.

A function f(z, w) holomorphic near the lift of a closed lemniscate component
is expanded as f = sum_k c_k(z, w) * g(pi(w))^k. The coefficients come from a
contour integral over the lifted boundary cycle with a fiber-selecting Cauchy
kernel: writing a for the integration point and zeta for base coordinates,

    C(a, w) = P(zeta_a, eta_w) / ((zeta_a - zeta_w) (eta_w - eta_a) P_eta(a))

reproduces holomorphic functions at w on a's sheet and annihilates the other
fiber points, and on single-sheet curves it collapses to the plain Cauchy
kernel. The extra factor g(zeta_a) - g(zeta_w) in the coefficient integrand
cancels the kernel pole as w crosses the contour, so a single quadrature
cycle defines every c_k(z, .) globally on the curve away from poles of g.

The numerator of C is evaluated through synthetic division of P(zeta_a, .)
by (X - eta_a), which removes the 0/0 cancellation entirely.

Radius estimates follow the root test on coefficient norms over a lifted
compact. Since the quadrature floor for |c_k| is eps * level^-(k+1), radius
fields bootstrap the quadrature level toward ~0.75 of the estimated radius
before the production run; without this, tail-window estimates at k ~ 60 are
noise for any target radius much larger than the level.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import polyutil
from .curves import AlgebraicCurve, CurvePoint, eval_poly, fiber_gap, track_fiber
from .errors import (
    GridTooSmall,
    InputError,
    OutsideLemniscate,
    QuadratureNotConverged,
    TailNotBounded,
    TrackingLost,
)
from .lemniscates import Contour, level_contour
from .rational import RationalFunction, eval_rational

DEFAULT_COVERAGE_MARGIN = 0.05


# ---------------------------------------------------------------------------
# fiber functions


@dataclass(frozen=True)
class FiberFunction:
    """Evaluable f(z, w) with optional holomorphy hints.

    handle(z, pt) -> complex is the contract; vector_handle(z, xi, eta),
    when provided, evaluates whole node arrays at once. hint_level is a level
    rho at which f is declared holomorphic on the closed lifted lemniscate of
    the base family member (used to seed level bootstrapping).
    """

    handle: Callable[[object, CurvePoint], complex]
    name: str = "f"
    vector_handle: Callable | None = None
    hint_level: float = 0.5

    def eval_nodes(self, z, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        if self.vector_handle is not None:
            return np.asarray(self.vector_handle(z, xi, eta), dtype=complex)
        return np.array([self.handle(z, CurvePoint(complex(x), complex(e)))
                         for x, e in zip(xi, eta)], dtype=complex)


# ---------------------------------------------------------------------------
# lifted contours


@dataclass(frozen=True)
class LiftedLoop:
    zeta: np.ndarray
    eta: np.ndarray
    dzeta: np.ndarray
    base_nodes: int      # nodes of the underlying base loop
    circuits: int


@dataclass(frozen=True)
class LiftedContour:
    loops: tuple[LiftedLoop, ...]

    @property
    def total_nodes(self) -> int:
        return sum(lp.zeta.size for lp in self.loops)


def lift_contour(curve: AlgebraicCurve, base: Contour) -> LiftedContour:
    """Lift every base loop to all sheets of the curve.

    Sheets permuted by the loop monodromy are concatenated into single longer
    loops that close after several base circuits.
    """
    if curve.eta_degree == 1:
        out = []
        for loop in base.loops:
            coef = curve.poly.eta_coefficients(loop.zeta)
            eta = -coef[0] / coef[1]
            out.append(LiftedLoop(zeta=loop.zeta, eta=eta, dzeta=loop.dzeta,
                                  base_nodes=loop.zeta.size, circuits=1))
        return LiftedContour(loops=tuple(out))
    out = []
    for loop in base.loops:
        n = loop.zeta.size
        path = list(loop.zeta) + [loop.zeta[0]]
        fiber0 = None
        end, nodes = track_fiber(curve, path, record_at_nodes=True)
        start = nodes[0]
        gap = fiber_gap(start)
        perm = np.empty(start.size, dtype=int)
        for i in range(start.size):
            j = int(np.argmin(np.abs(start - end[i])))
            if abs(start[j] - end[i]) > 0.45 * gap:
                raise TrackingLost("lifted loop endpoints do not match the fiber")
            perm[i] = j
        eta_rows = np.stack(nodes[:n], axis=0)   # (n, sheets)

        visited = np.zeros(start.size, dtype=bool)
        for s0 in range(start.size):
            if visited[s0]:
                continue
            cycle = [s0]
            visited[s0] = True
            s = int(perm[s0])
            while s != s0:
                cycle.append(s)
                visited[s] = True
                s = int(perm[s])
            zeta = np.tile(loop.zeta, len(cycle))
            dzeta = np.tile(loop.dzeta, len(cycle))
            eta = np.concatenate([eta_rows[:, s] for s in cycle])
            out.append(LiftedLoop(zeta=zeta, eta=eta, dzeta=dzeta,
                                  base_nodes=n, circuits=len(cycle)))
    return LiftedContour(loops=tuple(out))


# ---------------------------------------------------------------------------
# expansion


@dataclass(frozen=True)
class HartogsExpansion:
    g: RationalFunction
    z: object
    sample_points: tuple[CurvePoint, ...]
    coeff_table: np.ndarray        # (k_max+1, samples)
    norms: np.ndarray              # (k_max+1,)
    k_max: int
    level: float
    norm_floor: np.ndarray = None  # per-k quadrature roundoff floor
    # quadrature node data retained so c_k(z, .) can be evaluated anywhere
    node_zeta: np.ndarray = field(repr=False, default=None)
    node_eta: np.ndarray = field(repr=False, default=None)
    node_weight: np.ndarray = field(repr=False, default=None)
    node_f: np.ndarray = field(repr=False, default=None)
    node_g: np.ndarray = field(repr=False, default=None)
    node_defl: np.ndarray = field(repr=False, default=None)
    node_peta: np.ndarray = field(repr=False, default=None)
    # sample-cycle data for the interpolation fallback
    sample_weight: np.ndarray = field(repr=False, default=None)
    sample_defl: np.ndarray = field(repr=False, default=None)
    sample_peta: np.ndarray = field(repr=False, default=None)


def _deflate_columns(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Columnwise synthetic division: coeffs (n+1, A) by (X - roots), (A,)."""
    n = coeffs.shape[0] - 1
    out = np.empty((n, coeffs.shape[1]), dtype=complex)
    acc = coeffs[n].copy()
    out[n - 1] = acc
    for j in range(n - 1, 0, -1):
        acc = acc * roots + coeffs[j]
        out[j - 1] = acc
    return out


def _node_data(curve: AlgebraicCurve, g: RationalFunction, lifted: LiftedContour):
    zeta = np.concatenate([lp.zeta for lp in lifted.loops])
    eta = np.concatenate([lp.eta for lp in lifted.loops])
    weight = np.concatenate([
        lp.dzeta * (2 * np.pi / lp.base_nodes) for lp in lifted.loops
    ]) / (2j * np.pi)
    gvals = eval_rational(g, zeta)
    pcol = curve.poly.eta_coefficients(zeta)          # (deg+1, A)
    defl = _deflate_columns(pcol, eta)                # (deg, A)
    peta = eval_poly(curve.poly.diff_eta(), zeta, eta)
    return zeta, eta, weight, gvals, defl, peta


def _kernel_matrix(exp_or_data, w_xi: np.ndarray, w_eta: np.ndarray) -> np.ndarray:
    """C(a, w) for all nodes a and evaluation points w: shape (A, W)."""
    zeta, eta, defl, peta = exp_or_data
    n = defl.shape[0]
    pw = w_eta[None, :] ** np.arange(n)[:, None]      # (n, W)
    num = defl.T @ pw                                  # (A, W)
    denom = (zeta[:, None] - w_xi[None, :]) * peta[:, None]
    return num / denom


def _coeff_tables(weight, fvals, gvals, kernel, w_g, k_max, with_floor=False):
    """c_k(z, w) = sum_a weight_a f_a (g_a - g_w) g_a^-(k+1) C(a, w).

    With with_floor, also returns the roundoff floor of each entry: the sums
    cancel terms of magnitude ~ level^-(k+1), so absolute accuracy below
    eps times the summed term magnitudes is unattainable in double precision.
    """
    m1 = (weight * fvals)[:, None] * kernel            # (A, W)
    inv_g = 1.0 / gvals
    gb = np.empty((k_max + 1, gvals.size), dtype=complex)
    gb[0] = inv_g
    for k in range(1, k_max + 1):
        gb[k] = gb[k - 1] * inv_g
    q = gb @ m1                                        # (K, W): sum w f g^-(k+1) C
    p = gb @ (m1 * gvals[:, None])                     # sum w f g^-k C
    table = p - w_g[None, :] * q
    if not with_floor:
        return table
    absgb = np.abs(gb)
    absm1 = np.abs(m1)
    floor = np.finfo(float).eps * (
        absgb @ (absm1 * np.abs(gvals)[:, None])
        + np.abs(w_g)[None, :] * (absgb @ absm1)
    )
    return table, floor


_CONTOUR_CACHE: dict = {}


def _curve_key(curve: AlgebraicCurve) -> bytes:
    return curve.poly.coeffs.tobytes() + bytes(curve.poly.coeffs.shape)


def _cached_level_contour(g: RationalFunction, rho: float, nodes: int) -> Contour:
    key = (g.label(), float(rho), int(nodes))
    hit = _CONTOUR_CACHE.get(key)
    if hit is None:
        hit = level_contour(g, rho, nodes)
        if len(_CONTOUR_CACHE) > 512:
            _CONTOUR_CACHE.clear()
        _CONTOUR_CACHE[key] = hit
    return hit


def _cached_lift(curve: AlgebraicCurve, g: RationalFunction, rho: float,
                 nodes: int) -> LiftedContour:
    key = (_curve_key(curve), g.label(), float(rho), int(nodes))
    hit = _CONTOUR_CACHE.get(key)
    if hit is None:
        hit = lift_contour(curve, _cached_level_contour(g, rho, nodes))
        if len(_CONTOUR_CACHE) > 512:
            _CONTOUR_CACHE.clear()
        _CONTOUR_CACHE[key] = hit
    return hit


def _sample_points(curve: AlgebraicCurve, g: RationalFunction, level: float,
                   count: int):
    lifted = _cached_lift(curve, g, level, count)
    xi = np.concatenate([lp.zeta for lp in lifted.loops])
    eta = np.concatenate([lp.eta for lp in lifted.loops])
    weight = np.concatenate([
        lp.dzeta * (2 * np.pi / lp.base_nodes) for lp in lifted.loops
    ]) / (2j * np.pi)
    return xi, eta, weight


def coefficients(f: FiberFunction, curve: AlgebraicCurve, g: RationalFunction,
                 rho: float, z, k_max: int,
                 nodes: int = 256,
                 samples: int = 64,
                 sample_level_factor: float = 0.5,
                 contour: Contour | None = None,
                 quad_tol: float = 1e-10,
                 max_nodes: int = 2048) -> HartogsExpansion:
    """Expansion coefficients by contour quadrature on the lifted cycle.

    Node count doubles until the coefficient table stabilizes below quad_tol
    (relative) or max_nodes is reached. The reproducing-kernel identity
    (integral of C against the cycle equals 1 at every sample) is verified on
    each quadrature; its failure means the traced cycle does not enclose the
    samples and is reported as QuadratureNotConverged.
    """
    sxi, seta, sweight = _sample_points(curve, g, rho * sample_level_factor,
                                        samples)
    sg = eval_rational(g, sxi)

    prev_table = None
    n = nodes
    while n <= max_nodes:
        if contour is not None and n == nodes:
            lifted = lift_contour(curve, contour)
        else:
            lifted = _cached_lift(curve, g, rho, n)
        zeta, eta, weight, gvals, defl, peta = _node_data(curve, g, lifted)
        kernel = _kernel_matrix((zeta, eta, defl, peta), sxi, seta)
        ident = weight @ kernel
        if np.max(np.abs(ident - 1.0)) > 1e-7:
            raise QuadratureNotConverged(
                "reproducing-kernel identity failed on the traced cycle "
                f"(max deviation {np.max(np.abs(ident - 1.0)):.2e})"
            )
        fvals = f.eval_nodes(z, zeta, eta)
        if not np.all(np.isfinite(fvals)):
            raise QuadratureNotConverged("f evaluated non-finite on the cycle")
        table, floor = _coeff_tables(weight, fvals, gvals, kernel, sg, k_max,
                                     with_floor=True)
        if prev_table is not None:
            scale = np.max(np.abs(table)) + 1e-300
            tol = np.maximum(quad_tol * scale, 8.0 * floor)
            if np.all(np.abs(table - prev_table) <= tol):
                break
        prev_table = table
        n *= 2
    else:
        raise QuadratureNotConverged(
            f"coefficients did not stabilize below {quad_tol} at {max_nodes} nodes"
        )

    norms = np.max(np.abs(table), axis=1)
    pts = tuple(CurvePoint(complex(a), complex(b)) for a, b in zip(sxi, seta))
    spcol = curve.poly.eta_coefficients(sxi)
    return HartogsExpansion(
        g=g, z=z, sample_points=pts, coeff_table=table, norms=norms,
        k_max=k_max, level=float(rho), norm_floor=np.max(floor, axis=1),
        node_zeta=zeta, node_eta=eta, node_weight=weight,
        node_f=fvals, node_g=gvals, node_defl=defl, node_peta=peta,
        sample_weight=sweight, sample_defl=_deflate_columns(spcol, seta),
        sample_peta=eval_poly(curve.poly.diff_eta(), sxi, seta),
    )


def coefficients_at(exp: HartogsExpansion, w_xi: np.ndarray,
                    w_eta: np.ndarray) -> np.ndarray:
    """c_k(z, w) at arbitrary curve points from the stored quadrature data.

    Valid anywhere off the contour and away from poles of g on the curve: the
    (g_a - g_w) factor makes the integral deformation-invariant, so the same
    cycle defines the coefficients globally.
    """
    if exp.node_zeta is None:
        raise InputError("expansion carries no quadrature data")
    w_xi = np.atleast_1d(np.asarray(w_xi, dtype=complex))
    w_eta = np.atleast_1d(np.asarray(w_eta, dtype=complex))
    kernel = _kernel_matrix((exp.node_zeta, exp.node_eta, exp.node_defl,
                             exp.node_peta), w_xi, w_eta)
    w_g = eval_rational(exp.g, w_xi)
    return _coeff_tables(exp.node_weight, exp.node_f, exp.node_g, kernel,
                         w_g, exp.k_max)


def interpolate_coefficients(exp: HartogsExpansion, w_xi: complex,
                             w_eta: complex) -> np.ndarray:
    """Barycentric interpolation of c_k(z, .) from the sample cycle.

    Valid for w inside the sample contour; the weights are the fiber-selecting
    Cauchy kernels of that cycle, normalized so constants are reproduced
    exactly (second-kind barycentric form).
    """
    if exp.sample_weight is None:
        raise InputError("expansion carries no sample-cycle data")
    sxi = np.array([p.xi for p in exp.sample_points])
    seta = np.array([p.eta for p in exp.sample_points])
    kernel = _kernel_matrix((sxi, seta, exp.sample_defl, exp.sample_peta),
                            np.array([complex(w_xi)]), np.array([complex(w_eta)]))
    lam = exp.sample_weight * kernel[:, 0]
    return (exp.coeff_table @ lam) / np.sum(lam)


def evaluate_series(exp: HartogsExpansion, w: CurvePoint,
                    tail_tol: float = 1e-9,
                    margin: float = DEFAULT_COVERAGE_MARGIN) -> complex:
    """Partial series sum at w with a geometric tail bound from the norms."""
    vals = evaluate_series_many(exp, np.array([w.xi]), np.array([w.eta]),
                                tail_tol=tail_tol, margin=margin)
    return complex(vals[0])


def evaluate_series_many(exp: HartogsExpansion, w_xi, w_eta,
                         tail_tol: float = 1e-9,
                         margin: float = DEFAULT_COVERAGE_MARGIN,
                         on_error: str = "raise"):
    """Vectorized series evaluation.

    With on_error="mask", returns (values, ok) instead of raising, where ok
    flags points inside the margin whose tail bound certifies below tail_tol.
    """
    w_xi = np.atleast_1d(np.asarray(w_xi, dtype=complex))
    w_eta = np.atleast_1d(np.asarray(w_eta, dtype=complex))
    radius = radius_estimate(exp)
    gw = eval_rational(exp.g, w_xi)
    inside = np.abs(gw) < radius * (1.0 - margin)
    if on_error == "raise" and not np.all(inside):
        raise OutsideLemniscate(
            f"|g(w)| = {np.max(np.abs(gw)):.4g} is not below "
            f"{(1 - margin):.2f} * estimated radius {radius:.4g}"
        )
    ck = coefficients_at(exp, w_xi, w_eta)            # (K, W)
    powers = gw[None, :] ** np.arange(exp.k_max + 1)[:, None]
    terms = ck * powers
    total = np.sum(terms, axis=0)
    # geometric tail bound from the trailing computed terms
    q = np.minimum(np.abs(gw) / radius, 1.0)
    recent = np.max(np.abs(terms[-5:, :]), axis=0)
    bound = recent * q / np.maximum(1.0 - q, 1e-12)
    tail_ok = bound <= tail_tol * (1.0 + np.abs(total))
    if on_error == "mask":
        return total, inside & tail_ok
    if not np.all(tail_ok):
        raise TailNotBounded(
            f"geometric tail bound {np.max(bound):.3g} exceeds {tail_tol}"
        )
    return total


# ---------------------------------------------------------------------------
# radius estimation


@dataclass(frozen=True)
class RadiusDetails:
    radius: float
    fit_radius: float
    fit_discrepancy: float
    entire: bool
    window: tuple[int, int]


def _window_root_test(norms: np.ndarray, lo: int, hi: int) -> float:
    ks = np.arange(lo, hi + 1)
    vals = norms[lo:hi + 1]
    mask = vals > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(vals[mask] ** (1.0 / ks[mask])))


def _effective_norms(exp: HartogsExpansion) -> np.ndarray:
    """Norms with entries at or below the quadrature floor zeroed out.

    Below the floor the computed coefficient is roundoff, and its magnitude
    follows the geometric noise line level^-(k+1), which would masquerade as
    a pole at a finite radius.
    """
    norms = exp.norms.copy()
    if exp.norm_floor is not None:
        norms[norms <= 10.0 * exp.norm_floor] = 0.0
    return norms


def radius_details(exp: HartogsExpansion) -> RadiusDetails:
    norms = _effective_norms(exp)
    k_max = exp.k_max
    if k_max < 16:
        raise InputError("radius estimation needs k_max >= 16")
    lo, hi = k_max // 2, k_max
    top = _window_root_test(norms, lo, hi)
    if top == 0.0:
        # every tail coefficient sits at the roundoff floor: entire at this scale
        return RadiusDetails(math.inf, math.inf, 0.0, True, (lo, hi))
    radius = 1.0 / top

    ks = np.arange(lo, hi + 1)
    finite = norms[lo:hi + 1] > 0
    logn = np.log(np.maximum(norms[lo:hi + 1], 1e-300))
    if np.sum(finite) >= 2:
        coef1 = np.polyfit(ks[finite].astype(float), logn[finite], 1)
        fit_radius = float(np.exp(-coef1[0]))
    else:
        fit_radius = radius
    disc = abs(fit_radius - radius) / radius if np.isfinite(fit_radius) else math.inf
    return RadiusDetails(radius, fit_radius, disc, False, (lo, hi))


def radius_estimate(exp: HartogsExpansion) -> float:
    """Root-test radius over the tail window; +inf signals entire behavior."""
    return radius_details(exp).radius


def _clean_window_radius(norms: np.ndarray, level: float, k_max: int) -> float:
    """Radius from a window kept clear of the quadrature noise floor."""
    lo, hi = max(4, k_max // 2), k_max
    for _ in range(3):
        top = _window_root_test(norms, lo, hi)
        if top == 0.0:
            return math.inf
        r = 1.0 / top
        ratio = max(r / level, 1.01)
        k_clean = int(14.0 / math.log10(ratio)) if ratio > 1.05 else k_max
        new_hi = min(k_max, max(8, k_clean))
        new_lo = max(4, new_hi // 2)
        if (new_lo, new_hi) == (lo, hi):
            return r
        lo, hi = new_lo, new_hi
    return 1.0 / _window_root_test(norms, lo, hi)


# ---------------------------------------------------------------------------
# radius fields


@dataclass(frozen=True)
class RadiusField:
    grid: np.ndarray               # complex parameter values
    radius: np.ndarray             # R per grid point (inf allowed, nan masked)
    radius_floor: np.ndarray       # lower regularization R_*
    g_label: str
    levels: np.ndarray             # quadrature level used per grid point
    fit_discrepancy: np.ndarray
    failures: tuple = ()


def _bootstrap_level(f, curve, g, z, hint_level, k_boot=24, nodes=128,
                     samples=16, rounds=2, level_cap=1e6):
    """Raise the quadrature level toward ~0.75 of the estimated radius.

    Backs off when f stops being holomorphic on the larger lift (detected by
    quadrature failure or series/f mismatch at interior check points).
    """
    level = float(hint_level)
    accepted = level
    for _ in range(rounds):
        exp = coefficients(f, curve, g, accepted, z, k_boot, nodes=nodes,
                           samples=samples, quad_tol=1e-9)
        r = _clean_window_radius(_effective_norms(exp), accepted, k_boot)
        if not np.isfinite(r):
            target = min(accepted * 4.0, level_cap)
        else:
            target = 0.75 * r
        if target <= accepted * 1.05:
            break
        trial = min(target, level_cap)
        while trial > accepted * 1.05:
            if _level_is_valid(f, curve, g, trial, z):
                accepted = trial
                break
            trial *= 0.7
    return accepted


def _level_is_valid(f, curve, g, level, z, checks=6, tol=1e-6) -> bool:
    """Quadrature at `level` must reproduce f at interior check points."""
    try:
        exp = coefficients(f, curve, g, level, z, 24, nodes=128, samples=8,
                           quad_tol=1e-8)
        cxi = np.array([p.xi for p in exp.sample_points[:checks]])
        ceta = np.array([p.eta for p in exp.sample_points[:checks]])
        series = evaluate_series_many(exp, cxi, ceta, tail_tol=1e-4, margin=0.0)
        direct = f.eval_nodes(z, cxi, ceta)
        return bool(np.max(np.abs(series - direct))
                    <= tol * (1.0 + np.max(np.abs(direct))))
    except Exception:
        return False


def _radius_task(args):
    (f, curve, g, rho, z, k_max, nodes, samples, auto_level) = args
    level = _bootstrap_level(f, curve, g, z, rho) if auto_level else float(rho)
    exp = coefficients(f, curve, g, level, z, k_max, nodes=nodes, samples=samples)
    det = radius_details(exp)
    return det.radius, level, det.fit_discrepancy


def radius_field(f: FiberFunction, curve: AlgebraicCurve, g: RationalFunction,
                 rho: float, z_grid, k_max: int,
                 nodes: int = 256, samples: int = 64,
                 auto_level: bool = True,
                 workers: int = 1) -> RadiusField:
    """Per-parameter radius estimates with discrete lower regularization.

    The floor value at z is the minimum of the radius over the one-step grid
    neighborhood of z (including z itself). Per-point failures are masked as
    NaN and collected in `failures`.
    """
    grid = np.asarray(z_grid, dtype=complex).ravel()
    tasks = [(f, curve, g, rho, complex(z), k_max, nodes, samples, auto_level)
             for z in grid]
    results: list = [None] * len(tasks)
    failures = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, res in enumerate(pool.map(_radius_task_safe, tasks,
                                             chunksize=max(1, len(tasks) // (4 * workers)))):
                results[i] = res
    else:
        results = [_radius_task_safe(t) for t in tasks]

    radius = np.full(grid.size, np.nan)
    levels = np.full(grid.size, np.nan)
    disc = np.full(grid.size, np.nan)
    for i, res in enumerate(results):
        if isinstance(res, str):
            failures.append((complex(grid[i]), res))
        else:
            radius[i], levels[i], disc[i] = res

    floor = _grid_window_min(grid, radius)
    return RadiusField(grid=grid, radius=radius, radius_floor=floor,
                       g_label=g.label(), levels=levels, fit_discrepancy=disc,
                       failures=tuple(failures))


def _radius_task_safe(args):
    try:
        return _radius_task(args)
    except Exception as exc:  # masked entry, never a crashed field
        return f"{type(exc).__name__}: {exc}"


def _grid_window_min(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    if grid.size <= 1:
        return values.copy()
    d = np.abs(grid[:, None] - grid[None, :])
    np.fill_diagonal(d, np.inf)
    step = float(np.min(d))
    out = np.empty_like(values)
    for i in range(grid.size):
        near = np.abs(grid - grid[i]) <= 1.001 * step
        vals = values[near]
        vals = vals[~np.isnan(vals)]
        out[i] = np.min(vals) if vals.size else np.nan
    return out


# ---------------------------------------------------------------------------
# subharmonicity check on a lattice


@dataclass(frozen=True)
class PshReport:
    max_violation: float
    violating_nodes: tuple
    interior_count: int
    masked_count: int
    slack: float

    @property
    def ok(self) -> bool:
        return len(self.violating_nodes) == 0


def psh_check(values: np.ndarray, slack: float = 1e-3,
              radii: Sequence[int] = (1, 2, 3)) -> PshReport:
    """Discrete submean check u(x) <= lattice-circle average + slack.

    `values` is a real 2D array sampled on an evenly spaced lattice (NaN
    entries are masked). For each radius m the circle average is taken over
    the four axis neighbors at m grid steps.
    """
    u = np.asarray(values, dtype=float)
    if u.ndim != 2:
        raise InputError("expected a 2D lattice of values")
    rmax = max(radii)
    ny, nx = u.shape
    if ny <= 2 * rmax or nx <= 2 * rmax:
        raise GridTooSmall(f"lattice {u.shape} has no interior for radius {rmax}")

    violations = []
    max_v = -math.inf
    masked = 0
    interior = 0
    for iy in range(rmax, ny - rmax):
        for ix in range(rmax, nx - rmax):
            if math.isnan(u[iy, ix]):
                masked += 1
                continue
            interior += 1
            worst = -math.inf
            usable = False
            for m in radii:
                ring = (u[iy + m, ix], u[iy - m, ix], u[iy, ix + m], u[iy, ix - m])
                if any(math.isnan(v) for v in ring):
                    continue
                usable = True
                worst = max(worst, u[iy, ix] - sum(ring) / 4.0)
            if not usable:
                masked += 1
                continue
            max_v = max(max_v, worst)
            if worst > slack:
                violations.append((iy, ix, worst))
    return PshReport(max_violation=(max_v if interior else math.nan),
                     violating_nodes=tuple(violations),
                     interior_count=interior, masked_count=masked, slack=slack)


def psh_check_sections(u4: np.ndarray, slack: float = 1e-3) -> tuple[PshReport, ...]:
    """Two-parameter variant: submean check along coordinate planes and the
    diagonal plane of a 4D lattice u[z1_re, z1_im, z2_re, z2_im]."""
    u = np.asarray(u4, dtype=float)
    if u.ndim != 4:
        raise InputError("expected a 4D lattice")
    mid2 = (u.shape[2] // 2, u.shape[3] // 2)
    mid1 = (u.shape[0] // 2, u.shape[1] // 2)
    first = psh_check(u[:, :, mid2[0], mid2[1]], slack)
    second = psh_check(u[mid1[0], mid1[1], :, :], slack)
    n = min(u.shape[0], u.shape[2])
    m = min(u.shape[1], u.shape[3])
    diag = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            diag[i, j] = u[i, j, i, j]
    third = psh_check(diag, slack)
    return first, second, third


# ---------------------------------------------------------------------------
# singularity level candidates (linear prediction on coefficient tails)


def singularity_level_candidates(exp: HartogsExpansion, max_poles: int = 4,
                                 rel_tol: float = 1e-3) -> list[complex]:
    """Estimate levels t* = g(singular point) from coefficient asymptotics.

    Fits a linear recurrence to the tail of each sample column (the poles of
    the associated t-series are the g-values of the singularities nearest the
    expansion) and keeps roots that agree across a majority of columns.
    """
    table = exp.coeff_table
    k_max, n_samples = table.shape[0] - 1, table.shape[1]
    floor = exp.norm_floor if exp.norm_floor is not None else np.zeros(k_max + 1)
    all_roots: list[complex] = []
    for s in range(n_samples):
        c = table[:, s]
        scale = np.max(np.abs(c))
        if scale == 0:
            continue
        good = np.nonzero((np.abs(c) > 1e-12 * scale)
                          & (np.abs(c) > 10.0 * floor))[0]
        if good.size < 2 * max_poles + 4:
            continue
        hi = int(good[-1])
        m = max_poles
        rows = min(2 * m + 6, hi - m)
        if rows < m:
            continue
        A = np.empty((rows, m), dtype=complex)
        y = np.empty(rows, dtype=complex)
        for r in range(rows):
            k = hi - r
            A[r] = c[k - 1:k - m - 1:-1] if k - m - 1 >= 0 else c[k - 1::-1][:m]
            y[r] = c[k]
        try:
            a, *_ = np.linalg.lstsq(A, y, rcond=None)
        except np.linalg.LinAlgError:
            continue
        char = np.concatenate([[1.0 + 0j], -a])       # lambda^m - a1 l^(m-1) ...
        lam = np.roots(char)
        for lv in lam:
            if abs(lv) > 1e-8:
                all_roots.append(1.0 / complex(lv))

    if not all_roots:
        return []
    # consensus clustering across columns
    pts = np.asarray(all_roots)
    scale = np.max(np.abs(pts))
    clusters: list[list[complex]] = []
    for p in sorted(pts, key=lambda z: abs(z)):
        for grp in clusters:
            if abs(p - grp[0]) <= max(rel_tol * abs(grp[0]), 1e-9 * scale):
                grp.append(p)
                break
        else:
            clusters.append([complex(p)])
    keep = [complex(np.mean(grp)) for grp in clusters
            if len(grp) >= max(2, n_samples // 2)]
    keep.sort(key=abs)
    return keep
