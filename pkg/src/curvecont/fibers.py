"""Fiberwise analysis of candidate singular sets.

Per parameter value z the suspected singular points form a finite fiber.
Three certificates are computed here: the transfinite-diameter capacity of
each fiber (whose log should behave subharmonically in z), a polynomial
least-squares model of the elementary symmetric functions of the fiber
(finite-fibered analytic sets are zero sets of monic polynomials with
coefficients holomorphic in z, so a good fit is evidence of analyticity),
and a Laurent-coefficient probe that distinguishes genuine singularities
from coverage artifacts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from . import polyutil
from .curves import AlgebraicCurve, CurvePoint, track_fiber, _fiber_at, fiber_gap
from .errors import (
    AtCriticalPoint,
    EmptySet,
    IllConditionedFit,
    InputError,
    RaggedFibers,
)
from .expansion import PshReport, psh_check
from .lemniscates import Disk

FIBER_CLUSTER_TOL = 1e-8


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class SingularFiberSet:
    """Finite fibers of suspected singular points over a parameter grid."""

    z_grid: np.ndarray                       # complex parameter values
    fibers: tuple                            # per z: tuple of (point, sheet_tag)
    max_fiber_size: int

    def __post_init__(self):
        sizes = [len(f) for f in self.fibers]
        if sizes and max(sizes) > self.max_fiber_size:
            raise InputError("fiber exceeds declared max_fiber_size")

    def points(self, i: int) -> np.ndarray:
        return np.array([p for p, _ in self.fibers[i]], dtype=complex)

    def sizes(self) -> np.ndarray:
        return np.array([len(f) for f in self.fibers], dtype=int)

    def rows(self):
        for z, fiber in zip(self.z_grid, self.fibers):
            for idx, (p, sheet) in enumerate(fiber):
                yield complex(z), idx, complex(p), int(sheet)


def make_fiber_set(z_grid, fibers) -> SingularFiberSet:
    """Deduplicate fiber points within tolerance and freeze the set."""
    z_grid = np.asarray(z_grid, dtype=complex).ravel()
    out = []
    for fib in fibers:
        pts: list[tuple[complex, int]] = []
        scale = 1.0 + max((abs(p) for p, _ in fib), default=0.0)
        for p, sheet in fib:
            if all(abs(p - q) > FIBER_CLUSTER_TOL * scale for q, _ in pts):
                pts.append((complex(p), int(sheet)))
        out.append(tuple(pts))
    mx = max((len(f) for f in out), default=0)
    return SingularFiberSet(z_grid=z_grid, fibers=tuple(out), max_fiber_size=mx)


@dataclass(frozen=True)
class WeierstrassFit:
    degree: int
    sym_values: np.ndarray        # (n_z, degree): sigma_j at each z
    model: np.ndarray             # (degree, model_degree+1) fit coefficients
    model_degree: int
    residual: float
    scale: float
    consistent: bool

    @property
    def verdict(self) -> str:
        return "consistent-with-analytic" if self.consistent else "negative"


@dataclass(frozen=True)
class CapacityReport:
    z_grid: np.ndarray
    capacities: np.ndarray
    log_capacities: np.ndarray    # NaN where capacity is 0 or undefined
    subharmonicity: PshReport | None
    fekete_points: tuple = ()


# ---------------------------------------------------------------------------
# capacity (transfinite diameter)


def _log_energy(points: np.ndarray) -> float:
    n = points.size
    d = np.abs(points[:, None] - points[None, :])
    iu = np.triu_indices(n, 1)
    vals = d[iu]
    if np.any(vals == 0):
        return -math.inf
    return float(np.sum(np.log(vals)))


def _diameter_from_energy(energy: float, n: int) -> float:
    if n < 2:
        return 0.0
    if energy == -math.inf:
        return 0.0
    return math.exp(2.0 * energy / (n * (n - 1)))


def _fekete_ascent(cands: np.ndarray, n: int, rng, restarts: int = 3,
                   sweeps: int = 40):
    """Greedy Leja start plus local exchange ascent of the log energy."""
    best_e, best_pts = -math.inf, None
    with np.errstate(divide="ignore"):
        for r in range(restarts):
            if r == 0:
                pts = [cands[0]]
                for _ in range(n - 1):
                    contrib = np.sum(
                        np.log(np.abs(cands[:, None] - np.asarray(pts)[None, :])),
                        axis=1)
                    pts.append(cands[int(np.argmax(contrib))])
                pts = np.asarray(pts, dtype=complex)
            else:
                idx = rng.choice(cands.size, size=n, replace=False)
                pts = cands[idx].astype(complex)
            for _ in range(sweeps):
                improved = False
                for i in range(n):
                    others = np.delete(pts, i)
                    contrib = np.sum(
                        np.log(np.abs(cands[:, None] - others[None, :])), axis=1)
                    j = int(np.argmax(contrib))
                    cur = float(np.sum(np.log(np.abs(pts[i] - others))))
                    if contrib[j] > cur + 1e-13:
                        pts[i] = cands[j]
                        improved = True
                if not improved:
                    break
            e = _log_energy(pts)
            if e > best_e:
                best_e, best_pts = e, pts.copy()
    return best_pts, best_e


def capacity(compact, n_fekete: int = 32, rng=None,
             return_points: bool = False):
    """Transfinite-diameter capacity estimate of a planar compact.

    Finite point sets get the raw n-point diameter (n = min(n_fekete, size),
    exact subset search up to 12 candidates); disks and segments are sampled
    on their boundaries and maximized by Fekete ascent, with the diagonal
    n^(1/(n-1)) correction removed so a disk of radius r reports r.
    """
    rng = np.random.default_rng(0) if rng is None else rng

    if isinstance(compact, Disk):
        compact = [compact]
    if isinstance(compact, (list, tuple)) and compact and isinstance(compact[0], Disk):
        samples = []
        for d in compact:
            m = max(256, 8 * n_fekete)
            th = 2 * np.pi * np.arange(m) / m
            samples.append(d.center + d.radius * np.exp(1j * th))
        cands = np.concatenate(samples)
        n = min(n_fekete, cands.size)
        pts, e = _fekete_ascent(cands, n, rng)
        corr = n ** (1.0 / (n - 1)) if n > 1 else 1.0
        val = _diameter_from_energy(e, n) / corr
        return (val, pts) if return_points else val

    if isinstance(compact, dict) and compact.get("kind") == "segment":
        a, b = complex(compact["a"]), complex(compact["b"])
        m = max(512, 16 * n_fekete)
        cands = a + (b - a) * np.linspace(0, 1, m)
        n = min(n_fekete, cands.size)
        pts, e = _fekete_ascent(cands, n, rng)
        corr = n ** (1.0 / (n - 1)) if n > 1 else 1.0
        val = _diameter_from_energy(e, n) / corr
        return (val, pts) if return_points else val

    points = np.atleast_1d(np.asarray(compact, dtype=complex)).ravel()
    if points.size == 0:
        raise EmptySet("capacity of an empty set")
    n = min(n_fekete, points.size)
    if n < 2:
        return (0.0, points) if return_points else 0.0
    if points.size <= 12 and n < points.size:
        best = max(
            (_log_energy(np.asarray(sub)) for sub in combinations(points, n)),
        )
        val = _diameter_from_energy(best, n)
        pts = points
    elif n == points.size:
        val = _diameter_from_energy(_log_energy(points), n)
        pts = points
    else:
        pts, e = _fekete_ascent(points, n, rng)
        val = _diameter_from_energy(e, n)
    return (val, pts) if return_points else val


def capacity_field(sfs: SingularFiberSet, slack: float = 1e-3,
                   grid_shape=None) -> CapacityReport:
    """Per-z fiber capacity with a subharmonicity check of its log.

    Empty and singleton fibers have capacity 0 and are masked from the log
    field. The submean check runs when the grid is (reshapeable to) a 2D
    lattice; otherwise the report carries no subharmonicity section.
    """
    caps = np.array([capacity(sfs.points(i)) if len(sfs.fibers[i]) else 0.0
                     for i in range(sfs.z_grid.size)])
    logs = np.where(caps > 0, np.log(np.maximum(caps, 1e-300)), np.nan)
    report = None
    if grid_shape is not None:
        u = logs.reshape(grid_shape)
        try:
            report = psh_check(u, slack=slack)
        except Exception:
            report = None
    return CapacityReport(z_grid=sfs.z_grid, capacities=caps,
                          log_capacities=logs, subharmonicity=report)


# ---------------------------------------------------------------------------
# Weierstrass-polynomial fitting


def _elementary_symmetric(points: np.ndarray) -> np.ndarray:
    """sigma_1..sigma_m of the fiber (coefficients of prod (X - p))."""
    coeffs = polyutil.from_roots(points)      # ascending, monic
    m = points.size
    # prod (X - p_i) = X^m - s1 X^(m-1) + s2 X^(m-2) - ...
    return np.array([(-1) ** (j + 1) * coeffs[m - 1 - j] for j in range(m)])


def weierstrass_fit(sfs: SingularFiberSet, model_degree: int = 8,
                    verdict_tol: float = 1e-6) -> WeierstrassFit:
    """Fit elementary symmetric functions of the fibers by polynomials in z.

    Symmetric functions remove the point-matching problem; ragged fiber sizes
    are an error (padding would fabricate analyticity). The verdict is
    consistent-with-analytic iff the max fit deviation stays below
    verdict_tol times the value scale.
    """
    sizes = sfs.sizes()
    if sfs.z_grid.size == 0 or np.all(sizes == 0):
        return WeierstrassFit(degree=0, sym_values=np.zeros((sfs.z_grid.size, 0)),
                              model=np.zeros((0, model_degree + 1)),
                              model_degree=model_degree, residual=0.0,
                              scale=1.0, consistent=True)
    m = int(sizes[0])
    if np.any(sizes != m):
        bad = [complex(z) for z, s in zip(sfs.z_grid, sizes) if s != m]
        raise RaggedFibers(
            f"fiber sizes differ across the grid (expected {m})", offending=bad)
    if sfs.z_grid.size < 2 * (model_degree + 1):
        raise InputError(
            f"need >= {2 * (model_degree + 1)} grid nodes for degree {model_degree}")

    sym = np.stack([_elementary_symmetric(sfs.points(i))
                    for i in range(sfs.z_grid.size)])          # (n_z, m)
    zscale = max(1.0, float(np.max(np.abs(sfs.z_grid))))
    v = np.vander(sfs.z_grid / zscale, model_degree + 1, increasing=True)
    sing = np.linalg.svd(v, compute_uv=False)
    if sing[-1] < 1e-12 * sing[0]:
        raise IllConditionedFit("Vandermonde matrix is numerically rank deficient")
    coef, *_ = np.linalg.lstsq(v, sym, rcond=None)             # (deg+1, m)
    fitted = v @ coef
    residual = float(np.max(np.abs(sym - fitted)))
    scale = 1.0 + float(np.max(np.abs(sym)))
    return WeierstrassFit(degree=m, sym_values=sym, model=coef.T,
                          model_degree=model_degree, residual=residual,
                          scale=scale, consistent=residual < verdict_tol * scale)


# ---------------------------------------------------------------------------
# singularity probe (Laurent tail on two concentric circles)


def laurent_tail(f: Callable, curve: AlgebraicCurve, z, center: CurvePoint,
                 radius: float, depth: int = 8, nodes: int = 256):
    """Coefficients c_{-1}..c_{-depth} of f(z, .) around `center` on its sheet.

    Returns (tail, f_scale), where f_scale is the max modulus of f on the
    probe circle (the reference for the noise floor).
    """
    z0 = complex(center.xi)
    if curve.critical_xi.size:
        clearance = float(np.min(np.abs(curve.critical_xi - z0)))
        if clearance <= 2.0 * radius:
            raise AtCriticalPoint(
                f"probe circle of radius {radius} too close to the critical set")
    fiber0 = _fiber_at(curve, z0)
    idx = int(np.argmin(np.abs(fiber0 - center.eta)))
    ring = list(z0 + radius * np.exp(2j * np.pi * np.arange(nodes + 1) / nodes))
    path = [z0, ring[0]] + ring
    _, rec = track_fiber(curve, path, fiber0=fiber0, record_at_nodes=True,
                         check_clearance=False)
    etas = [rec[2 + m][idx] for m in range(nodes)]
    vals = np.array([f(z, CurvePoint(ring[m], complex(etas[m])))
                     for m in range(nodes)], dtype=complex)
    ms = np.arange(1, depth + 1)
    phases = np.exp(2j * np.pi * np.outer(ms, np.arange(nodes)) / nodes)
    tail = (radius ** ms) * (phases @ vals) / nodes
    return tail, float(np.max(np.abs(vals)))


def pseudoconcavity_probe(f: Callable, curve: AlgebraicCurve, z,
                          candidate: CurvePoint, radius: float,
                          noise_floor: float = 1e-9,
                          depth: int = 8) -> bool:
    """True when f(z, .) fails to extend holomorphically across the candidate.

    Laurent tails are computed on two concentric circles; agreement between
    them validates holomorphy on the annulus, and a tail above the noise
    floor (relative to the function scale on the circle) on both circles
    witnesses a genuine singularity.
    """
    def hit(r: float) -> bool:
        tail, fmax = laurent_tail(f, curve, z, candidate, r, depth=depth)
        return bool(np.max(np.abs(tail)) > noise_floor * (1.0 + fmax) * r)

    outer, inner = hit(radius), hit(0.5 * radius)
    if outer != inner:
        # annulus may contain other singularities; shrink once and retest
        return hit(0.25 * radius)
    return outer


def deepest_negative_index(tail: np.ndarray, f_scale: float,
                           noise_floor: float = 1e-9) -> int:
    """Largest m with |c_{-m}| above the floor (0 when none)."""
    idx = 0
    for m in range(tail.size, 0, -1):
        if abs(tail[m - 1]) > noise_floor * (1.0 + f_scale):
            idx = m
            break
    return idx


