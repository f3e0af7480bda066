"""Certified lemniscate components, boundary contours, and the separating constructor.

A lemniscate here is the connected component containing 0 of a sublevel set
{|g| < rho} of a rational function. Components are certified by adaptive
quadtree subdivision with centered-form interval bounds: every inner box
carries a proved upper bound |g| < rho, every outer box a proved lower bound
|g| >= rho, and box-edge adjacency of the remaining cover contains the true
component. Boundary loops are traced on the level set with Newton correction
and resampled for spectrally accurate contour quadrature.

The constructor `separating_lemniscate` searches pole-anchored candidates
whose unit lemniscate provably contains a given union of disks and avoids a
given finite point set; `verify_separation` is the independent re-check used
at doubled depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import polyutil
from .errors import (
    BudgetExhausted,
    ComponentEscapesBox,
    DepthExhausted,
    InputError,
    TracingStalled,
)
from .rational import RationalFunction, eval_dlog, eval_rational

IN, OUT, BND = 0, 1, 2
_CLS_NAMES = {IN: "inside", OUT: "outside", BND: "boundary"}
_SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float


@dataclass(frozen=True)
class BoxCover:
    """Axis-aligned squares: centers (complex) and half-widths."""

    centers: np.ndarray
    half: np.ndarray

    @property
    def size(self) -> int:
        return self.centers.size

    @property
    def area(self) -> float:
        return float(np.sum((2.0 * self.half) ** 2))


@dataclass(frozen=True)
class Lemniscate:
    g: RationalFunction
    level: float
    inner_cover: BoxCover
    outer_cover: BoxCover
    bounding_box: tuple[complex, float]   # (center, half-width)
    escaped: bool
    max_depth: int
    fully_connected: bool                 # no sublevel island detached from 0
    leaves: BoxCover                      # full partition of the bounding box
    leaf_class: np.ndarray                # IN / OUT / BND per leaf
    leaf_inner: np.ndarray                # member of inner_cover

    def cover_rows(self):
        for c, h in zip(self.inner_cover.centers, self.inner_cover.half):
            yield float(c.real), float(c.imag), float(h), "inside"
        for c, h in zip(self.outer_cover.centers, self.outer_cover.half):
            yield float(c.real), float(c.imag), float(h), "boundary"


@dataclass(frozen=True)
class ContourLoop:
    zeta: np.ndarray       # nodes, equispaced in the loop parameter
    dzeta: np.ndarray      # d zeta / d theta at the nodes (theta in [0, 2pi))

    @property
    def n(self) -> int:
        return self.zeta.size

    def integrate(self, values: np.ndarray) -> complex:
        """Trapezoid rule for a closed loop: integral of F dzeta."""
        return complex(np.sum(values * self.dzeta) * (2 * np.pi / self.n))


@dataclass(frozen=True)
class Contour:
    loops: tuple[ContourLoop, ...]
    level: float
    closed: bool = True

    def integrate(self, values_per_loop) -> complex:
        return sum(lp.integrate(v) for lp, v in zip(self.loops, values_per_loop))


# ---------------------------------------------------------------------------
# interval bounds


def _g_bounds(g: RationalFunction, centers: np.ndarray, half: np.ndarray):
    """Certified (lower, upper) bounds of |g| on squares (enclosing disks)."""
    rb = half * _SQRT2
    m = g.zero_order_at_origin
    c0 = abs(g.numerator[m])
    az = np.abs(centers)
    lo_n = c0 * np.maximum(az - rb, 0.0) ** m
    hi_n = c0 * (az + rb) ** m

    b = polyutil.shift(g.denominator, centers)          # (dd+1, B)
    powers = rb[None, :] ** np.arange(b.shape[0])[:, None]
    t = np.abs(b) * powers
    tail = np.sum(t[1:], axis=0) if b.shape[0] > 1 else np.zeros_like(az)
    lo_d = np.abs(b[0]) - tail
    hi_d = np.abs(b[0]) + tail

    with np.errstate(divide="ignore", invalid="ignore"):
        hi_g = np.where(lo_d > 0.0, hi_n / np.maximum(lo_d, 1e-300), np.inf)
        lo_g = np.where(hi_d > 0.0, lo_n / np.maximum(hi_d, 1e-300), 0.0)
    return lo_g, hi_g


def upper_bound_on_disks(g: RationalFunction, disks: Sequence[Disk],
                         depth: int = 8) -> float:
    """Certified upper bound of |g| over a union of closed disks."""
    best = 0.0
    for d in disks:
        half0 = d.radius
        n = 2 ** depth
        cell = 2.0 * half0 / n
        idx = np.arange(n)
        xs = d.center.real - half0 + (idx + 0.5) * cell
        ys = d.center.imag - half0 + (idx + 0.5) * cell
        cx, cy = np.meshgrid(xs, ys)
        centers = (cx + 1j * cy).ravel()
        h = np.full(centers.size, cell / 2.0)
        # keep cells that intersect the disk
        keep = np.abs(centers - d.center) <= d.radius + h * _SQRT2
        _, hi = _g_bounds(g, centers[keep], h[keep])
        if hi.size:
            best = max(best, float(np.max(hi)))
    return best


# ---------------------------------------------------------------------------
# quadtree component region


def _pack(depth, ix, iy):
    return (ix.astype(np.int64) << np.int64(24)) | iy.astype(np.int64) \
        | (np.int64(depth) << np.int64(48))


def _edges_from_coords(depth_arr, ix, iy, max_depth):
    """Edge list (pairs of leaf indices) for box-edge adjacency of a quadtree."""
    keys = (ix.astype(np.int64) << np.int64(24)) | iy.astype(np.int64) \
        | (depth_arr.astype(np.int64) << np.int64(48))
    order = np.argsort(keys)
    skeys = keys[order]

    def lookup(qkeys):
        pos = np.searchsorted(skeys, qkeys)
        ok = (pos < skeys.size)
        pos = np.minimum(pos, skeys.size - 1)
        ok &= skeys[pos] == qkeys
        return np.where(ok, order[pos], -1)

    edges_a, edges_b = [], []
    n = keys.size
    all_idx = np.arange(n)
    dirs = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    for ddx, ddy in dirs:
        nx, ny = ix + ddx, iy + ddy
        valid = (nx >= 0) & (ny >= 0) & (nx < (1 << depth_arr)) & (ny < (1 << depth_arr))
        # same-depth neighbors (count each edge once via positive directions)
        if (ddx, ddy) in ((1, 0), (0, 1)):
            q = _pack(0, nx, ny) | (depth_arr.astype(np.int64) << np.int64(48))
            found = lookup(np.where(valid, q, -1))
            m = valid & (found >= 0)
            edges_a.append(all_idx[m])
            edges_b.append(found[m])
        # coarser neighbors: first ancestor of the adjacent cell that is a leaf
        pending = valid.copy()
        cx, cy = nx.copy(), ny.copy()
        for k in range(1, int(np.max(depth_arr)) + 1):
            pending &= depth_arr >= k
            if not np.any(pending):
                break
            axp, ayp = cx >> 1, cy >> 1
            own_ax, own_ay = ix >> k, iy >> k
            differs = (axp != own_ax) | (ayp != own_ay)
            q = _pack(0, axp, ayp) | ((depth_arr - k).astype(np.int64) << np.int64(48))
            found = lookup(np.where(pending & differs, q, -1))
            m = pending & differs & (found >= 0)
            edges_a.append(all_idx[m])
            edges_b.append(found[m])
            pending &= ~m
            cx, cy = axp, ayp
    return np.concatenate(edges_a), np.concatenate(edges_b)


def component_region(g: RationalFunction, rho: float,
                     box: tuple[complex, float] | None = None,
                     max_depth: int = 12,
                     escape: str = "error") -> Lemniscate:
    """Certified cover of the component of {|g| < rho} containing 0.

    Subdivides adaptively, classifies each box by interval bounds, and flood
    fills from the box containing 0. `escape` controls what happens when the
    component reaches the bounding-box frame: "error" raises
    ComponentEscapesBox, "truncate" records escaped=True and returns the
    box-truncated cover. Deterministic for fixed inputs.
    """
    if rho <= 0:
        raise InputError("level must be positive")
    if box is None:
        pole_scale = 1.0
        if g.denominator.size > 1:
            pole_scale = float(np.max(np.abs(g.poles()))) + 1.0
        box = (0j, 4.0 * pole_scale)
    center0, half0 = complex(box[0]), float(box[1])
    if abs(center0.real) > half0 or abs(center0.imag) > half0:
        raise InputError("bounding box must contain the origin")

    leaf_cx, leaf_h, leaf_cls = [], [], []
    leaf_d, leaf_ix, leaf_iy = [], [], []

    cur_ix = np.array([0], dtype=np.int64)
    cur_iy = np.array([0], dtype=np.int64)
    bnd_area_prev = None
    bnd_area_final = 0.0
    for depth in range(max_depth + 1):
        cell = half0 / (1 << depth) if depth else half0
        h = np.full(cur_ix.size, cell)
        cx = (center0.real - half0) + (2 * cur_ix + 1) * cell
        cy = (center0.imag - half0) + (2 * cur_iy + 1) * cell
        centers = cx + 1j * cy
        lo, hi = _g_bounds(g, centers, h)
        cls = np.full(cur_ix.size, BND, dtype=np.int8)
        cls[hi < rho] = IN
        cls[lo >= rho] = OUT

        keep = (cls != BND) if depth < max_depth else np.ones_like(cls, dtype=bool)
        leaf_cx.append(centers[keep])
        leaf_h.append(h[keep])
        leaf_cls.append(cls[keep])
        leaf_d.append(np.full(int(np.sum(keep)), depth, dtype=np.int64))
        leaf_ix.append(cur_ix[keep])
        leaf_iy.append(cur_iy[keep])

        bnd = cls == BND
        if depth == max_depth:
            bnd_area_final = float(np.sum((2 * h[bnd]) ** 2))
            break
        if not np.any(bnd):
            break
        bnd_area = float(np.sum((2 * h[bnd]) ** 2))
        if bnd_area_prev is not None and depth >= 4 and bnd_area > 0.92 * bnd_area_prev:
            raise DepthExhausted(
                f"boundary cover stopped shrinking at depth {depth} "
                f"({bnd_area:.3g} vs {bnd_area_prev:.3g})"
            )
        bnd_area_prev = bnd_area
        bx, by = cur_ix[bnd], cur_iy[bnd]
        cur_ix = np.concatenate([2 * bx, 2 * bx + 1, 2 * bx, 2 * bx + 1])
        cur_iy = np.concatenate([2 * by, 2 * by, 2 * by + 1, 2 * by + 1])

    centers = np.concatenate(leaf_cx)
    half = np.concatenate(leaf_h)
    cls = np.concatenate(leaf_cls)
    darr = np.concatenate(leaf_d)
    ixarr = np.concatenate(leaf_ix)
    iyarr = np.concatenate(leaf_iy)

    # seed: the leaf containing the origin
    inside_pt = (np.abs(centers.real) <= half + 1e-15) & (np.abs(centers.imag) <= half + 1e-15)
    seed_candidates = np.nonzero(inside_pt)[0]
    if seed_candidates.size == 0:
        raise DepthExhausted("no leaf contains the origin")
    seed = int(seed_candidates[np.argmax(darr[seed_candidates])])
    if cls[seed] != IN:
        raise DepthExhausted("origin not certified inside the lemniscate at this depth")

    non_out = np.nonzero(cls != OUT)[0]
    remap = -np.ones(centers.size, dtype=np.int64)
    remap[non_out] = np.arange(non_out.size)
    ea, eb = _edges_from_coords(darr[non_out], ixarr[non_out], iyarr[non_out],
                                max_depth)
    nn = non_out.size
    graph = coo_matrix((np.ones(ea.size), (ea, eb)), shape=(nn, nn))
    _, labels = connected_components(graph, directed=False)
    seed_label = labels[remap[seed]]
    reach = np.zeros(centers.size, dtype=bool)
    reach[non_out] = labels == seed_label

    # inner cover: IN-only connectivity from the seed
    in_idx = np.nonzero(cls == IN)[0]
    remap_in = -np.ones(centers.size, dtype=np.int64)
    remap_in[in_idx] = np.arange(in_idx.size)
    ea2, eb2 = _edges_from_coords(darr[in_idx], ixarr[in_idx], iyarr[in_idx], max_depth)
    graph2 = coo_matrix((np.ones(ea2.size), (ea2, eb2)),
                        shape=(in_idx.size, in_idx.size))
    _, labels2 = connected_components(graph2, directed=False)
    inner_mask = np.zeros(centers.size, dtype=bool)
    inner_mask[in_idx] = labels2 == labels2[remap_in[seed]]

    outer_mask = reach & ~inner_mask

    maxcoord = (np.int64(1) << darr) - 1
    frame = (ixarr == 0) | (iyarr == 0) | (ixarr == maxcoord) | (iyarr == maxcoord)
    escaped = bool(np.any(frame & reach))
    if escaped and escape == "error":
        raise ComponentEscapesBox(
            "component cover reaches the bounding box frame; enlarge the box "
            "or pass escape='truncate'"
        )

    # any sublevel territory not reached from 0 means possible extra components
    fully_connected = bool(np.all(reach[non_out]))

    return Lemniscate(
        g=g, level=float(rho),
        inner_cover=BoxCover(centers[inner_mask], half[inner_mask]),
        outer_cover=BoxCover(centers[outer_mask], half[outer_mask]),
        bounding_box=(center0, half0),
        escaped=escaped,
        max_depth=max_depth,
        fully_connected=fully_connected,
        leaves=BoxCover(centers, half),
        leaf_class=cls,
        leaf_inner=inner_mask,
    )


# ---------------------------------------------------------------------------
# cover queries


def _cover_query_structure(cover: BoxCover, bins: int = 64):
    if cover.size == 0:
        return None
    lo = np.min(cover.centers.real - cover.half), np.min(cover.centers.imag - cover.half)
    hi = np.max(cover.centers.real + cover.half), np.max(cover.centers.imag + cover.half)
    span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-300)
    cell = span / bins
    table: dict[tuple[int, int], list[int]] = {}
    for i in range(cover.size):
        c, h = cover.centers[i], cover.half[i]
        x0 = int((c.real - h - lo[0]) / cell)
        x1 = int((c.real + h - lo[0]) / cell)
        y0 = int((c.imag - h - lo[1]) / cell)
        y1 = int((c.imag + h - lo[1]) / cell)
        for bx in range(max(x0, 0), min(x1, bins) + 1):
            for by in range(max(y0, 0), min(y1, bins) + 1):
                table.setdefault((bx, by), []).append(i)
    return lo, cell, bins, table


def _boxes_near(struct, z: complex):
    if struct is None:
        return []
    lo, cell, bins, table = struct
    bx = int((z.real - lo[0]) / cell)
    by = int((z.imag - lo[1]) / cell)
    return table.get((bx, by), [])


def cover_contains_point(cover: BoxCover, struct, z: complex) -> bool:
    for i in _boxes_near(struct, z):
        if abs(z.real - cover.centers[i].real) <= cover.half[i] + 1e-15 and \
           abs(z.imag - cover.centers[i].imag) <= cover.half[i] + 1e-15:
            return True
    return False


def covers_disk(lem: Lemniscate, disk: Disk) -> bool:
    """True if the closed disk provably lies inside the inner cover.

    Because the leaves partition the bounding box, the disk is inside the
    inner-cover union exactly when it meets no non-inner leaf (interiors);
    tangency along shared edges is rejected, which errs on the safe side.
    """
    comp = ~lem.leaf_inner
    if not np.any(lem.leaf_inner):
        return False
    c0, h0 = lem.bounding_box
    if abs(disk.center.real - c0.real) + disk.radius > h0 or \
       abs(disk.center.imag - c0.imag) + disk.radius > h0:
        return False
    cx = lem.leaves.centers[comp]
    hh = lem.leaves.half[comp]
    dx = np.maximum(np.abs(disk.center.real - cx.real) - hh, 0.0)
    dy = np.maximum(np.abs(disk.center.imag - cx.imag) - hh, 0.0)
    return not bool(np.any(dx * dx + dy * dy < disk.radius ** 2 * (1 - 1e-12)))


def point_certified_outside(lem: Lemniscate, z: complex) -> bool:
    """True if z lies in a leaf with a certified lower bound |g| >= level."""
    cx = lem.leaves.centers
    hh = lem.leaves.half
    hit = (np.abs(z.real - cx.real) <= hh + 1e-15) & \
        (np.abs(z.imag - cx.imag) <= hh + 1e-15)
    return bool(np.any(hit & (lem.leaf_class == OUT)))


def spot_check(lem: Lemniscate, n: int, rng) -> bool:
    """Random soundness check of the certified covers."""
    ok = True
    if lem.inner_cover.size:
        idx = rng.integers(0, lem.inner_cover.size, size=n)
        dx = rng.uniform(-1, 1, size=n) + 1j * rng.uniform(-1, 1, size=n)
        pts = lem.inner_cover.centers[idx] + dx * lem.inner_cover.half[idx]
        ok &= bool(np.all(np.abs(eval_rational(lem.g, pts)) < lem.level))
    return ok


# ---------------------------------------------------------------------------
# level-set tracing


def _project_to_level(g: RationalFunction, z: complex, rho: float,
                      tol: float = 1e-13, max_iter: int = 40):
    logrho = np.log(rho)
    for _ in range(max_iter):
        val = eval_rational(g, z)
        if val == 0:
            return None
        phi = np.log(abs(val)) - logrho
        if abs(phi) < tol:
            return z
        dl = eval_dlog(g, z)
        if abs(dl) < 1e-300:
            return None
        step = -phi * np.conj(dl) / abs(dl) ** 2
        # damp: the log-level Newton step is locally exact, wild steps mean
        # we are near a stationary point of |g|
        if abs(step) > 10.0 / max(abs(dl), 1e-300):
            return None
        z = z + step
    return z if abs(np.log(abs(eval_rational(g, z))) - logrho) < 1e-9 else None


def _project_many(g, zs, rho, tol: float = 1e-13, max_iter: int = 50):
    """Vectorized damped Newton projection of all nodes onto {|g| = rho}."""
    z = np.asarray(zs, dtype=complex).copy()
    logrho = np.log(rho)
    for _ in range(max_iter):
        vals = eval_rational(g, z)
        if np.any(vals == 0):
            raise TracingStalled("node projection hit a zero of g")
        phi = np.log(np.abs(vals)) - logrho
        if np.max(np.abs(phi)) < tol:
            return z
        dl = eval_dlog(g, z)
        bad = np.abs(dl) < 1e-300
        if np.any(bad):
            raise TracingStalled("node projection hit a stationary point of |g|")
        z = z - phi * np.conj(dl) / np.abs(dl) ** 2
    if np.max(np.abs(np.log(np.abs(eval_rational(g, z))) - logrho)) < 1e-9:
        return z
    raise TracingStalled("node projection onto the level set failed")


def _march_loop(g: RationalFunction, rho: float, seed: complex, step: float,
                max_steps: int = 200000):
    z0 = _project_to_level(g, seed, rho)
    if z0 is None:
        return None
    pts = [z0]
    z = z0
    direction = None
    for k in range(max_steps):
        dl = eval_dlog(g, z)
        if abs(dl) < 1e-300:
            return None
        tangent = 1j * np.conj(dl) / abs(dl)
        if direction is not None and (tangent * np.conj(direction)).real < 0:
            tangent = -tangent
        direction = tangent
        z_pred = z + step * tangent
        z_new = _project_to_level(g, z_pred, rho)
        if z_new is None:
            return None
        pts.append(z_new)
        z = z_new
        if k >= 8 and abs(z - z0) < 0.75 * step:
            return np.asarray(pts, dtype=complex)
    return None


def _resample_closed(pts: np.ndarray, n: int) -> np.ndarray:
    closed = np.concatenate([pts, pts[:1]])
    seg = np.abs(np.diff(closed))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    targets = np.linspace(0.0, total, n, endpoint=False)
    re = np.interp(targets, s, closed.real)
    im = np.interp(targets, s, closed.imag)
    return re + 1j * im


def _spectral_tangent(z: np.ndarray) -> np.ndarray:
    n = z.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    return np.fft.ifft(1j * k * np.fft.fft(z))


def _loop_from_points(g, rho, raw, nodes):
    z = _resample_closed(raw, nodes)
    for _ in range(3):
        z = _project_many(g, z, rho)
        z = _resample_closed(z, nodes)
    z = _project_many(g, z, rho)
    dz = _spectral_tangent(z)
    # orient so the sublevel side lies on the left of the tangent
    t_unit = dz / np.maximum(np.abs(dz), 1e-300)
    h_local = np.median(np.abs(np.diff(np.concatenate([z, z[:1]]))))
    left = z + 0.25 * h_local * 1j * t_unit
    inside_votes = np.abs(eval_rational(g, left)) < rho
    if np.mean(inside_votes) < 0.5:
        z = z[::-1].copy()
        dz = _spectral_tangent(z)
    return ContourLoop(zeta=z, dzeta=dz)


def _check_regular_level(g: RationalFunction, rho: float):
    # stationary points of |g| away from zeros/poles satisfy g'(z) = 0:
    # numerator of g' is n'd - nd'
    n, d = g.numerator, g.denominator
    dn, dd = polyutil.derivative(n), polyutil.derivative(d)
    num = np.polynomial.polynomial.polysub(
        np.polynomial.polynomial.polymul(dn, d),
        np.polynomial.polynomial.polymul(n, dd))
    num = polyutil.trim(num, 1e-14)
    if num.size <= 1:
        return
    crit = polyutil.roots(num)
    for c in crit:
        den_val = polyutil.horner(g.denominator, c)
        if abs(den_val) < 1e-12:
            continue
        val = abs(eval_rational(g, c))
        if abs(val - rho) < 1e-6 * rho:
            raise TracingStalled(
                f"level {rho} passes within 1e-6 of a critical value of |g| at {c}"
            )


def boundary_contour(lem: Lemniscate, nodes_per_loop: int = 256) -> Contour:
    """Trace every boundary loop of the certified component.

    Loops are returned equispaced in parameter with spectral tangents and
    oriented so the component lies on the left.
    """
    if lem.outer_cover.size == 0:
        raise TracingStalled("lemniscate has an empty boundary cover")
    _check_regular_level(lem.g, lem.level)
    bnd = lem.outer_cover
    consumed = np.zeros(bnd.size, dtype=bool)
    step = 3.0 * float(np.median(bnd.half))
    loops: list[ContourLoop] = []
    order = np.argsort(bnd.centers.real + 1e-6 * bnd.centers.imag)
    for i in order:
        if consumed[i]:
            continue
        consumed[i] = True
        raw = _march_loop(lem.g, lem.level, complex(bnd.centers[i]), step)
        if raw is None:
            continue
        loop = _loop_from_points(lem.g, lem.level, raw, nodes_per_loop)
        gap = float(np.median(np.abs(np.diff(loop.zeta)))) + 1e-300
        # truncated covers can seed the same loop repeatedly; drop duplicates
        dup = any(
            float(np.max(np.min(np.abs(loop.zeta[:, None] - old.zeta[None, :]),
                                axis=1))) < 3.0 * gap
            for old in loops
        )
        if not dup:
            loops.append(loop)
        d = np.min(np.abs(bnd.centers[:, None]
                          - raw[None, ::max(1, raw.size // 1024)]), axis=1)
        consumed |= d <= 4.0 * bnd.half + 2.0 * step
    if not loops:
        raise TracingStalled("no boundary loop could be traced")
    return Contour(loops=tuple(loops), level=lem.level)


def level_contour(g: RationalFunction, rho: float, nodes_per_loop: int = 256,
                  ray_count: int = 8, reach: float = 1e6) -> Contour:
    """Fast single-loop contour of {|g| = rho} around 0 (uncertified).

    Finds the first level crossing along rays from the origin and traces the
    loop through it. Downstream quadrature validates the cycle with the
    reproducing-kernel identity; use `component_region` + `boundary_contour`
    when a certified cover is needed.
    """
    if g.denominator.size == 1:
        # monomial: the level set is exactly a circle
        c0 = g.numerator[g.zero_order_at_origin] / g.denominator[0]
        r0 = (rho / abs(c0)) ** (1.0 / g.zero_order_at_origin)
        th = 2 * np.pi * np.arange(nodes_per_loop) / nodes_per_loop
        z = r0 * np.exp(1j * th)
        return Contour(loops=(ContourLoop(zeta=z, dzeta=1j * z),), level=rho)
    _check_regular_level(g, rho)
    seed = None
    for j in range(ray_count):
        direction = np.exp(2j * np.pi * (j / ray_count + 0.0317))
        t = 1e-3
        prev = 0.0
        while t < reach:
            try:
                val = abs(eval_rational(g, t * direction))
            except Exception:
                break
            if val >= rho:
                seed = 0.5 * (prev + t) * direction
                break
            prev = t
            t *= 1.25
        if seed is not None:
            break
    if seed is None:
        raise TracingStalled(f"no level crossing |g| = {rho} found along rays")
    z0 = _project_to_level(g, seed, rho)
    if z0 is None:
        raise TracingStalled("seed projection failed")
    # coarse marching captures the topology; the vectorized resample-project
    # refinement in _loop_from_points supplies the accuracy
    step = max(abs(z0), 1e-6) * (2 * np.pi / 96)
    raw = None
    for trial_step in (step, step / 8, step * 4):
        raw = _march_loop(g, rho, z0, trial_step)
        if raw is not None:
            break
    if raw is None:
        raise TracingStalled("loop marching failed")
    loop = _loop_from_points(g, rho, raw, nodes_per_loop)
    return Contour(loops=(loop,), level=rho)


# ---------------------------------------------------------------------------
# separating constructor


@dataclass(frozen=True)
class SeparationReport:
    ok: bool
    keep_inside: bool
    avoid_outside: bool
    connected: bool
    lemniscate: Lemniscate | None
    detail: str = ""


def verify_separation(g: RationalFunction, keep: Sequence[Disk],
                      avoid: Sequence[complex], max_depth: int,
                      box: tuple[complex, float] | None = None) -> SeparationReport:
    """Certify that the unit lemniscate of g contains `keep` and avoids `avoid`."""
    if box is None:
        extent = max([abs(d.center) + d.radius for d in keep] +
                     [abs(s) for s in avoid] + [1.0])
        box = (0j, 1.2 * extent + 1.0)
    try:
        lem = component_region(g, 1.0, box=box, max_depth=max_depth,
                               escape="truncate")
    except (DepthExhausted, InputError) as exc:
        return SeparationReport(False, False, False, False, None, f"region failed: {exc}")

    keep_ok = all(covers_disk(lem, d) for d in keep)
    avoid_ok = all(point_certified_outside(lem, complex(s)) for s in avoid)
    connected = lem.fully_connected
    ok = keep_ok and avoid_ok and connected
    return SeparationReport(ok, keep_ok, avoid_ok, connected, lem)


def _cluster_points(points: np.ndarray, tol: float) -> list[complex]:
    reps: list[list[complex]] = []
    for p in sorted(points, key=lambda z: (z.real, z.imag)):
        for grp in reps:
            if any(abs(p - q) <= tol for q in grp):
                grp.append(p)
                break
        else:
            reps.append([p])
    return [complex(np.mean(grp)) for grp in reps]


def _multiplicity_vectors(sites: int, total: int):
    """All ways to distribute `total` among `sites` with every entry >= 1."""
    if sites == 0:
        yield ()
        return
    if sites == 1:
        yield (total,)
        return
    for first in range(1, total - sites + 2):
        for rest in _multiplicity_vectors(sites - 1, total - first):
            yield (first,) + rest


def separating_lemniscate(avoid: Sequence[complex], keep: Sequence[Disk],
                          budget: int = 64,
                          pole_sites: Sequence[complex] | None = None,
                          max_sites: int = 6,
                          search_depth: int = 8,
                          sup_margin: float = 0.5) -> RationalFunction:
    """Construct g in the exact family whose unit lemniscate separates sets.

    The lemniscate {|g| < 1} (component of 0) must contain every disk in
    `keep`, exclude every point of `avoid`, and be connected. Candidates are
    pole-anchored: g = c * z^m / prod (z - site)^mult with the scale c the
    largest power of two keeping the certified sup over `keep` at or below
    `sup_margin`; coefficients are rounded to exact fractions before
    verification, so the accepted member lies in the enumerable family.

    Raises BudgetExhausted (with the best failed candidate) when no candidate
    certifies within the budget.
    """
    avoid = [complex(s) for s in avoid]
    if any(abs(s) < 1e-12 for s in avoid):
        raise InputError("the avoided set must not contain the origin")
    if not keep:
        raise InputError("need at least one disk to keep")
    if not any(abs(d.center) <= d.radius for d in keep):
        raise InputError("the expansion center 0 must lie in the kept compact")
    for s in avoid:
        for d in keep:
            if abs(s - d.center) <= d.radius:
                raise InputError(f"avoided point {s} lies inside a kept disk")

    if pole_sites is not None:
        sites = [complex(s) for s in pole_sites]
    elif avoid:
        span = max(abs(a - b) for a in avoid for b in avoid) if len(avoid) > 1 else 0.0
        sites = _cluster_points(np.asarray(avoid), tol=span / max_sites if span else 0.0)
        if len(sites) > max_sites:
            sites = _cluster_points(np.asarray(avoid), tol=span / 2)[:max_sites]
    else:
        sites = []

    tried = 0
    best = (None, -np.inf)

    def candidates():
        if not sites:
            yield {}, 1
            yield {}, 2
            return
        ns = len(sites)
        for total in range(ns, ns + 4):
            for mult in _multiplicity_vectors(ns, total):
                for m_num in range(1, total + 1):
                    yield dict(zip(sites, mult)), m_num

    for poles, m_num in candidates():
        if tried >= budget:
            break
        tried += 1
        raw = RationalFunction.from_poles(1.0, m_num, poles) if poles else \
            RationalFunction.monomial(1.0, m_num)
        sup = upper_bound_on_disks(raw, keep)
        if not np.isfinite(sup) or sup <= 0:
            continue
        # 5% allowance absorbs the interval slack of the certified sup; the
        # separation verification below is the actual acceptance gate
        t = int(np.floor(np.log2(sup_margin * 1.05 / sup)))
        scale = 2.0 ** t
        cand = (RationalFunction.from_poles(scale, m_num, poles) if poles else
                RationalFunction.monomial(scale, m_num)).rounded_to_exact()
        report = verify_separation(cand, keep, avoid, max_depth=search_depth)
        if report.ok:
            return cand
        score = float(report.keep_inside) + float(report.avoid_outside) \
            + float(report.connected)
        if score > best[1]:
            best = (cand, score)

    raise BudgetExhausted(
        f"no separating lemniscate found within {tried} candidates",
        best_candidate=best[0], best_score=best[1],
    )
