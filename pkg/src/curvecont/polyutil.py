"""Univariate complex polynomial helpers.

Coefficients are stored ascending (c[0] + c[1]*x + ...), as plain complex
ndarrays. Everything here broadcasts over point arrays where that is useful
for the subdivision and quadrature code.
"""

from __future__ import annotations

import numpy as np

from .errors import RootSolverDivergence


def trim(coeffs, tol: float = 0.0) -> np.ndarray:
    """Drop trailing (highest-degree) coefficients with magnitude <= tol."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel()
    scale = np.max(np.abs(c)) if c.size else 0.0
    k = c.size - 1
    while k > 0 and abs(c[k]) <= tol * max(scale, 1.0):
        k -= 1
    return c[: k + 1].copy()


def horner(coeffs, x):
    """Evaluate the polynomial at x (scalar or ndarray)."""
    c = np.asarray(coeffs, dtype=complex)
    acc = np.zeros_like(np.asarray(x, dtype=complex))
    for k in range(c.size - 1, -1, -1):
        acc = acc * x + c[k]
    return acc


def derivative(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    if c.size <= 1:
        return np.zeros(1, dtype=complex)
    return c[1:] * np.arange(1, c.size)


def shift(coeffs, centers):
    """Taylor-shift coefficients to each center: p(c + d) = sum_k out[k] d^k.

    centers may be an ndarray; the result has shape (deg+1,) + centers.shape.
    Uses the repeated synthetic-division (Horner shift) scheme.
    """
    c = np.asarray(coeffs, dtype=complex)
    z = np.asarray(centers, dtype=complex)
    n = c.size
    out = np.empty((n,) + z.shape, dtype=complex)
    out[:] = c.reshape((n,) + (1,) * z.ndim)
    for k in range(n):
        for j in range(n - 2, k - 1, -1):
            out[j] = out[j] + z * out[j + 1]
    return out


def deflate(coeffs, root):
    """Divide p by (x - root) with synthetic division, discarding the remainder.

    root may be an ndarray; result has shape (deg,) + root.shape.
    """
    c = np.asarray(coeffs, dtype=complex)
    r = np.asarray(root, dtype=complex)
    n = c.size
    if n < 2:
        return np.zeros((1,) + r.shape, dtype=complex)
    out = np.empty((n - 1,) + r.shape, dtype=complex)
    acc = np.broadcast_to(c[n - 1], r.shape).astype(complex)
    out[n - 2] = acc
    for j in range(n - 2, 0, -1):
        acc = acc * r + c[j]
        out[j - 1] = acc
    return out


def from_roots(roots, leading: complex = 1.0) -> np.ndarray:
    """Monic-from-roots times leading, ascending coefficients."""
    c = np.array([leading], dtype=complex)
    for r in np.atleast_1d(np.asarray(roots, dtype=complex)):
        c = np.convolve(c, np.array([-r, 1.0], dtype=complex))
    return c


def _residual_scale(coeffs, x):
    """Upper bound for the roundoff in evaluating p at x (Oliver-style)."""
    mags = np.abs(np.asarray(coeffs))
    ax = np.abs(np.asarray(x))
    acc = np.zeros_like(ax)
    for k in range(mags.size - 1, -1, -1):
        acc = acc * ax + mags[k]
    return acc


def roots(coeffs, start=None, tol: float = 1e-13, max_iter: int = 80) -> np.ndarray:
    """All roots of the polynomial by simultaneous (Aberth-Ehrlich) iteration.

    Initial guesses come from the companion matrix unless a warm start is
    given (used heavily by the branch tracker). Convergence is declared on
    the backward-error criterion |p(x)| <= tol * roundoff_scale(x).

    Raises RootSolverDivergence if residuals fail to settle.
    """
    c = trim(coeffs, 0.0)
    deg = c.size - 1
    if deg == 0:
        return np.zeros(0, dtype=complex)
    if deg == 1:
        return np.array([-c[0] / c[1]], dtype=complex)

    if start is not None and len(start) == deg:
        x = np.asarray(start, dtype=complex).copy()
    else:
        x = np.roots(c[::-1]).astype(complex)

    dc = derivative(c)
    for _ in range(max_iter):
        p = horner(c, x)
        bound = _residual_scale(c, x) * (50 * np.finfo(float).eps)
        if np.all(np.abs(p) <= np.maximum(bound, tol * np.max(np.abs(c)) * 1e-3)):
            return x
        dp = horner(dc, x)
        dp = np.where(np.abs(dp) < 1e-300, 1e-300, dp)
        newton = p / dp
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        repel = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * repel
        denom = np.where(np.abs(denom) < 1e-12, 1e-12, denom)
        step = newton / denom
        # damp wild steps so clustered configurations cannot explode
        big = np.abs(step) > 10.0 * (1.0 + np.abs(x))
        step = np.where(big, step / np.abs(step) * 10.0 * (1.0 + np.abs(x)), step)
        x = x - step

    p = horner(c, x)
    bound = _residual_scale(c, x) * (1e6 * np.finfo(float).eps)
    if np.all(np.abs(p) <= bound):
        return x
    raise RootSolverDivergence(
        f"root residuals stalled at {np.max(np.abs(p)):.3e} for degree {deg}"
    )
