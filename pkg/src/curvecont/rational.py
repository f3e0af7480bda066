"""Rational functions with their only zero at the origin.

These index the expansion domains: g(0) = 0, the numerator is a single
monomial c*zeta^m, and the denominator does not vanish at 0. Members of the
countable enumeration family carry exact Gaussian-rational coefficients
(pairs of fractions), from which the float coefficients are derived, so
exactness claims and numerics cannot drift apart.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import polyutil
from .errors import InputError, PoleHit

ExactCoeff = tuple[Fraction, Fraction]  # (real, imaginary)


def _coeff_to_complex(c: ExactCoeff) -> complex:
    return complex(float(c[0]), float(c[1]))


def coeff_to_string(c: ExactCoeff) -> str:
    re_p, im_p = c
    sign = "+" if im_p >= 0 else "-"
    return f"{re_p.numerator}/{re_p.denominator}{sign}{abs(im_p.numerator)}/{im_p.denominator}i"


_COEFF_RE = re.compile(r"^([+-]?\d+)/(\d+)([+-])(\d+)/(\d+)i$")


def coeff_from_string(s: str) -> ExactCoeff:
    m = _COEFF_RE.match(s.strip())
    if not m:
        raise InputError(f"bad exact coefficient {s!r}; expected 'p/q+r/si'")
    re_p = Fraction(int(m.group(1)), int(m.group(2)))
    im_p = Fraction(int(m.group(4)), int(m.group(5)))
    if m.group(3) == "-":
        im_p = -im_p
    return (re_p, im_p)


@dataclass(frozen=True)
class RationalFunction:
    """g(zeta) = c * zeta^m / den(zeta), den(0) != 0."""

    numerator: np.ndarray
    denominator: np.ndarray
    zero_order_at_origin: int
    exact_scale: ExactCoeff | None = None
    exact_den: tuple[ExactCoeff, ...] | None = None

    def __post_init__(self):
        num = polyutil.trim(np.asarray(self.numerator, dtype=complex))
        den = polyutil.trim(np.asarray(self.denominator, dtype=complex))
        m = self.zero_order_at_origin
        if m < 1 or num.size != m + 1 or num[m] == 0:
            raise InputError("numerator must be a nonzero monomial of order >= 1")
        if np.any(np.abs(num[:m]) > 0):
            raise InputError("numerator may vanish only at the origin")
        if den.size == 0 or den[0] == 0:
            raise InputError("denominator must not vanish at the origin")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    # -- construction -------------------------------------------------------

    @classmethod
    def monomial(cls, scale: complex, order: int = 1) -> "RationalFunction":
        num = np.zeros(order + 1, dtype=complex)
        num[order] = scale
        return cls(num, np.array([1.0 + 0j]), order)

    @classmethod
    def from_poles(cls, scale: complex, order: int, poles: dict) -> "RationalFunction":
        """c * zeta^order / prod (zeta - pole)^mult."""
        num = np.zeros(order + 1, dtype=complex)
        num[order] = scale
        roots = []
        for pole, mult in poles.items():
            roots.extend([complex(pole)] * int(mult))
        den = polyutil.from_roots(roots)
        return cls(num, den, order)

    @classmethod
    def from_exact(cls, scale: ExactCoeff, order: int,
                   den: tuple[ExactCoeff, ...]) -> "RationalFunction":
        num = np.zeros(order + 1, dtype=complex)
        num[order] = _coeff_to_complex(scale)
        den_f = np.array([_coeff_to_complex(c) for c in den], dtype=complex)
        return cls(num, den_f, order, exact_scale=scale, exact_den=tuple(den))

    def rounded_to_exact(self, max_denominator: int = 2 ** 40) -> "RationalFunction":
        """Round coefficients to nearby fractions and rebuild from them."""
        def rnd(v: complex) -> ExactCoeff:
            return (Fraction(float(v.real)).limit_denominator(max_denominator),
                    Fraction(float(v.imag)).limit_denominator(max_denominator))
        scale = rnd(self.numerator[self.zero_order_at_origin])
        den = tuple(rnd(v) for v in self.denominator)
        return RationalFunction.from_exact(scale, self.zero_order_at_origin, den)

    # -- queries ------------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.exact_scale is not None and self.exact_den is not None

    @property
    def degree(self) -> int:
        return max(self.zero_order_at_origin, self.denominator.size - 1)

    def poles(self) -> np.ndarray:
        if self.denominator.size <= 1:
            return np.zeros(0, dtype=complex)
        return polyutil.roots(self.denominator)

    def label(self) -> str:
        """Deterministic short identifier used in atlases and CSV output."""
        c = self.numerator[self.zero_order_at_origin]
        num = f"{c:.6g}*z^{self.zero_order_at_origin}"
        den = ",".join(f"{v:.6g}" for v in self.denominator)
        return f"{num}/[{den}]"

    def serialize(self) -> str:
        """Exact-fraction wire form (rounds first if needed)."""
        g = self if self.is_exact else self.rounded_to_exact()
        parts = [coeff_to_string(g.exact_scale), str(g.zero_order_at_origin)]
        parts.append(";".join(coeff_to_string(c) for c in g.exact_den))
        return "|".join(parts)

    @classmethod
    def deserialize(cls, s: str) -> "RationalFunction":
        try:
            scale_s, order_s, den_s = s.strip().split("|")
        except ValueError as exc:
            raise InputError(f"bad rational function string {s!r}") from exc
        scale = coeff_from_string(scale_s)
        den = tuple(coeff_from_string(p) for p in den_s.split(";"))
        return cls.from_exact(scale, int(order_s), den)


def eval_rational(g: RationalFunction, zeta):
    """g(zeta); raises PoleHit if the denominator nearly vanishes."""
    z = np.asarray(zeta, dtype=complex)
    num = polyutil.horner(g.numerator, z)
    den = polyutil.horner(g.denominator, z)
    floor = 1e-13 * polyutil._residual_scale(g.denominator, z)
    bad = np.abs(den) <= floor
    if np.any(bad):
        raise PoleHit(f"evaluation at a denominator root (|den| <= {np.max(floor):.3g})")
    out = num / den
    return out if out.shape else complex(out)


def eval_dlog(g: RationalFunction, zeta):
    """g'/g = m/zeta - den'/den; cheap and pole-free away from 0 and poles."""
    z = np.asarray(zeta, dtype=complex)
    dden = polyutil.derivative(g.denominator)
    val = g.zero_order_at_origin / z - polyutil.horner(dden, z) / polyutil.horner(g.denominator, z)
    return val if val.shape else complex(val)


# ---------------------------------------------------------------------------
# family enumeration


def _rationals(max_height: int) -> list[Fraction]:
    vals = {Fraction(0)}
    for q in range(1, max_height + 1):
        for p in range(-max_height, max_height + 1):
            f = Fraction(p, q)
            if abs(f.numerator) <= max_height and f.denominator <= max_height:
                vals.add(f)
    return sorted(vals)


def _gaussians(max_height: int) -> list[ExactCoeff]:
    qs = _rationals(max_height)
    return [(a, b) for a in qs for b in qs]


def _height(c: ExactCoeff) -> int:
    return max(abs(c[0].numerator), c[0].denominator,
               abs(c[1].numerator), c[1].denominator)


def _coeff_key(c: ExactCoeff):
    # puts 1 before -1, i, -i, ... deterministically
    return (_height(c), float(abs(c[0]) + abs(c[1])), -float(c[0]), -float(c[1]))


def enumerate_family(max_degree: int, max_height: int) -> list[RationalFunction]:
    """Deterministic enumeration of the exact-coefficient family.

    Members are normalized to den(0) = 1, which removes duplicates under
    common scaling of numerator and denominator. Ordered by degree, then
    coefficient height, then a lexicographic key; the identity map zeta is
    always first. Combinatorial in both arguments; keep them small.
    """
    if max_degree < 1:
        raise InputError("max_degree must be >= 1")
    one = (Fraction(1), Fraction(0))
    zero = (Fraction(0), Fraction(0))
    gs = _gaussians(max_height)
    nz = [c for c in gs if c != zero]

    items = []
    for m in range(1, max_degree + 1):
        for dd in range(0, max_degree + 1):
            tail_sets = [nz if k == dd - 1 else gs for k in range(dd)]
            for tail in product(*tail_sets) if dd else [()]:
                den = (one,) + tuple(tail)
                for c in nz:
                    deg = max(m, dd)
                    height = max([_height(c)] + [_height(t) for t in tail] + [1])
                    key = (deg, height, m, dd, _coeff_key(c),
                           tuple(_coeff_key(t) for t in tail))
                    items.append((key, c, m, den))
    items.sort(key=lambda it: it[0])
    return [RationalFunction.from_exact(c, m, den) for _, c, m, den in items]
