"""Curve module tests: oracles are symbolic resultants and closed-form branches."""

import numpy as np
import pytest
import sympy

from curvecont import curves as cv
from curvecont.errors import (
    AtCriticalPoint,
    DegeneratePolynomial,
    InputError,
    PathHitsCritical,
)


def poly_from_sympy(expr):
    xi, eta = sympy.symbols("xi eta")
    p = sympy.Poly(expr, xi, eta)
    terms = {(int(i), int(j)): complex(c) for (i, j), c in zip(p.monoms(), p.coeffs())}
    return cv.BivariatePolynomial.from_terms(terms)


def sympy_critical(expr):
    """Independent oracle: roots of Res_eta(P, dP/deta) plus leading-coeff roots."""
    xi, eta = sympy.symbols("xi eta")
    res = sympy.resultant(expr, sympy.diff(expr, eta), eta)
    vals = set()
    if res != 0:
        for r in sympy.Poly(res, xi).all_roots():
            vals.add(complex(r))
    lead = sympy.Poly(expr, eta).LC()
    lp = sympy.Poly(lead, xi)
    if lp.degree() > 0:
        for r in lp.all_roots():
            vals.add(complex(r))
    return sorted(vals, key=lambda z: (z.real, z.imag))


XI, ETA = sympy.symbols("xi eta")


class TestEval:
    def test_point_on_curve(self):
        p = poly_from_sympy(ETA**2 - XI)
        assert cv.eval_poly(p, 4, 2) == 0

    def test_direct_substitution(self):
        p = poly_from_sympy(ETA**2 - XI)
        assert cv.eval_poly(p, 0, 1) == 1

    def test_hyperbola_point(self):
        p = poly_from_sympy(XI * ETA - 1)
        assert abs(cv.eval_poly(p, 2, 0.5)) < 1e-15

    def test_matches_naive_sum_random(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            terms = {
                (int(rng.integers(0, 4)), int(rng.integers(0, 4))):
                    complex(rng.normal(), rng.normal())
                for _ in range(6)
            }
            p = cv.BivariatePolynomial.from_terms(terms)
            x, y = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
            naive = sum(v * x**i * y**j for i, j, v in p.terms())
            assert abs(cv.eval_poly(p, x, y) - naive) < 1e-10 * (1 + abs(naive))


class TestCriticalPoints:
    @pytest.mark.parametrize("expr", [
        ETA**2 - XI,
        ETA**2 - XI * (XI - 1),
        ETA**3 - XI,
        ETA**2 - XI**2,
        XI * ETA - 1,
        ETA**3 - 3 * ETA + XI,
    ])
    def test_against_symbolic_resultant(self, expr):
        got = sorted(cv.critical_points(poly_from_sympy(expr)),
                     key=lambda z: (z.real, z.imag))
        want = sympy_critical(expr)
        assert len(got) == len(want)
        for g, w in zip(got, want):
            assert abs(g - w) < 1e-6

    def test_graph_has_no_ramification(self):
        assert cv.critical_points(poly_from_sympy(ETA - XI**2)).size == 0

    def test_no_eta_dependence_rejected(self):
        with pytest.raises(DegeneratePolynomial):
            cv.critical_points(cv.BivariatePolynomial.from_terms({(2, 0): 1.0}))

    def test_repeated_factor_rejected(self):
        with pytest.raises(DegeneratePolynomial):
            cv.critical_points(poly_from_sympy((ETA - XI) ** 2))

    def test_zero_polynomial_rejected(self):
        with pytest.raises(DegeneratePolynomial):
            cv.BivariatePolynomial(np.zeros((2, 2)))


class TestBranches:
    def test_square_roots_of_four(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        ch = cv.branches_at(c, 4)
        assert np.allclose(sorted(ch.sheet_values, key=lambda z: z.real), [-2, 2])
        assert ch.radius_of_validity == pytest.approx(4.0, rel=1e-7)

    def test_single_sheet_graph(self):
        c = cv.make_curve(poly_from_sympy(ETA - XI**2))
        ch = cv.branches_at(c, 3)
        assert np.allclose(ch.sheet_values, [9])

    def test_square_roots_of_minus_one(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        ch = cv.branches_at(c, -1)
        assert np.allclose(sorted(ch.sheet_values, key=lambda z: z.imag), [-1j, 1j])

    def test_sheet_count_conservation(self):
        rng = np.random.default_rng(7)
        c = cv.make_curve(poly_from_sympy(ETA**3 - 3 * ETA + XI))
        for _ in range(25):
            z = complex(rng.normal(scale=3), rng.normal(scale=3))
            if np.min(np.abs(c.critical_xi - z)) < 0.05:
                continue
            assert cv.branches_at(c, z).sheet_values.size == c.eta_degree

    def test_at_critical_raises(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        with pytest.raises(AtCriticalPoint):
            cv.branches_at(c, 0.0)


class TestContinuation:
    def test_real_sqrt_branch(self):
        # oracle: closed-form sqrt along the positive reals
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        end = cv.continue_branch(c, cv.CurvePoint(4, 2), [4, 9])
        assert abs(end.eta - 3) < 1e-9

    def test_single_sheet_any_path(self):
        c = cv.make_curve(poly_from_sympy(ETA - XI**2))
        end = cv.continue_branch(c, cv.CurvePoint(1, 1), [1, 1 + 1j, 2 + 1j, 2])
        assert abs(end.eta - 4) < 1e-9

    def test_sqrt_monodromy_flips_sheet(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        loop = list(np.exp(2j * np.pi * np.arange(33) / 32))
        end = cv.continue_branch(c, cv.CurvePoint(1, 1), loop)
        assert abs(end.eta + 1) < 1e-9

    def test_null_homotopic_loop_returns_start(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        loop = list(4 + 0.5 * np.exp(2j * np.pi * np.arange(17) / 16))
        end = cv.continue_branch(c, cv.CurvePoint(4.5, np.sqrt(4.5)), loop)
        assert abs(end.eta - np.sqrt(4.5)) < 1e-9
        assert abs(end.xi - 4.5) < 1e-12

    def test_path_hitting_critical_rejected(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        with pytest.raises(PathHitsCritical):
            cv.continue_branch(c, cv.CurvePoint(1, 1), [1, -1])

    def test_off_curve_start_rejected(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        with pytest.raises(InputError):
            cv.continue_branch(c, cv.CurvePoint(4, 2.5), [4, 9])

    def test_residual_invariant_along_path(self):
        c = cv.make_curve(poly_from_sympy(ETA**3 - 3 * ETA + XI))
        rng = np.random.default_rng(11)
        start = cv.branches_at(c, 5.0)
        pt = cv.CurvePoint(5.0, start.sheet_values[0])
        path = [5.0]
        z = 5.0 + 0j
        for _ in range(6):
            z = z + complex(rng.normal(), rng.normal())
            if np.min(np.abs(c.critical_xi - z)) > 0.3:
                path.append(z)
        end = cv.continue_branch(c, pt, path)
        assert cv.residual(c, end) <= 1e-9 * (1 + c.poly.coeff_scale)


class TestMonodromy:
    def test_sqrt_transitive(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        assert cv.monodromy_irreducible(c) == "yes"

    def test_two_graphs_intransitive(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI**2))
        assert cv.monodromy_irreducible(c) == "no"

    def test_single_sheet_trivially_yes(self):
        c = cv.make_curve(poly_from_sympy(ETA - XI**2))
        assert cv.monodromy_irreducible(c) == "yes"

    def test_cube_root_three_cycle(self):
        c = cv.make_curve(poly_from_sympy(ETA**3 - XI))
        _, gens = cv.monodromy_generators(c)
        # single critical value whose permutation is a 3-cycle
        perms = [tuple(p) for _, p in gens]
        assert any(sorted(p) == [0, 1, 2] and all(p[i] != i for i in range(3))
                   for p in perms)
        assert cv.monodromy_irreducible(c) == "yes"

    def test_loop_product_matches_loop_at_infinity(self):
        # composing keyhole permutations (ordered by base approach) must match
        # one big loop enclosing every critical value
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI * (XI - 1)))
        _, gens = cv.monodromy_generators(c)
        big = list(0.5 + 20 * np.exp(2j * np.pi * np.arange(129) / 128))
        big_perm = cv.loop_permutation(c, big)
        prod = np.arange(c.eta_degree)
        for _, perm in gens:
            prod = perm[prod]
        assert np.array_equal(np.sort(big_perm), np.arange(2))
        # for this curve the two transpositions cancel and infinity is trivial
        assert np.array_equal(big_perm, np.arange(2))
        assert np.array_equal(prod, np.arange(2))


class TestCurveDerivative:
    def test_graph_derivative(self):
        c = cv.make_curve(poly_from_sympy(ETA - XI**2))
        d = cv.curve_derivative(c, lambda w: w.eta, cv.CurvePoint(1, 1), 1)
        assert abs(d - 2) < 1e-10

    def test_sqrt_derivative(self):
        # oracle: d sqrt(xi)/d xi = 1/(2 sqrt(xi))
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        d = cv.curve_derivative(c, lambda w: w.eta, cv.CurvePoint(4, 2), 1)
        assert abs(d - 0.25) < 1e-10

    def test_order_zero_is_evaluation(self):
        c = cv.make_curve(poly_from_sympy(ETA**2 - XI))
        f = lambda w: np.exp(w.eta) + w.xi
        val = cv.curve_derivative(c, f, cv.CurvePoint(4, 2), 0)
        assert abs(val - f(cv.CurvePoint(4, 2))) < 1e-12 * abs(val)

    def test_higher_orders_on_graph(self):
        # f(w) = exp(xi) on the graph eta = xi^2: D^k = exp(xi0)
        c = cv.make_curve(poly_from_sympy(ETA - XI**2))
        for k in (2, 3, 5):
            d = cv.curve_derivative(c, lambda w: np.exp(w.xi),
                                    cv.CurvePoint(0.3, 0.09), k, radius=0.8)
            assert abs(d - np.exp(0.3)) < 1e-9


class TestRotation:
    def test_hyperbola_gets_constant_leading_coefficient(self):
        p = poly_from_sympy(XI * ETA - 1)
        rot, ang = cv.prerotate(p)
        assert rot.deg_eta == 2
        lead = rot.coeffs[:, -1]
        assert np.count_nonzero(np.abs(lead) > 1e-12) == 1
        assert abs(lead[0]) > 1e-3

    def test_rotation_preserves_zero_set(self):
        p = poly_from_sympy(XI * ETA - 1)
        ang = 0.37
        rot = cv.rotate_poly(p, ang)
        c, s = np.cos(ang), np.sin(ang)
        rng = np.random.default_rng(5)
        for _ in range(10):
            x = complex(rng.normal(), rng.normal())
            if abs(x) < 0.2:
                continue
            y = 1 / x  # on the hyperbola
            # inverse rotation sends curve points to rotated-curve points
            xp = c * x + s * y
            yp = -s * x + c * y
            assert abs(cv.eval_poly(rot, xp, yp)) < 1e-10


class TestCurveFile:
    def test_roundtrip(self, tmp_path):
        p = poly_from_sympy(ETA**2 - XI * (XI - 1))
        f = tmp_path / "curve.txt"
        cv.write_curve_file(p, f)
        q = cv.read_curve_file(f)
        assert np.allclose(p.coeffs, q.coeffs)

    def test_exact_decimal_parse(self, tmp_path):
        f = tmp_path / "curve.txt"
        f.write_text("0 2 1 0\n1 0 -0.1 0\n")
        q = cv.read_curve_file(f)
        assert q.coeffs[1, 0] == complex(float("-0.1"), 0.0)

    def test_malformed_rejected(self, tmp_path):
        f = tmp_path / "curve.txt"
        f.write_text("0 2 1\n")
        with pytest.raises(InputError):
            cv.read_curve_file(f)
