"""Fiber analysis tests; oracles are classical capacity values and exact
symmetric functions."""

import numpy as np
import pytest

from curvecont import curves as cv
from curvecont import fibers as fb
from curvecont.errors import EmptySet, InputError, RaggedFibers
from curvecont.lemniscates import Disk


def line_curve():
    return cv.make_curve(cv.BivariatePolynomial.from_terms({(0, 1): 1, (1, 0): -1}))


class TestCapacity:
    def test_single_point_is_zero(self):
        assert fb.capacity(np.array([1 + 2j])) == 0.0

    def test_pair_is_distance(self):
        assert abs(fb.capacity(np.array([0, 3 + 4j])) - 5.0) < 1e-12

    def test_disk_radius(self):
        # classical: cap(disk of radius r) = r
        for r in (0.5, 1.7, 3.0):
            v = fb.capacity([Disk(0.3 - 0.2j, r)], n_fekete=32)
            assert abs(v - r) / r < 0.03

    def test_segment_quarter_length(self):
        # classical: cap(segment of length L) = L / 4
        for ln in (1.0, 3.0):
            v = fb.capacity({"kind": "segment", "a": 0, "b": ln}, n_fekete=32)
            assert abs(v - ln / 4) / (ln / 4) < 0.05

    def test_empty_rejected(self):
        with pytest.raises(EmptySet):
            fb.capacity(np.zeros(0, dtype=complex))

    def test_monotone_under_inclusion(self):
        small = fb.capacity([Disk(0j, 1.0)], n_fekete=32)
        big = fb.capacity([Disk(0j, 2.0)], n_fekete=32)
        assert small < big

    def test_translation_rotation_invariance(self):
        rng = np.random.default_rng(2)
        base = fb.capacity([Disk(0j, 1.3)], n_fekete=32)
        for _ in range(3):
            shift = complex(rng.normal(), rng.normal())
            moved = fb.capacity([Disk(shift, 1.3)], n_fekete=32)
            assert abs(moved - base) / base < 0.01
        seg = fb.capacity({"kind": "segment", "a": 0, "b": 2}, n_fekete=32)
        rot = fb.capacity({"kind": "segment", "a": 1j, "b": 1j + 2j * 1}, n_fekete=32)
        assert abs(seg - rot) / seg < 0.01


class TestCapacityField:
    def test_sqrt_pair_harmonic_log(self):
        # d_2({+-sqrt z}) = 2 sqrt|z|; its log is harmonic away from 0
        n = 17
        xs = np.linspace(1.0, 2.0, n)
        ys = np.linspace(-0.5, 0.5, n)
        zz = (xs[None, :] + 1j * ys[:, None]).ravel()
        fibers = [((np.sqrt(z), 0), (-np.sqrt(z), 0)) for z in zz]
        sfs = fb.make_fiber_set(zz, fibers)
        rep = fb.capacity_field(sfs, slack=1e-3, grid_shape=(n, n))
        want = np.abs(2 * np.sqrt(zz))
        assert np.max(np.abs(rep.capacities - want)) < 1e-10
        assert rep.subharmonicity is not None and rep.subharmonicity.ok

    def test_singletons_masked(self):
        zz = np.linspace(0, 1, 9)
        sfs = fb.make_fiber_set(zz, [((2 + z, 0),) for z in zz])
        rep = fb.capacity_field(sfs)
        assert np.all(rep.capacities == 0)
        assert np.all(np.isnan(rep.log_capacities))

    def test_constant_fiber_constant_log(self):
        n = 9
        zz = (np.linspace(-1, 1, n)[None, :] + 1j * np.linspace(-1, 1, n)[:, None]).ravel()
        sfs = fb.make_fiber_set(zz, [((1, 0), (-1, 0)) for _ in zz])
        rep = fb.capacity_field(sfs, grid_shape=(n, n))
        assert np.allclose(rep.capacities, 2.0)
        assert rep.subharmonicity.ok


class TestWeierstrassFit:
    def test_sqrt_fibers_exact(self):
        # oracle: sigma_1 = 0, sigma_2 = -z exactly
        zg = np.linspace(0.5, 1.5, 41) + 0.3j
        sfs = fb.make_fiber_set(zg, [((np.sqrt(z), 0), (-np.sqrt(z), 0))
                                     for z in zg])
        fit = fb.weierstrass_fit(sfs, model_degree=4)
        assert fit.residual < 1e-10
        assert fit.consistent
        assert np.max(np.abs(fit.sym_values[:, 0])) < 1e-12      # sigma_1 = 0
        assert np.max(np.abs(fit.sym_values[:, 1] + zg)) < 1e-12  # sigma_2 = -z

    def test_linear_fiber_exact(self):
        zg = np.linspace(-0.5, 0.5, 41)
        sfs = fb.make_fiber_set(zg, [((2 + z, 0),) for z in zg])
        fit = fb.weierstrass_fit(sfs, model_degree=8)
        assert fit.residual < 1e-12
        assert fit.consistent

    def test_non_holomorphic_motion_rejected(self):
        # |z| is not a polynomial in z on a grid straddling 0
        zg = np.linspace(-0.5, 0.5, 41)
        sfs = fb.make_fiber_set(zg, [((2 + abs(z), 0),) for z in zg])
        fit = fb.weierstrass_fit(sfs, model_degree=8)
        assert fit.residual > 1e-2
        assert fit.verdict == "negative"

    def test_ragged_fibers_error(self):
        zg = np.array([0.0, 0.5, 1.0, 1.5])
        fibers = [((1, 0),), ((1, 0), (2, 0)), ((1, 0),), ((1, 0),)]
        with pytest.raises(RaggedFibers) as exc:
            fb.weierstrass_fit(fb.make_fiber_set(zg, fibers), model_degree=1)
        assert complex(0.5) in exc.value.offending

    def test_permutation_invariance(self):
        rng = np.random.default_rng(4)
        zg = np.linspace(0.5, 1.5, 30)
        base = [((np.sqrt(z), 0), (-np.sqrt(z), 0), (2 + z, 0)) for z in zg]
        shuffled = []
        for fib in base:
            fib = list(fib)
            rng.shuffle(fib)
            shuffled.append(tuple(fib))
        f1 = fb.weierstrass_fit(fb.make_fiber_set(zg, base), model_degree=4)
        f2 = fb.weierstrass_fit(fb.make_fiber_set(zg, shuffled), model_degree=4)
        assert abs(f1.residual - f2.residual) < 1e-12
        assert np.allclose(f1.sym_values, f2.sym_values)

    def test_polynomial_coefficient_roots_recovered(self):
        # roots of X^2 - (z^2 + 3) X + z: discriminant stays away from 0 on
        # the grid, sigma fits exactly at degree >= 2
        zg = np.linspace(-1, 1, 41)
        fibers = []
        for z in zg:
            roots = np.roots([1, -(z ** 2 + 3), z])
            fibers.append(tuple((complex(r), 0) for r in roots))
        fit = fb.weierstrass_fit(fb.make_fiber_set(zg, fibers), model_degree=4)
        assert fit.residual < 1e-8
        assert fit.consistent

    def test_too_few_nodes_rejected(self):
        zg = np.linspace(0, 1, 5)
        sfs = fb.make_fiber_set(zg, [((z, 0),) for z in zg])
        with pytest.raises(InputError):
            fb.weierstrass_fit(sfs, model_degree=8)


class TestProbe:
    def test_simple_pole_detected(self):
        line = line_curve()
        f = lambda z, w: 1 / (w.eta - 2)
        assert fb.pseudoconcavity_probe(f, line, 0j, cv.CurvePoint(2, 2), 0.1)

    def test_entire_not_detected(self):
        line = line_curve()
        f = lambda z, w: np.exp(w.eta)
        assert not fb.pseudoconcavity_probe(f, line, 0j, cv.CurvePoint(1, 1), 0.1)

    def test_regular_point_near_pole(self):
        line = line_curve()
        f = lambda z, w: 1 / (w.eta - 2)
        center = cv.CurvePoint(3.0, 3.0)  # 10 radii away from the pole
        assert not fb.pseudoconcavity_probe(f, line, 0j, center, 0.1)

    def test_pole_order_depth(self):
        line = line_curve()
        for order in (1, 2, 3):
            f = lambda z, w, p=order: 1 / (w.eta - 2) ** p
            tail, scale = fb.laurent_tail(f, line, 0j, cv.CurvePoint(2, 2), 0.1)
            assert fb.deepest_negative_index(tail, scale) == order

    def test_probe_on_two_sheet_curve(self):
        curve = cv.make_curve(cv.BivariatePolynomial.from_terms(
            {(1, 0): -1, (0, 2): 1}))  # eta^2 = xi
        f = lambda z, w: 1 / (w.eta - 2)   # pole at the (4, 2) point only
        assert fb.pseudoconcavity_probe(f, curve, 0j, cv.CurvePoint(4, 2), 0.2)
        assert not fb.pseudoconcavity_probe(f, curve, 0j, cv.CurvePoint(4, -2), 0.2)
