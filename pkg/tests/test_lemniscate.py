"""Lemniscate geometry tests; oracles are disk/Apollonius circle algebra."""

import numpy as np
import pytest

from curvecont import lemniscates as lm
from curvecont import rational as rat
from curvecont.errors import (
    BudgetExhausted,
    ComponentEscapesBox,
    InputError,
    PoleHit,
)


def g_identity():
    return rat.RationalFunction.monomial(1.0)


def g_mobius():
    # z / (2 (z - 2)): unit lemniscate is the exterior of disk(8/3, 4/3)
    return rat.RationalFunction.from_poles(0.5, 1, {2.0: 1})


class TestEvalRational:
    def test_identity(self):
        assert rat.eval_rational(g_identity(), 0.5) == 0.5

    def test_zero_at_origin(self):
        assert rat.eval_rational(g_mobius(), 0.0) == 0.0

    def test_direct_arithmetic(self):
        g = rat.RationalFunction.from_poles(1.0, 2, {3.0: 1})
        assert abs(rat.eval_rational(g, 1.0) - (-0.5)) < 1e-15

    def test_pole_hit(self):
        with pytest.raises(PoleHit):
            rat.eval_rational(g_mobius(), 2.0)

    def test_family_invariants_rejected(self):
        with pytest.raises(InputError):
            rat.RationalFunction(np.array([0.5, 1.0]), np.array([1.0]), 1)
        with pytest.raises(InputError):
            rat.RationalFunction(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 1)


class TestComponentRegion:
    def test_unit_disk_area(self):
        lem = lm.component_region(g_identity(), 1.0, box=(0j, 2.0), max_depth=9)
        assert np.pi - 0.1 <= lem.inner_cover.area <= np.pi
        assert not lem.escaped
        assert lem.fully_connected

    def test_exterior_component_contains_zero_excludes_two(self):
        # oracle: |z| < 2|z-2| is the exterior of the circle center 8/3 radius 4/3
        lem = lm.component_region(g_mobius(), 1.0, box=(0j, 6.0), max_depth=10,
                                  escape="truncate")
        assert lem.escaped
        assert lm.covers_disk(lem, lm.Disk(0j, 0.05))
        assert lm.point_certified_outside(lem, 2 + 0j)
        # spot check cover soundness against the closed form
        rng = np.random.default_rng(0)
        idx = rng.integers(0, lem.inner_cover.size, size=2000)
        dx = rng.uniform(-1, 1, size=2000) + 1j * rng.uniform(-1, 1, size=2000)
        pts = lem.inner_cover.centers[idx] + dx * lem.inner_cover.half[idx]
        assert np.all(np.abs(pts - 8 / 3) > 4 / 3)

    def test_escape_error_mode(self):
        with pytest.raises(ComponentEscapesBox):
            lm.component_region(g_mobius(), 1.0, box=(0j, 6.0), max_depth=8)

    def test_component_certified_away_from_pole(self):
        # subdivision oracle at depth 12
        g = rat.RationalFunction.from_poles(1.0, 2, {3.0: 1})
        lem = lm.component_region(g, 0.1, box=(0j, 8.0), max_depth=12)
        assert lm.point_certified_outside(lem, 3 + 0j)
        assert not lem.escaped

    def test_certification_soundness_random(self):
        rng = np.random.default_rng(42)
        for g in (g_identity(), g_mobius()):
            lem = lm.component_region(g, 1.0, box=(0j, 6.0), max_depth=9,
                                      escape="truncate")
            assert lm.spot_check(lem, 10000, rng)
            # points in certified-outside leaves never dip below the level
            out_mask = lem.leaf_class == lm.OUT
            idx = np.nonzero(out_mask)[0]
            pick = idx[rng.integers(0, idx.size, size=10000)]
            dx = rng.uniform(-1, 1, size=10000) + 1j * rng.uniform(-1, 1, size=10000)
            pts = lem.leaves.centers[pick] + dx * lem.leaves.half[pick]
            vals = np.abs(rat.eval_rational(g, pts))
            assert np.all(vals >= lem.level * (1 - 1e-12))


class TestBoundaryContour:
    def test_unit_circle_nodes(self):
        lem = lm.component_region(g_identity(), 1.0, box=(0j, 2.0), max_depth=9)
        c = lm.boundary_contour(lem, 256)
        assert len(c.loops) == 1
        z = c.loops[0].zeta
        assert z.size == 256
        assert np.max(np.abs(np.abs(z) - 1.0)) < 1e-10

    def test_exterior_loop_reversed(self):
        # component is the exterior: loop winds clockwise around its center
        lem = lm.component_region(g_mobius(), 1.0, box=(0j, 6.0), max_depth=10,
                                  escape="truncate")
        c = lm.boundary_contour(lem, 256)
        assert len(c.loops) == 1
        z = c.loops[0].zeta
        assert abs(np.mean(z) - 8 / 3) < 1e-3
        assert np.max(np.abs(np.abs(z - 8 / 3) - 4 / 3)) < 1e-8
        w = c.loops[0].integrate(1.0 / (z - 8 / 3)) / (2j * np.pi)
        assert abs(w - (-1)) < 1e-8

    def test_cauchy_index_deep_inside(self):
        lem = lm.component_region(g_identity(), 1.0, box=(0j, 2.0), max_depth=9)
        c = lm.boundary_contour(lem, 256)
        z0 = 0.1 + 0.05j
        val = c.loops[0].integrate(1.0 / (c.loops[0].zeta - z0))
        assert abs(val - 2j * np.pi) < 1e-8 * 2 * np.pi

    def test_fast_level_contour_matches(self):
        c = lm.level_contour(g_mobius(), 1.0, 256)
        z = c.loops[0].zeta
        assert np.max(np.abs(np.abs(z - 8 / 3) - 4 / 3)) < 1e-8


class TestSeparatingLemniscate:
    def test_single_pole_closed_form(self):
        # oracle: circle algebra; z/(2(z-2)) has the exterior-of-disk lemniscate
        g = lm.separating_lemniscate([2.0], [lm.Disk(0j, 1.0)])
        assert g.is_exact
        num_scale = g.numerator[g.zero_order_at_origin]
        assert num_scale == 0.5
        assert g.zero_order_at_origin == 1
        poles = g.poles()
        assert poles.size == 1 and abs(poles[0] - 2) < 1e-9
        rep = lm.verify_separation(g, [lm.Disk(0j, 1.0)], [2.0], max_depth=16)
        assert rep.ok

    def test_no_avoided_points_scaled_disk(self):
        g = lm.separating_lemniscate([], [lm.Disk(0j, 2.0)])
        assert g.denominator.size == 1
        assert g.numerator[1] == 0.25  # z / (2 r) with r = 2

    def test_two_poles_certified(self):
        # subdivision oracle: accepted candidate passes independent verification
        g = lm.separating_lemniscate([2.0, -2.0], [lm.Disk(0j, 1.0)])
        rep = lm.verify_separation(g, [lm.Disk(0j, 1.0)], [2.0, -2.0], max_depth=16)
        assert rep.ok and rep.keep_inside and rep.avoid_outside and rep.connected

    def test_sigma_inside_keep_rejected(self):
        with pytest.raises(InputError):
            lm.separating_lemniscate([0.5], [lm.Disk(0j, 1.0)])

    def test_origin_in_sigma_rejected(self):
        with pytest.raises(InputError):
            lm.separating_lemniscate([0.0], [lm.Disk(0j, 1.0)])

    def test_budget_exhausted_carries_best(self):
        # an avoided point glued to the kept disk is hopeless at tiny budget
        with pytest.raises(BudgetExhausted) as exc:
            lm.separating_lemniscate([1.0 + 1e-9j], [lm.Disk(0j, 1.0 - 1e-12)],
                                     budget=2)
        assert exc.value.best_score is not None


class TestFamilyEnumeration:
    def test_identity_first(self):
        fam = rat.enumerate_family(1, 1)
        g0 = fam[0]
        assert g0.zero_order_at_origin == 1
        assert g0.denominator.size == 1 and g0.denominator[0] == 1
        assert g0.numerator[1] == 1

    def test_family_invariant(self):
        fam = rat.enumerate_family(2, 1)
        for g in fam[:200]:
            assert rat.eval_rational(g, 0.0) == 0
            nz = np.nonzero(np.abs(g.numerator) > 0)[0]
            assert list(nz) == [g.zero_order_at_origin]

    def test_enumeration_stable(self):
        a = [g.serialize() for g in rat.enumerate_family(1, 2)]
        b = [g.serialize() for g in rat.enumerate_family(1, 2)]
        assert a == b

    def test_serialization_roundtrip(self):
        for g in rat.enumerate_family(1, 1)[:20]:
            h = rat.RationalFunction.deserialize(g.serialize())
            z = 0.3 + 0.1j
            assert abs(rat.eval_rational(g, z) - rat.eval_rational(h, z)) < 1e-15
