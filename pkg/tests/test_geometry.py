import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conehull.geometry import (
    TWO_PI,
    UNBOUNDED,
    FiniteCone,
    Frame,
    Point,
    Sector,
    UnitVector,
    cone_contains,
    cone_contains_many,
    derived_params,
    rotate,
    sector_contains,
    sector_contains_many,
    signed_angle,
    wrap_angle,
)

angles = st.floats(-20.0, 20.0, allow_nan=False)
coords = st.floats(-5.0, 5.0, allow_nan=False)
openings = st.floats(1e-3, math.pi)


def unit(a):
    return UnitVector.from_angle(a)


class TestTypes:
    def test_point_rejects_nan(self):
        with pytest.raises(ValueError):
            Point(math.nan, 0.0)
        with pytest.raises(ValueError):
            Point(0.0, math.inf)

    def test_unit_vector_norm_checked(self):
        with pytest.raises(ValueError):
            UnitVector(1.0, 1e-5)
        UnitVector(1.0, 1e-7)  # within 1e-12 on the squared norm

    @pytest.mark.parametrize("rho", [0.0, -0.1, math.pi + 1e-9])
    def test_cone_opening_range(self, rho):
        with pytest.raises(ValueError):
            FiniteCone(Point(0, 0), unit(0), rho, 1.0)

    def test_cone_height_positive(self):
        with pytest.raises(ValueError):
            FiniteCone(Point(0, 0), unit(0), 1.0, 0.0)
        FiniteCone(Point(0, 0), unit(0), 1.0, UNBOUNDED)

    def test_sector_validation(self):
        with pytest.raises(ValueError):
            Sector(Point(0, 0), 0.0, -0.1, 1.0)
        with pytest.raises(ValueError):
            Sector(Point(0, 0), 0.0, 1.0, 0.0)

    @given(angles, st.floats(0.0, TWO_PI))
    def test_sector_directions_consistent_with_span(self, start, span):
        s = Sector(Point(0, 0), start, span, 1.0)
        a = signed_angle(s.start_dir, s.end_dir)
        assert math.isclose(wrap_angle(a - span), 0.0, abs_tol=1e-9) or math.isclose(
            abs(wrap_angle(a - span)), TWO_PI, abs_tol=1e-9
        )

    def test_frame_validation_and_dilate(self):
        with pytest.raises(ValueError):
            Frame(1, 0, 0, 1)
        f = Frame.unit().dilate(0.5)
        assert (f.xmin, f.xmax, f.ymin, f.ymax) == (-0.5, 1.5, -0.5, 1.5)
        assert Frame.unit().contains_many([[1.0, 1.0], [1.0, 1.0 + 1e-15]]).tolist() == [True, False]


class TestRotate:
    def test_identity(self):
        r = rotate(UnitVector(1, 0), 0.0)
        assert (r.ux, r.uy) == (1.0, 0.0)

    def test_quarter_clockwise(self):
        r = rotate(UnitVector(1, 0), math.pi / 2)
        assert r.ux == pytest.approx(0.0, abs=1e-15)
        assert r.uy == pytest.approx(-1.0, abs=1e-15)

    def test_eighth_from_vertical(self):
        r = rotate(UnitVector(0, 1), math.pi / 4)
        assert r.ux == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
        assert r.uy == pytest.approx(math.sqrt(2) / 2, abs=1e-15)

    def test_angle_decreases_by_theta(self):
        u = unit(0.3)
        assert wrap_angle(rotate(u, 0.5).angle - (0.3 - 0.5)) == pytest.approx(0.0, abs=1e-14)

    @given(angles, angles)
    def test_round_trip(self, a, t):
        u = unit(a)
        back = rotate(rotate(u, t), -t)
        assert back.ux == pytest.approx(u.ux, abs=1e-12)
        assert back.uy == pytest.approx(u.uy, abs=1e-12)

    def test_norm_preserved_many(self, rng):
        a = rng.uniform(-50, 50, 10**6)
        t = rng.uniform(-50, 50, 10**6)
        # vectorised copy of the rotation matrix used by rotate()
        ux, uy = np.cos(a), np.sin(a)
        c, s = np.cos(t), np.sin(t)
        x, y = c * ux + s * uy, -s * ux + c * uy
        assert np.max(np.abs(x * x + y * y - 1.0)) < 1e-12
        for i in range(0, 10**6, 10**4):
            r = rotate(UnitVector(float(ux[i]), float(uy[i])), float(t[i]))
            assert abs(r.ux**2 + r.uy**2 - 1) < 1e-12


class TestSignedAngle:
    def test_zero(self):
        assert signed_angle(unit(0), unit(0)) == 0.0

    def test_quarter_ccw(self):
        assert signed_angle(UnitVector(1, 0), UnitVector(0, 1)) == pytest.approx(math.pi / 2)

    def test_negative_third(self):
        t = UnitVector(math.cos(-math.pi / 3), math.sin(-math.pi / 3))
        assert signed_angle(UnitVector(1, 0), t) == pytest.approx(-math.pi / 3, abs=1e-15)

    def test_opposite_is_plus_pi(self):
        assert signed_angle(UnitVector(1, 0), UnitVector(-1, 0)) == math.pi

    @given(angles, angles)
    def test_range_and_cosine(self, a, b):
        u, v = unit(a), unit(b)
        s = signed_angle(u, v)
        assert -math.pi < s <= math.pi
        assert math.cos(s) == pytest.approx(u.ux * v.ux + u.uy * v.uy, abs=1e-12)


class TestConeContains:
    def test_axis_point(self, quarter_cone):
        assert cone_contains(quarter_cone, Point(0.5, 0))

    def test_vertex_excluded(self, quarter_cone):
        assert not cone_contains(quarter_cone, Point(0, 0))

    def test_outside_angle(self, quarter_cone):
        # direction at about 50.2 degrees, beyond the 45 degree half-opening
        assert math.degrees(math.atan2(0.6, 0.5)) > 45
        assert not cone_contains(quarter_cone, Point(0.5, 0.6))

    def test_open_in_height(self, quarter_cone):
        assert not cone_contains(quarter_cone, Point(1.0, 0))
        assert cone_contains(quarter_cone, Point(1.0 - 1e-12, 0))

    def test_vectorised_matches_scalar(self, quarter_cone, rng):
        pts = rng.uniform(-1.5, 1.5, (500, 2))
        many = cone_contains_many(quarter_cone, pts)
        assert many.tolist() == [cone_contains(quarter_cone, p) for p in pts]

    @given(coords, coords, angles, openings, st.floats(0.05, 3.0), coords, coords, angles, coords, coords)
    def test_rigid_motion_invariance(self, vx, vy, a, rho, h, px, py, rot, tx, ty):
        cone = FiniteCone(Point(vx, vy), unit(a), rho, h)
        d = np.array([px - vx, py - vy])
        r = math.hypot(*d)
        assume(r > 1e-6 and abs(r - h) > 1e-6)
        phi = math.atan2(d[1], d[0])
        assume(abs(abs(wrap_angle(phi - a)) - rho / 2) > 1e-6)
        c, s = math.cos(rot), math.sin(rot)
        m = lambda x, y: (c * x - s * y + tx, s * x + c * y + ty)  # noqa: E731
        moved = FiniteCone(Point(*m(vx, vy)), unit(a + rot), rho, h)
        assert cone_contains(cone, (px, py)) == cone_contains(moved, m(px, py))

    @given(coords, coords, angles, coords, coords)
    def test_half_plane_limit(self, vx, vy, a, px, py):
        cone = FiniteCone(Point(vx, vy), unit(a), math.pi, UNBOUNDED)
        u = unit(a)
        side = u.ux * (px - vx) + u.uy * (py - vy)
        assume(abs(side) > 1e-9)
        assert cone_contains(cone, (px, py)) == (side > 0)


class TestSectorContains:
    sec = Sector(Point(0, 0), 0.0, math.pi / 2, 1.0)

    def test_inside(self):
        assert sector_contains(self.sec, Point(0.3, 0.3))

    def test_beyond_radius(self):
        assert not sector_contains(self.sec, Point(2, 0))

    def test_below_start(self):
        assert not sector_contains(self.sec, Point(0.3, -0.01))

    def test_closed_in_angle(self):
        assert sector_contains(self.sec, Point(0.5, 0.0))
        e = self.sec.end_dir
        # a point on the computed end ray has an exactly zero cross product
        assert sector_contains(self.sec, (0.5 * e.ux, 0.5 * e.uy))
        assert not sector_contains(self.sec, Point(0, 0))

    def test_wraps_across_cut(self):
        s = Sector(Point(0, 0), 3 * math.pi / 4, math.pi / 2, 1.0)
        assert sector_contains(s, (-0.5, 0.0))
        assert sector_contains(s, (-0.5, -0.1))
        assert not sector_contains(s, (0.5, 0.0))

    def test_reflex_span(self):
        s = Sector(Point(0, 0), 0.0, 1.5 * math.pi, 1.0)
        assert sector_contains(s, (-0.5, 0.0))
        assert sector_contains(s, (-0.01, -0.5))
        assert not sector_contains(s, (0.3, -0.3))

    def test_zero_span_is_one_ray(self):
        s = Sector(Point(0, 0), 0.0, 0.0, 1.0)
        assert sector_contains(s, (0.5, 0.0))
        assert not sector_contains(s, (-0.5, 0.0))
        assert not sector_contains(s, (0.5, 1e-9))

    @given(coords, coords, st.floats(0.1, 3.0), coords, coords)
    def test_full_span_is_punctured_disk(self, vx, vy, r, px, py):
        s = Sector(Point(vx, vy), 0.7, TWO_PI, r)
        d2 = (px - vx) ** 2 + (py - vy) ** 2
        assert sector_contains(s, (px, py)) == (0 < d2 < r * r)

    @given(angles, st.floats(0.0, TWO_PI - 1e-6), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
    def test_matches_signed_angle_definition(self, start, span, px, py):
        s = Sector(Point(0, 0), start, span, 1.0)
        r = math.hypot(px, py)
        assume(1e-6 < r < 1 - 1e-6)
        rel = math.atan2(py, px) - start
        rel = rel % TWO_PI
        assume(min(abs(rel - span), rel, TWO_PI - rel) > 1e-7)
        assert sector_contains(s, (px, py)) == (rel <= span)

    def test_vectorised_matches_scalar(self, rng):
        s = Sector(Point(0.1, -0.2), 2.5, 4.0, 0.8)
        pts = rng.uniform(-1, 1, (400, 2))
        assert sector_contains_many(s, pts).tolist() == [sector_contains(s, p) for p in pts]


class TestDerivedParams:
    def test_right_angle(self):
        p = derived_params(math.pi / 2, 1.0)
        assert p.rho_prime == pytest.approx(math.pi / 4)
        assert p.gamma == pytest.approx(math.pi / 4)
        assert p.h_prime == pytest.approx(math.sqrt(2) / 4)
        assert p.h_one == pytest.approx(math.sqrt(2) / 4)
        assert p.k_const == pytest.approx(3 + 2 / math.sin(math.pi / 4))
        assert p.k_const == pytest.approx(5.828, abs=1e-3)

    def test_branch_continuity_at_third(self):
        p = derived_params(math.pi / 3, 2.0)
        assert p.rho_prime == pytest.approx(math.pi / 3)
        assert (math.pi - math.pi / 3) / 2 == pytest.approx(math.pi / 3)
        assert p.h_one == pytest.approx(0.5)

    def test_fifth(self):
        p = derived_params(math.pi / 5, 0.5)
        assert p.gamma == pytest.approx(math.pi / 5)
        assert p.h_one == pytest.approx(0.07725, abs=1e-5)

    @pytest.mark.parametrize("rho,h", [(0.0, 1.0), (4.0, 1.0), (1.0, 0.0), (1.0, -1.0), (1.0, math.inf)])
    def test_domain_errors(self, rho, h):
        with pytest.raises(ValueError):
            derived_params(rho, h)

    @given(st.floats(1e-6, math.pi), st.floats(1e-6, 1e6))
    def test_invariants(self, rho, h):
        p = derived_params(rho, h)
        assert p.rho_prime <= rho and p.gamma <= rho
        assert p.gamma <= math.pi / 3 + 1e-15
        assert p.gamma == p.rho_prime
        assert p.h_one <= h / 2 and p.k_const >= 5
        # sin(rho/2) rounds to 1 near pi, where both bounds become equalities
        if rho < math.pi - 1e-6:
            assert p.h_one < h / 2
            assert p.k_const > 5

    def test_convex_limit_has_degenerate_gamma(self):
        p = derived_params(math.pi, 1.0)
        assert p.gamma == 0.0
        assert p.h_one == 0.5 and p.k_const == 5.0
