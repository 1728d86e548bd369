import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import chi2_contingency

from conehull.geometry import FiniteCone, Point, UnitVector, cone_contains_many
from conehull.shapes import (
    PathFunction,
    PointParseError,
    RejectionBudgetExceeded,
    brownian_hypograph,
    brownian_path,
    eight_triangle_star,
    load_points,
    sample_uniform,
    shape_by_name,
    table_one_set,
    triangle_notch_set,
    write_points,
)


def mc_area_ok(shape, n=10**6, seed=0):
    box = shape.bounding_box
    pts = box.uniform(np.random.default_rng(seed), n)
    a = shape.contains_many(pts).mean()
    tol = 3 * math.sqrt(a * (1 - a) / n) * box.area
    return abs(a * box.area - shape.known_area) <= tol


class TestTriangleNotch:
    s = triangle_notch_set()

    def test_t_value(self):
        assert self.s.extras["t"] == pytest.approx(1.2071, abs=1e-4)

    def test_examples(self):
        t = self.s.extras["t"]
        assert self.s.contains((0.5, 0.25))
        assert not self.s.contains((0.5, 0.9 * (t + 0.5)))
        assert not self.s.contains((-0.1, 0.1))

    def test_apex_and_top_corners_kept(self):
        t = self.s.extras["t"]
        assert self.s.contains((0.5, 0.5))
        assert self.s.contains((0.0, t + 0.5))

    def test_area(self):
        t = self.s.extras["t"]
        assert self.s.known_area == pytest.approx(t + 0.5 - t / 2)
        assert mc_area_ok(self.s)


class TestEightStar:
    s = eight_triangle_star()

    def test_examples(self):
        sq = self.s.extras["s"]
        assert self.s.contains((1 + sq / 2, 0.0))
        assert not self.s.contains((0.0, 0.0))

    @given(st.floats(0.01, 1), st.floats(0.01, 1), st.floats(0.01, 1), st.integers(1, 7))
    def test_eightfold_symmetry(self, wa, wb, wc, k):
        tri = np.array(self.s.extras["triangles"][0])
        x, y = (np.array([wa, wb, wc]) / (wa + wb + wc)) @ tri
        a = k * math.pi / 4
        rx, ry = math.cos(a) * x - math.sin(a) * y, math.sin(a) * x + math.cos(a) * y
        assert self.s.contains((x, y))
        assert self.s.contains((rx, ry))

    def test_area(self):
        sq = self.s.extras["s"]
        assert self.s.known_area == pytest.approx(8 * sq * sq)
        assert mc_area_ok(self.s)


class TestTableOne:
    s = table_one_set()

    def test_examples(self):
        assert self.s.contains((0.02, 0.10))
        assert not self.s.contains((0.5, 0.05))
        assert self.s.known_area == pytest.approx(1 / 3)
        assert self.s.extras["rho0"] == pytest.approx(2 * math.atan(1 / 3))

    def test_area_mc(self):
        assert mc_area_ok(self.s)

    def test_reentrant_corner_cones_empty(self):
        rho0 = self.s.extras["rho0"]
        pts = sample_uniform(self.s, 10**5, np.random.default_rng(4))
        for ang in (math.pi / 2, -math.pi / 2, math.pi, 0.0):
            cone = FiniteCone(Point(0.5, 0.5), UnitVector.from_angle(ang), rho0, 0.25)
            assert not cone_contains_many(cone, pts).any()


class TestBrownian:
    def test_axis_inside_and_above_graph_outside(self):
        shape = brownian_hypograph(1000, np.random.default_rng(1))
        f = shape.extras["path"]
        xs = np.linspace(0, 1, 257)
        assert shape.contains_many(np.column_stack((xs, np.zeros_like(xs)))).all()
        above = np.column_stack((f.grid, f.values + 0.01))
        assert not shape.contains_many(above).any()

    def test_min_shift(self):
        f = brownian_path(500, np.random.default_rng(2))
        assert f.values.min() == pytest.approx(0.05)

    def test_increment_variance(self):
        rng = np.random.default_rng(3)
        d = np.array([(lambda f: f.values[-1] - f.values[0])(brownian_path(100, rng)) for _ in range(10_000)])
        assert abs(d.var(ddof=1) - 1.0) < 0.05

    def test_path_validation(self):
        with pytest.raises(ValueError):
            brownian_path(1, np.random.default_rng(0))
        with pytest.raises(ValueError):
            PathFunction(np.array([0.0, 0.5, 0.4]), np.array([1.0, 1.0, 1.0]))
        with pytest.raises(ValueError):
            PathFunction(np.array([0.0, 1.0]), np.array([1.0, 0.0]))

    def test_area_is_integral(self):
        shape = brownian_hypograph(200, np.random.default_rng(5))
        assert mc_area_ok(shape, n=400_000)


class TestSampling:
    def test_n_zero(self, rng):
        with pytest.raises(ValueError):
            sample_uniform(table_one_set(), 0, rng)

    def test_acceptance_rate(self):
        # the sampler rejects from the box, so accepted/proposed ~ area / box area
        s = table_one_set()
        pts = s.bounding_box.uniform(np.random.default_rng(6), 300_000)
        rate = s.contains_many(pts).mean()
        assert abs(rate - 1 / 3) < 0.01 / 3

    def test_outputs_pass_membership(self, rng):
        for name in ("S1", "triangle-notch", "eight-star"):
            s = shape_by_name(name)
            assert s.contains_many(sample_uniform(s, 5000, rng)).all()

    def test_budget(self, rng):
        with pytest.raises(RejectionBudgetExceeded, match="S1"):
            sample_uniform(table_one_set(), 10_000, rng, max_proposals=2000)

    def test_seed_exchangeability(self):
        s = table_one_set()
        a = sample_uniform(s, 10_000, np.random.default_rng(10))
        b = sample_uniform(s, 10_000, np.random.default_rng(11))
        edges = np.linspace(0, 1, 11)
        ha, _, _ = np.histogram2d(a[:, 0], a[:, 1], [edges, edges])
        hb, _, _ = np.histogram2d(b[:, 0], b[:, 1], [edges, edges])
        keep = (ha + hb) > 0
        _, p, _, _ = chi2_contingency(np.vstack((ha[keep], hb[keep])))
        assert p > 0.001

    def test_unknown_shape(self):
        with pytest.raises(ValueError, match="unknown shape"):
            shape_by_name("hexagon")


class TestLoadPoints:
    def test_single_point(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("x,y\n0.1,0.2\n")
        assert load_points(p).tolist() == [[0.1, 0.2]]

    def test_malformed_row_line_number(self, tmp_path):
        p = tmp_path / "b.csv"
        p.write_text("x,y\n0.1;0.2\n")
        with pytest.raises(PointParseError, match=":2:"):
            load_points(p)

    def test_comments_and_blank_lines(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("# exported\nx,y\n\n1,2\n# mid\n3,4\n")
        assert load_points(p).tolist() == [[1, 2], [3, 4]]

    def test_empty_file(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("x,y\n")
        with pytest.raises(PointParseError, match="no points"):
            load_points(p)

    def test_missing_header(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("0.1,0.2\n")
        with pytest.raises(PointParseError, match=":1:"):
            load_points(p)

    def test_rescale(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("x,y\n2,0\n4,8\n3,5\n")
        pts = load_points(p, rescale=True)
        assert pts.min(axis=0).tolist() == [0.0, 0.0]
        assert pts.max(axis=0).tolist() == [1.0, 1.0]

    def test_round_trip(self, tmp_path, rng):
        pts = rng.uniform(0, 1, (100, 2))
        write_points(tmp_path / "g.csv", pts)
        assert np.array_equal(load_points(tmp_path / "g.csv"), pts)
