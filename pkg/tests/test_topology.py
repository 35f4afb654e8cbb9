import math
from fractions import Fraction

import numpy as np
import pytest

from lgpcurve.poly import eval_poly, parse_poly, partial_derivative
from lgpcurve.topology import (TopoConfig, TopologyError, critical_points, flexes, point_on_branch,
                               regular_tangent, segment_curve, tangent_at)

XY = ("x", "y")
BOX = (-2, 2, -2, 2)
S3 = math.sqrt(3)


def H(text):
    return parse_poly(text, XY)


def kinds(points, flag):
    return sorted((round(p.x, 6), round(p.y, 6)) for p in points if flag in p.flags)


def test_circle_critical_points():
    pts = critical_points(H("x^2+y^2-3"), BOX)
    r = round(S3, 6)
    assert kinds(pts, "x-critical") == [(-r, 0.0), (r, 0.0)]
    assert kinds(pts, "y-critical") == [(0.0, -r), (0.0, r)]
    assert not kinds(pts, "singular")


def test_nodal_cubic_singular():
    h = H("y^2-x^2*(x+1)")
    sing = [p for p in critical_points(h, BOX) if "singular" in p.flags]
    assert len(sing) == 1
    x0, y0 = sing[0].x, sing[0].y
    assert abs(x0) < 1e-12 and abs(y0) < 1e-12
    for q in (h, partial_derivative(h, "x"), partial_derivative(h, "y")):
        assert eval_poly(q, {"x": 0, "y": 0}) == 0


def test_line_has_no_critical_points():
    assert critical_points(H("y-x"), BOX) == []
    assert critical_points(H("y-x"), (-10, 10, -10, 10)) == []


def test_flexes():
    assert flexes(H("x^2+y^2-3"), BOX) == []
    assert flexes(H("y-x^2"), BOX) == []
    fl = flexes(H("y-x^3"), BOX)
    assert len(fl) == 1 and abs(fl[0].x) < 1e-12 and abs(fl[0].y) < 1e-12
    h = H("y-x^3")
    topo = segment_curve(h, BOX)
    # convexity flips across the flex: the secant lies above on one side, below on the other
    sides = []
    for s in topo.segments:
        a, b = s.x_domain
        m = point_on_branch(h, s, Fraction((a + b) / 2))
        sides.append(np.sign(m - (s.p0.y + s.p1.y) / 2))
    assert sorted(sides) == [-1, 1]


def test_circle_segments():
    topo = segment_curve(H("x^2+y^2-3"), BOX)
    # the split set is {-sqrt3, 0, sqrt3} here, so the circle has 4 regular segments
    assert len(topo.segments) == 4
    assert all(topo.degree(p.id) == 2 for p in topo.points)
    for s in topo.segments:
        assert s.has_vt


def test_sheared_circles_segments():
    hb = H("(x^2+y^2-2+2*y)*(x^2+y^2-2-2*y)")
    topo = segment_curve(hb, (-2, 2, -3, 3))
    assert len(topo.segments) == 16
    xs = [round(x, 6) for x in topo.split_x()]
    for v in (S3, math.sqrt(2), 0.0):
        assert round(v, 6) in xs and round(-v, 6) in xs
    nodes = [p for p in topo.points if "singular" in p.flags]
    assert len(nodes) == 2 and all(topo.degree(p.id) == 4 for p in nodes)


def test_empty_curve():
    assert segment_curve(H("x^2+y^2+1"), BOX).segments == []


def test_adjacency_degree_sum():
    topo = segment_curve(H("y^2-x^2*(x+1)"), BOX)
    assert sum(topo.degree(p.id) for p in topo.points) == 2 * len(topo.segments)


def test_box_enlargement_invariance():
    h = H("x^2+y^2-3")
    a = segment_curve(h, BOX)
    b = segment_curve(h, (-5, 7, -6, 3))
    assert len(a.segments) == len(b.segments)
    assert sorted(topo_deg(a)) == sorted(topo_deg(b))


def topo_deg(t):
    return [t.degree(p.id) for p in t.points]


def _segment(topo, x):
    for s in topo.segments:
        if s.p0.x < x < s.p1.x and s.p0.y + s.p1.y > 0:
            return s


def test_tangent_circle():
    h = H("x^2+y^2-3")
    t = regular_tangent(h, -1.6, 0.6633249580)
    assert abs(t.slope - 2.412090757) < 1e-8
    assert abs(t.slope - 1.6 / 0.6633249580) < 1e-3
    topo = segment_curve(h, BOX)
    left = [s for s in topo.segments if abs(s.p0.x + S3) < 1e-9]
    assert all(tangent_at(h, s, "p0").vertical for s in left)


def test_tangent_near_vt_of_sheared_circle():
    hb = H("(x^2+y^2-2+2*y)*(x^2+y^2-2-2*y)")
    x = -1.73204
    y = -1 + math.sqrt(3 - x * x)
    assert regular_tangent(hb, x, y, threshold=200).vertical


def test_tangent_sign_matches_secant():
    h = H("x^2+y^2-3")
    for x in (-1.2, -0.5, 0.4, 1.1):
        y = math.sqrt(3 - x * x)
        d = 1e-6
        sec = (math.sqrt(3 - (x + d) ** 2) - math.sqrt(3 - (x - d) ** 2)) / (2 * d)
        assert abs(regular_tangent(h, x, y).slope - sec) < 1e-3


def test_point_on_branch():
    h = H("x^2+y^2-3")
    topo = segment_curve(h, BOX)
    upper = [s for s in topo.segments if s.branch_ordinal == 1]
    s = upper[1]
    assert abs(point_on_branch(h, s, Fraction(1, 10 ** 9)) - S3) < 1e-9
    rng = np.random.default_rng(9)
    for x in rng.uniform(0.01, 1.7, 20):
        y = point_on_branch(h, s, Fraction(x))
        assert abs(y - math.sqrt(3 - x * x)) < 1e-9
    # near the endpoint the value tends to p0.y
    assert abs(point_on_branch(h, s, Fraction(1, 10 ** 12)) - s.p0.y) < 1e-9
    with pytest.raises(ValueError):
        point_on_branch(h, s, Fraction(-1))


def test_segments_are_monotone_and_convex():
    for text in ("x^2+y^2-3", "y^2-x^2*(x+1)", "y-x^3"):
        h = H(text)
        hx, hy = partial_derivative(h, "x"), partial_derivative(h, "y")
        hxx, hxy, hyy = (partial_derivative(hx, "x"), partial_derivative(hx, "y"),
                         partial_derivative(hy, "y"))
        topo = segment_curve(h, BOX)
        for s in topo.segments:
            a, b = s.x_domain
            signs, curv = set(), set()
            for t in np.linspace(0.05, 0.95, 10):
                x = a + t * (b - a)
                y = point_on_branch(h, s, Fraction(x))
                v = {"x": x, "y": y}
                gx, gy = eval_poly(hx, v), eval_poly(hy, v)
                signs.add((np.sign(gx), np.sign(gy)))
                num = eval_poly(hxx, v) * gy * gy - 2 * eval_poly(hxy, v) * gx * gy + eval_poly(hyy, v) * gx * gx
                curv.add(np.sign(num / gy ** 3))
            assert len(signs) == 1 and 0 not in next(iter(signs))
            assert len(curv) == 1


def _crossings_on_circle(h, cx, cy, rho, n=2000):
    th = np.linspace(0, 2 * np.pi, n, endpoint=False)
    vals = [eval_poly(h, {"x": cx + rho * math.cos(t), "y": cy + rho * math.sin(t)}) for t in th]
    sg = np.sign(vals)
    return int(np.sum(sg != np.roll(sg, 1)))


def test_nodal_cubic_node_degree():
    h = H("y^2-x^2*(x+1)")
    topo = segment_curve(h, BOX)
    node = [p for p in topo.points if "singular" in p.flags][0]
    assert topo.degree(node.id) == _crossings_on_circle(h, 0, 0, 0.05) == 4


def test_vt_threshold_config():
    h = H("x^2+y^2-3")
    a = segment_curve(h, BOX, cfg=TopoConfig(vt_threshold=200))
    assert len(a.segments) == 4
