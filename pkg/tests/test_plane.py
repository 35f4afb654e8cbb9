import math
from fractions import Fraction

import numpy as np
import pytest

from helpers import CIRCLE, circle_upper
from lgpcurve.plane import (FitError, approx_triangle, approximate_plane_curve, check_disjoint_plane,
                            estimate_error, fit_conic_arc, fit_rational_quadratic, subdivide)
from lgpcurve.poly import parse_poly
from lgpcurve.topology import point_on_branch, segment_curve

XY = ("x", "y")
BOX = (-2, 2, -2, 2)


def fit_seg(seg):
    return fit_rational_quadratic((seg.p0.x, seg.p0.y), (seg.p1.x, seg.p1.y), seg.k0.slope, seg.k1.slope)


def test_parabola_exact():
    ap = fit_rational_quadratic((0, 0), (1, 1), 0, 2)
    f = ap.form
    assert (f.a, f.b, f.c, f.d) == (1, 0, 0, 0)
    xs = np.linspace(0, 1, 11)
    assert np.allclose(ap(xs), xs ** 2, atol=1e-15)
    h = parse_poly("y-x^2", XY)
    seg = circle_upper_like(h)
    assert estimate_error(h, seg, fit_seg(seg)) < 1e-12


def circle_upper_like(h):
    topo = segment_curve(h, (0, 1, -2, 2))
    return topo.segments[0]


def test_line_exact():
    ap = fit_rational_quadratic((0, 0), (1, 1), 1, 1)
    assert ap.form.d == 0 and ap.form.a == 0
    assert np.allclose(ap(np.linspace(0, 1, 7)), np.linspace(0, 1, 7))


def test_circle_c2_segment():
    seg = circle_upper(-1.6, -1.4)
    ap = fit_seg(seg)
    a, b, c, d = ap.form.simplified()
    assert abs(a - 0.6106757885) < 1e-6 and abs(b - 2.310809554) < 1e-6 and abs(d - 0.5070598449) < 1e-6
    err = estimate_error(CIRCLE, seg, ap)
    assert abs(err - 0.0004) <= 2e-4


def test_conic_unit_circle():
    ap = fit_conic_arc((-1, 0), (-0.6, 0.8), 0.75, vt_end="p0")
    assert abs(ap.form.a - 1) < 1e-12 and abs(ap.form.b - 1) < 1e-12
    xs = np.linspace(-1, -0.6, 21)
    assert np.allclose(ap(xs), np.sqrt(1 - xs ** 2), atol=1e-12)


def test_conic_sqrt3_segment():
    x1 = -1.6
    y1 = math.sqrt(3 - x1 * x1)
    ap = fit_conic_arc((-math.sqrt(3), 0), (x1, y1), x1 / -y1, vt_end="p0")
    C, p2, p1, p0 = ap.form.expanded()
    assert abs(C - 1) < 1e-6 and abs(p2 + 1) < 1e-12 and abs(p1) < 1e-6 and abs(p0 - 3) < 1e-5
    xs = np.linspace(-math.sqrt(3), x1, 31)
    assert np.max(np.abs(ap(xs) - np.sqrt(np.maximum(3 - xs ** 2, 0)))) < 1e-6


def test_conic_threshold():
    with pytest.raises(FitError, match="shrink"):
        fit_conic_arc((-1, 0), (-0.6, 0.8), 0.8 / (2 * 0.4), vt_end="p0")


def test_subdivide_children():
    seg = circle_upper(-1.0, 0.0)
    left, right = subdivide(CIRCLE, seg)
    assert left.p0.x == -1.0 and right.p1.x == 0.0 and left.p1.x == right.p0.x == -0.5
    assert abs(left.p1.y - math.sqrt(3 - 0.25)) < 1e-12
    assert left.p1.y == point_on_branch(CIRCLE, seg, Fraction(-1, 2))


def test_subdivision_converges():
    segs = [circle_upper(-1.0, 0.0)]
    errs = []
    for k in range(9):
        errs.append(max(estimate_error(CIRCLE, s, fit_seg(s)) for s in segs))
        segs = [c for s in segs for c in subdivide(CIRCLE, s)]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-6


def test_disjoint_concentric():
    inner = parse_poly("x^2+y^2-2", XY)
    a = fit_seg(circle_upper(-1.0, -0.2))
    b = fit_seg(circle_upper(-1.0, -0.2, h=inner, rad2=2))
    assert check_disjoint_plane(a, b)
    assert not check_disjoint_plane(a, a)


def test_circle_approximation():
    pieces, topo = approximate_plane_curve(CIRCLE, BOX, 0.0044)
    assert len(pieces) >= 8
    assert all(p.error_bound <= 0.0044 for p in pieces)
    for i, a in enumerate(pieces):
        for b in pieces[i + 1:]:
            if a.seg.strip == b.seg.strip and a.x_domain == b.x_domain:
                assert check_disjoint_plane(a, b)


def test_line_single_piece():
    pieces, _ = approximate_plane_curve(parse_poly("y-x", XY), BOX, 1e-3)
    assert len(pieces) == 1 and pieces[0].error_bound == 0


def test_nodal_cubic_topology():
    h = parse_poly("y^2-x^2*(x+1)", XY)
    pieces, topo = approximate_plane_curve(h, BOX, 1e-2)
    assert all(p.error_bound <= 1e-2 for p in pieces)
    node = [p for p in topo.points if "singular" in p.flags][0]
    incident = [p for p in pieces if node.id in (p.p0_id, p.p1_id)]
    assert len(incident) == 4


@pytest.mark.parametrize("text,delta", [("x^2+y^2-3", 0.0044), ("y^2-x^2*(x+1)", 1e-2), ("y-x^3", 1e-3)])
def test_piece_invariants(text, delta):
    h = parse_poly(text, XY)
    pieces, _ = approximate_plane_curve(h, BOX, delta)
    for ap in pieces:
        x0, x1 = ap.x_domain
        xs = np.linspace(x0, x1, 52)[1:-1]
        P = np.column_stack([xs, ap(xs)])
        assert approx_triangle(ap).contains(P, slack=1e-9).all()
        assert abs(float(ap(x0)) - ap.y0) < 1e-9 and abs(float(ap(x1)) - ap.y1) < 1e-9
        for x, k in ((x0, ap.k0), (x1, ap.k1)):
            if k is not None and ap.vt_end is None:
                assert abs(float(ap.deriv(x)) - k) < 1e-6 * max(1, abs(k))
        if ap.is_rational:
            assert ap.form.d > -1
