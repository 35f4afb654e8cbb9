"""Small builders shared by several test modules."""
import math
from dataclasses import replace
from fractions import Fraction

from lgpcurve.poly import parse_poly
from lgpcurve.roots import Interval
from lgpcurve.topology import PlanePoint, TangentDir2, regular_tangent, segment_curve

CIRCLE = parse_poly("x^2+y^2-3", ("x", "y"))


def point(x, y):
    xr = Fraction(x)
    return PlanePoint(x=float(x), y=float(y), kind="regular", xiv=Interval(xr, xr), xr=xr)


def circle_upper(x0, x1, h=CIRCLE, rad2=3):
    """Upper-branch segment of x^2+y^2=rad2 over [x0, x1] (x1 <= 0)."""
    topo = segment_curve(h, (-2, 2, -2, 2))
    seg = [s for s in topo.segments if s.branch_ordinal == 1 and s.p1.x <= 1e-12][0]
    y0, y1 = math.sqrt(rad2 - x0 * x0), math.sqrt(rad2 - x1 * x1)
    k0 = regular_tangent(h, x0, y0, threshold=1e300)
    k1 = regular_tangent(h, x1, y1, threshold=1e300) if x1 != 0 else TangentDir2(0.0)
    return replace(seg, p0=point(x0, y0), p1=point(x1, y1), k0=k0, k1=k1)
