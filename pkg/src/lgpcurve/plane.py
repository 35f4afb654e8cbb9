"""Rational quadratic and conic-arc fits of regular segments, with error control.

A non-VT segment gets Y(t) = (a t^2 + b t + c)/(d t + 1) on the normalized
parameter t = (X - x0)/(x1 - x0), interpolating both endpoints and slopes.
A segment with a vertical tangent at one end gets part of an ellipse or
hyperbola through both endpoints, vertical at the VT end and matching the
slope at the other.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import roots as rr
from .poly import MPoly
from .topology import (CurveTopology, PlanePoint, PlaneSegment, TangentDir2, TopoConfig,
                       _bivariate, point_on_branch, segment_curve)

log = logging.getLogger(__name__)


class FitError(ValueError):
    pass


# ----------------------------------------------------------------------
# forms


@dataclass(frozen=True)
class RationalQuadratic:
    """(a t^2 + b t + c)/(d t + 1) with t = (X - x0)/(x1 - x0)."""
    a: float
    b: float
    c: float
    d: float
    x0: float
    x1: float
    kind = "rational"

    def _t(self, x):
        return (np.asarray(x, dtype=float) - self.x0) / (self.x1 - self.x0)

    def __call__(self, x):
        t = self._t(x)
        return (self.a * t * t + self.b * t + self.c) / (self.d * t + 1.0)

    def deriv(self, x):
        t = self._t(x)
        q = self.d * t + 1.0
        num = (2 * self.a * t + self.b) * q - (self.a * t * t + self.b * t + self.c) * self.d
        return num / (q * q) / (self.x1 - self.x0)

    def simplified(self) -> Optional[Tuple[float, float, float, float]]:
        """(a~, b~, c~, d~) with Y = a~ X + b~ + c~/(d~ X + 1), when d != 0."""
        if self.d == 0:
            return None
        w = self.x1 - self.x0
        A = self.a / self.d
        Bq = (self.b - A) / self.d
        C = self.c - Bq
        D0 = 1.0 - self.d * self.x0 / w
        if D0 == 0:
            return None
        return (A / w, Bq - A * self.x0 / w, C / D0, self.d / (w * D0))

    def exact(self):
        """Exact numerator and denominator in X (low->high), from the float coefficients."""
        x0, w = Fraction(self.x0), Fraction(self.x1) - Fraction(self.x0)
        a, b, c, d = (dyadic(v) for v in (self.a, self.b, self.c, self.d))
        # t = (X - x0)/w
        t = [-x0 / w, 1 / w]
        tt = rr.mul(t, t)
        P = _padd(_padd([a * v for v in tt], [b * v for v in t]), [c])
        Q = _padd([d * v for v in t], [1])
        return P, Q


@dataclass(frozen=True)
class ConicArc:
    """y = y_vt + sign * C * sqrt(|2 a u - u^2|), u = x_dir * (x - x_vt) >= 0."""
    a: float
    C: float
    x_vt: float
    y_vt: float
    x_dir: int
    branch_sign: int
    x_other: float
    kind = "conic"

    @property
    def conic_kind(self) -> str:
        return "ellipse" if self.a > 0 else "hyperbola"

    @property
    def b(self) -> float:
        return self.C * abs(self.a)

    @property
    def x_o(self) -> float:
        return self.x_vt + self.x_dir * self.a

    def _u(self, x):
        return np.maximum(self.x_dir * (np.asarray(x, dtype=float) - self.x_vt), 0.0)

    def __call__(self, x):
        u = self._u(x)
        return self.y_vt + self.branch_sign * self.C * np.sqrt(np.abs(2 * self.a * u - u * u))

    def deriv(self, x):
        u = self._u(x)
        r = np.abs(2 * self.a * u - u * u)
        sk = 1.0 if self.a > 0 else -1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.branch_sign * self.x_dir * self.C * sk * (self.a - u) / np.sqrt(r)

    def expanded(self) -> Tuple[float, float, float, float]:
        """(C, p2, p1, p0) with y = y_vt + sign*C*sqrt(p2 x^2 + p1 x + p0)."""
        sk = 1.0 if self.a > 0 else -1.0
        ad = self.a * self.x_dir
        return (self.C, -sk, sk * (2 * self.x_vt + 2 * ad), -sk * (self.x_vt ** 2 + 2 * ad * self.x_vt))

    def implicit(self):
        """Exact conic Q(X, y) = 0 containing the arc: (y - y_vt)^2 - C^2 sk (2 a u - u^2)."""
        C2 = dyadic(self.C) ** 2
        yv = dyadic(self.y_vt)
        sk = 1 if self.a > 0 else -1
        # as polynomial in y with coefficients polynomials in X (low->high)
        rad = self.radicand()
        c0 = _padd([yv * yv], [-C2 * sk * v for v in rad])
        return [c0, [-2 * yv], [Fraction(1)]]

    def radicand(self):
        """Exact 2 a u - u^2 as a polynomial in X (low->high)."""
        a, xv = dyadic(self.a), dyadic(self.x_vt)
        u = [-self.x_dir * xv, Fraction(self.x_dir)]
        return _padd([2 * a * v for v in u], [-v for v in rr.mul(u, u)])


def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def dyadic(v: float, rel: float = 1e-12) -> Fraction:
    """Shortest dyadic rational within rel*max(1,|v|) of v."""
    v = float(v)
    if v == 0 or not math.isfinite(v):
        return Fraction(v) if math.isfinite(v) else Fraction(0)
    tol = rel * max(1.0, abs(v))
    for k in range(0, 1100):
        r = Fraction(round(v * 2 ** k), 2 ** k) if k < 1000 else Fraction(v)
        if abs(float(r) - v) <= tol:
            return r
    return Fraction(v)


@dataclass
class SegApprox:
    form: object
    x_domain: Tuple[float, float]
    error_bound: float = 0.0
    seg: Optional[PlaneSegment] = None
    k0: Optional[float] = None
    k1: Optional[float] = None
    y0: float = 0.0
    y1: float = 0.0
    vt_end: Optional[str] = None
    p0_id: Optional[int] = None      # plane point ids at the ends (None for interior knots)
    p1_id: Optional[int] = None

    @property
    def kind(self) -> str:
        return self.form.kind

    @property
    def is_rational(self) -> bool:
        return self.form.kind == "rational"

    def __call__(self, x):
        return self.form(x)

    def deriv(self, x):
        return self.form.deriv(x)


# ----------------------------------------------------------------------
# fitting


def fit_rational_quadratic(p0, p1, k0: float, k1: float) -> SegApprox:
    """Hermite fit with (a t^2 + b t + c)/(d t + 1) on the normalized domain."""
    x0, y0 = float(p0[0]), float(p0[1])
    x1, y1 = float(p1[0]), float(p1[1])
    if not x0 < x1:
        raise FitError("need x0 < x1")
    w = x1 - x0
    K0, K1 = k0 * w, k1 * w
    dy = y1 - y0
    scale = max(abs(dy), abs(K0), abs(K1), 1e-300)
    if abs(dy - K0) <= 1e-12 * scale and abs(dy - K1) <= 1e-12 * scale:
        form = RationalQuadratic(0.0, dy, y0, 0.0, x0, x1)
        return SegApprox(form, (x0, x1), 0.0, k0=k0, k1=k1, y0=y0, y1=y1)
    den = -dy + K1
    # the mean value theorem puts dy strictly between K0 and K1
    if (-dy + K0) * den >= 0:
        raise FitError("conditions for a convex monotone segment fail (upstream segmentation)")
    # the closed-form coefficients, rewritten in dy to avoid cancellation
    a = (dy * dy - K0 * K1) / den
    d = -(K0 + K1 - 2 * dy) / den
    b = y0 * d + K0
    c = y0
    if abs(d) < 1e-15:
        a, b, d = (K1 - K0) / 2, K0, 0.0
    if d <= -1:
        raise FitError("denominator vanishes in the domain")
    form = RationalQuadratic(a, b, c, d, x0, x1)
    return SegApprox(form, (x0, x1), 0.0, k0=k0, k1=k1, y0=y0, y1=y1)


def fit_conic_arc(p0, p1, k1: float, vt_end: str = "p0", y_side: int = 0) -> SegApprox:
    """Ellipse or hyperbola arc, vertical at the VT end, matching k1 at the other.

    ``k1`` is the slope at the non-VT end.
    """
    P = (float(p0[0]), float(p0[1]))
    Q = (float(p1[0]), float(p1[1]))
    vt, ot = (P, Q) if vt_end == "p0" else (Q, P)
    rho = 1 if ot[0] > vt[0] else -1
    dyv = ot[1] - vt[1]
    sigma = 1 if dyv > 0 else -1
    if y_side and y_side != sigma:
        raise FitError("y_side disagrees with the endpoints")
    u1 = abs(ot[0] - vt[0])
    v1 = abs(dyv)
    if u1 == 0 or v1 == 0:
        raise FitError("degenerate VT segment")
    k = sigma * rho * k1
    thr = v1 / (2 * u1)
    if abs(k - thr) <= 1e-12 * max(thr, 1e-300):
        raise FitError("shrink segment")
    if k <= 0 or k >= v1 / u1:
        raise FitError("VT segment is not convex and monotone")
    a = u1 * (v1 - k * u1) / (v1 - 2 * k * u1)
    C = v1 / math.sqrt(abs(2 * a * u1 - u1 * u1))
    form = ConicArc(a, C, vt[0], vt[1], rho, sigma, ot[0])
    lo, hi = sorted((P[0], Q[0]))
    kk = (None, k1) if vt_end == "p0" else (k1, None)
    return SegApprox(form, (lo, hi), 0.0, k0=kk[0], k1=kk[1], y0=P[1], y1=Q[1], vt_end=vt_end)


# ----------------------------------------------------------------------
# true branch values and error


class BranchTracer:
    """y-values of a segment's branch; Newton from a start value, checked by ordinal."""

    def __init__(self, h: MPoly, seg: PlaneSegment):
        self.h = h
        self.B = _bivariate(h)
        self.seg = seg
        self.Y1, self.Y2 = float(seg.ybox[0]), float(seg.ybox[1])
        self.fallbacks = 0

    def _ordinal_root(self, coeffs):
        r = np.roots(coeffs)
        re = np.sort(r.real[np.abs(r.imag) <= 1e-9 * (1 + np.abs(r))])
        re = re[(re > self.Y1) & (re < self.Y2)]
        if len(re) != self.seg.n_branches:
            return None
        return float(re[self.seg.branch_ordinal])

    @staticmethod
    def _newton(coeffs, dcoeffs, y, steps=40):
        for _ in range(steps):
            fp = np.polyval(dcoeffs, y)
            if fp == 0 or not np.isfinite(fp):
                return None
            step = np.polyval(coeffs, y) / fp
            y = y - step
            if not np.isfinite(y):
                return None
            if abs(step) <= 1e-15 * (1 + abs(y)):
                return float(y)
        return None

    def y(self, x: float, start: float) -> float:
        c = self.B.fiber_float(x)
        dc = np.polyder(c)
        yn = self._newton(c, dc, float(start))
        yo = self._ordinal_root(c)
        if yo is not None:
            yo2 = self._newton(c, dc, yo, steps=4)
            yo = yo2 if yo2 is not None and abs(yo2 - yo) < 1e-6 * (1 + abs(yo)) else yo
            if yn is not None and abs(yn - yo) <= 1e-8 * (1 + abs(yo)):
                return yn
        # clustered or disagreeing roots: isolate exactly
        self.fallbacks += 1
        return point_on_branch(self.h, self.seg, Fraction(x))


def estimate_error(h: MPoly, seg: PlaneSegment, approx: SegApprox, n: int = 19,
                   tracer: BranchTracer = None, refine: bool = True) -> float:
    """Max |Y(x) - y~(x)| over n+1 uniform samples, with local maxima refined.

    Endpoints are interpolated, so their deviation is taken as the
    difference to the stored endpoint values.
    """
    x0, x1 = approx.x_domain
    tr = tracer or BranchTracer(h, seg)
    xs = [x0 + i / n * (x1 - x0) for i in range(n + 1)]

    def dev(x):
        if x <= x0 or x >= x1:
            return 0.0
        yy = float(approx(x))
        return abs(yy - tr.y(x, yy))

    errs = [0.0] + [dev(x) for x in xs[1:-1]] + [0.0]
    best = max(errs)
    if refine and n >= 2:
        for i in range(1, n):
            if errs[i] >= errs[i - 1] and errs[i] >= errs[i + 1] and errs[i] > 0:
                lo, hi = xs[i - 1], xs[i + 1]
                r = minimize_scalar(lambda x: -dev(x), bounds=(lo, hi), method="bounded",
                                    options={"xatol": 1e-7 * (hi - lo)})
                best = max(best, -float(r.fun))
    return best * (1 + 1e-6) + 1e-14 if best > 0 else 0.0


# ----------------------------------------------------------------------
# triangle


@dataclass
class Triangle:
    vertices: Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float]]

    def contains(self, pts, slack: float = 1e-9) -> np.ndarray:
        (ax, ay), (bx, by), (cx, cy) = self.vertices
        P = np.atleast_2d(np.asarray(pts, dtype=float))
        area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if abs(area) < 1e-300:
            # degenerate: straight segment; test distance to the chord
            d = np.abs((bx - ax) * (P[:, 1] - ay) - (by - ay) * (P[:, 0] - ax))
            return d <= slack * max(1.0, math.hypot(bx - ax, by - ay))
        sg = 1.0 if area > 0 else -1.0
        out = np.ones(len(P), dtype=bool)
        for (ux, uy), (vx, vy) in (((ax, ay), (bx, by)), ((bx, by), (cx, cy)), ((cx, cy), (ax, ay))):
            ex, ey = vx - ux, vy - uy
            cr = sg * (ex * (P[:, 1] - uy) - ey * (P[:, 0] - ux))
            out &= cr >= -slack * max(1.0, math.hypot(ex, ey))
        return out


def triangle(p0, p1, k0: Optional[float], k1: Optional[float]) -> Triangle:
    """Triangle of the endpoints and the intersection of the endpoint tangents."""
    (x0, y0), (x1, y1) = p0, p1
    # line through p with slope k (None = vertical)
    if k0 is None and k1 is None:
        raise ValueError("both tangents vertical")
    if k0 is None:
        ax = x0
        ay = y1 + k1 * (x0 - x1)
    elif k1 is None:
        ax = x1
        ay = y0 + k0 * (x1 - x0)
    elif abs(k0 - k1) < 1e-300:
        ax, ay = (x0 + x1) / 2, (y0 + y1) / 2
    else:
        ax = (y1 - y0 + k0 * x0 - k1 * x1) / (k0 - k1)
        ay = y0 + k0 * (ax - x0)
    return Triangle(((x0, y0), (x1, y1), (ax, ay)))


def approx_triangle(ap: SegApprox) -> Triangle:
    x0, x1 = ap.x_domain
    return triangle((x0, ap.y0), (x1, ap.y1), ap.k0, ap.k1)


# ----------------------------------------------------------------------
# subdivision


def _mid_rational(a: float, b: float) -> Fraction:
    return (Fraction(a) + Fraction(b)) / 2


def subdivide(h: MPoly, seg: PlaneSegment) -> Tuple[PlaneSegment, PlaneSegment]:
    """Split at the x-midpoint; the new point lies on the segment's branch."""
    xm = _mid_rational(seg.p0.x, seg.p1.x)
    ym = point_on_branch(h, seg, xm)
    k = _bivariate(h).slope(float(xm), ym)
    t = TangentDir2(float(k))
    mid = PlanePoint(x=float(xm), y=ym, kind="regular", xiv=rr.Interval(xm, xm), xr=xm)
    left = PlaneSegment(seg.p0, mid, seg.k0, t, seg.branch_ordinal, seg.strip, seg.ybox,
                        n_branches=seg.n_branches)
    right = PlaneSegment(mid, seg.p1, t, seg.k1, seg.branch_ordinal, seg.strip, seg.ybox,
                         n_branches=seg.n_branches)
    return left, right


# ----------------------------------------------------------------------
# disjointness


def _exact_y_poly(ap: SegApprox):
    """Polynomial in y with coefficients in X (low->high) whose zero set holds the piece."""
    if ap.is_rational:
        P, Q = ap.form.exact()
        return [[-c for c in P], Q]            # Q y - P
    return ap.form.implicit()


def _res_y(A, B):
    """Resultant in y of two polynomials given as lists (in y) of X-coefficient lists."""
    from .poly import MPoly as MP, resultant

    def to_mp(L):
        terms = {}
        for j, cx in enumerate(L):
            for i, c in enumerate(cx):
                if c:
                    terms[(i, j)] = terms.get((i, j), 0) + Fraction(c)
        return MP(terms, ("x", "y"))

    r = resultant(to_mp(A), to_mp(B), "y")
    if r.is_zero():
        return []
    return r.univariate_coeffs()


def check_disjoint_plane(a1: SegApprox, a2: SegApprox, domain=None, shared=(), detail: dict = None) -> bool:
    """True iff the two pieces do not meet over the open common domain.

    ``shared`` lists x-values of endpoints the pieces legitimately share; roots
    within a hair of those are ignored.
    """
    lo = max(a1.x_domain[0], a2.x_domain[0])
    hi = min(a1.x_domain[1], a2.x_domain[1])
    if domain is not None:
        lo, hi = max(lo, domain[0]), min(hi, domain[1])
    if not lo < hi:
        return True
    A, B = _exact_y_poly(a1), _exact_y_poly(a2)
    T = _res_y(A, B)
    if not rr.trim(T) and not a1.is_rational and not a2.is_rational \
            and a1.form.branch_sign != a2.form.branch_sign:
        # two halves of one conic meet only where the radicand vanishes
        T = a1.form.radicand()
    if not rr.trim(T):
        if detail is not None:
            detail["reason"] = "coincident"
        log.warning("coincident approximations")
        return False
    flo, fhi = Fraction(lo), Fraction(hi)
    if rr.count_roots_in(T, flo, fhi) == 0:
        return True
    # rationalizing the coefficients moves a shared endpoint root by ~1e-12 relative
    eta = max(1e-9 * (hi - lo), 1e-11 * (1 + abs(lo)))
    both_rational = a1.is_rational and a2.is_rational
    sq = rr.upoly_sqf(T)
    for iv in rr.isolate_roots(sq, flo, fhi).roots:
        if iv.is_point() and iv.lo in (flo, fhi):
            continue
        iv = rr.refine_interval(sq, iv, Fraction(1, 2 ** 80))
        xr = float(iv.mid)
        if any(abs(xr - s) <= eta for s in shared):
            continue
        if not both_rational:
            # squaring can add roots on the other half of a conic
            d = abs(float(a1(xr)) - float(a2(xr)))
            scale = 1 + abs(float(a1(xr)))
            if d > 1e-7 * scale:
                continue
        if detail is not None:
            detail["x"] = xr
        return False
    return True


# ----------------------------------------------------------------------
# fitting loop shared with the space pipeline


@dataclass
class Knot:
    x: float
    xr: Optional[Fraction]
    ys: List[float]                 # per member
    ts: List[TangentDir2]
    pids: List[Optional[int]]


@dataclass
class Group:
    """Segments over the same strip, subdivided with shared knots."""
    members: List[Tuple[MPoly, PlaneSegment]]
    knots: List[Knot]
    tracers: List[BranchTracer] = None
    pieces: List[List[SegApprox]] = None       # pieces[interval][member]
    tol: Callable = None

    def __post_init__(self):
        if self.tracers is None:
            self.tracers = [BranchTracer(h, s) for h, s in self.members]


def make_group(members, vt_cap: float = 0.125) -> Group:
    _, s0 = members[0]
    ka = Knot(s0.p0.x, s0.p0.xr, [s.p0.y for _, s in members], [s.k0 for _, s in members],
              [s.p0.id for _, s in members])
    kb = Knot(s0.p1.x, s0.p1.xr, [s.p1.y for _, s in members], [s.k1 for _, s in members],
              [s.p1.id for _, s in members])
    g = Group(members, [ka, kb])
    w = s0.p1.x - s0.p0.x
    left_vt = any(t.vertical for t in ka.ts)
    right_vt = any(t.vertical for t in kb.ts)
    if left_vt:
        insert_knot(g, 1, Fraction(s0.p0.x) + Fraction(vt_cap) * Fraction(w))
    if right_vt:
        insert_knot(g, len(g.knots) - 1, Fraction(s0.p1.x) - Fraction(vt_cap) * Fraction(w))
    return g


def insert_knot(g: Group, index: int, xr: Fraction):
    """Insert a knot at rational xr before knots[index]."""
    ys, ts = [], []
    for (h, s) in g.members:
        y = point_on_branch(h, s, xr)
        ys.append(y)
        ts.append(TangentDir2(float(_bivariate(h).slope(float(xr), y))))
    g.knots.insert(index, Knot(float(xr), xr, ys, ts, [None] * len(g.members)))
    g.pieces = None


def fit_interval(g: Group, i: int, m: int) -> SegApprox:
    """Fit member m on knot interval [knots[i], knots[i+1]]."""
    ka, kb = g.knots[i], g.knots[i + 1]
    p0, p1 = (ka.x, ka.ys[m]), (kb.x, kb.ys[m])
    t0, t1 = ka.ts[m], kb.ts[m]
    if t0.vertical and t1.vertical:
        raise FitError("vertical tangents at both ends")
    if t0.vertical:
        ap = fit_conic_arc(p0, p1, t1.slope, "p0")
    elif t1.vertical:
        ap = fit_conic_arc(p0, p1, t0.slope, "p1")
    else:
        ap = fit_rational_quadratic(p0, p1, t0.slope, t1.slope)
    ap.seg = g.members[m][1]
    ap.p0_id, ap.p1_id = ka.pids[m], kb.pids[m]
    return ap


def interval_is_vt(g: Group, i: int) -> bool:
    return any(t.vertical for t in g.knots[i].ts) or any(t.vertical for t in g.knots[i + 1].ts)


def refine_group(g: Group, tol_nonvt: float, tol_vt: float, n: int = 19, max_knots: int = 4000):
    """Subdivide until every member piece meets its interval's tolerance."""
    i = 0
    fitted: Dict[int, List[SegApprox]] = {}
    while i < len(g.knots) - 1:
        tol = tol_vt if interval_is_vt(g, i) else tol_nonvt
        ok = True
        row = []
        for m, (h, s) in enumerate(g.members):
            try:
                ap = fit_interval(g, i, m)
            except FitError as exc:
                if str(exc).startswith("conditions") or "convex" in str(exc) or "shrink" in str(exc):
                    ok = False
                    break
                raise
            ap.error_bound = estimate_error(h, s, ap, n, tracer=g.tracers[m])
            row.append(ap)
            if ap.error_bound > tol:
                ok = False
                break
        if ok:
            fitted[i] = row
            i += 1
            continue
        if len(g.knots) > max_knots:
            raise FitError("subdivision limit reached")
        ka, kb = g.knots[i], g.knots[i + 1]
        if kb.x - ka.x < 1e-13 * max(1.0, abs(ka.x)):
            raise FitError("subdivision interval collapsed")
        # keep the knot nearest a VT end close to it, so VT pieces stay short
        insert_knot(g, i + 1, _mid_rational(ka.x, kb.x))
        fitted = {j: r for j, r in fitted.items() if j < i}
    g.pieces = [fitted[j] for j in range(len(g.knots) - 1)]
    return g


def split_interval(g: Group, i: int):
    ka, kb = g.knots[i], g.knots[i + 1]
    insert_knot(g, i + 1, _mid_rational(ka.x, kb.x))


def approximate_plane_curve(h: MPoly, box, delta: float, n: int = 19, cfg: TopoConfig = None,
                            topo: CurveTopology = None, max_rounds: int = 20, report: list = None):
    """Pieces with error <= delta, C1 at joins and pairwise disjoint; returns (pieces, topology)."""
    topo = topo or segment_curve(h, box, cfg=cfg)
    groups = [make_group([(h, s)]) for s in topo.segments]
    for g in groups:
        refine_group(g, delta, delta, n)
    same_strip = lambda ga, gb: [(0, 0)] if ga is not gb and \
        ga.members[0][1].strip == gb.members[0][1].strip else []
    enforce_disjoint(groups, same_strip, delta, delta, n, max_rounds, report=report)
    pieces = [row[0] for g in groups for row in g.pieces]
    return pieces, topo


def _shared_x(a: SegApprox, b: SegApprox) -> List[float]:
    out = []
    for xa, pa in ((a.x_domain[0], a.p0_id), (a.x_domain[1], a.p1_id)):
        for xb, pb in ((b.x_domain[0], b.p0_id), (b.x_domain[1], b.p1_id)):
            if xa == xb and abs(float(a(xa)) - float(b(xb))) <= 1e-9 * (1 + abs(float(a(xa)))):
                out.append(xa)
    return out


def enforce_disjoint(groups: List[Group], pairs_of, tol_nonvt, tol_vt, n, max_rounds=20,
                     report: list = None):
    """Pairwise disjointness of pieces; offending intervals are bisected and refitted.

    ``pairs_of(ga, gb)`` lists the member index pairs to compare between two
    groups (ga is gb for pairs inside one group); an empty list skips them.
    ``report`` receives (piece, piece, ok) for every check of the final round.
    """
    for rnd in range(max_rounds):
        bad: Dict[int, set] = {}
        checks = []
        for gi, ga in enumerate(groups):
            for gj in range(gi, len(groups)):
                gb = groups[gj]
                combos = pairs_of(ga, gb)
                if not combos:
                    continue
                for ia, rowa in enumerate(ga.pieces):
                    for ib, rowb in enumerate(gb.pieces):
                        if gi == gj and ia != ib:
                            continue
                        a0, a1 = rowa[0].x_domain
                        b0, b1 = rowb[0].x_domain
                        if min(a1, b1) <= max(a0, b0):
                            continue
                        for ma, mb in combos:
                            pa, pb = rowa[ma], rowb[mb]
                            ok = check_disjoint_plane(pa, pb, shared=_shared_x(pa, pb))
                            checks.append((pa, pb, ok))
                            if not ok:
                                bad.setdefault(gi, set()).add(ia)
                                bad.setdefault(gj, set()).add(ib)
        if not bad:
            if report is not None:
                report.extend(checks)
            return len(checks)
        log.info("disjointness round %d: refining %d groups", rnd, len(bad))
        for gi, idxs in bad.items():
            g = groups[gi]
            for i in sorted(idxs, reverse=True):
                split_interval(g, i)
            refine_group(g, tol_nonvt, tol_vt, n)
    raise FitError("approximations still intersect after refinement")
