"""Topology of a plane algebraic curve inside a box, by a sweep over event x-values.

Events are the real roots of the discriminant-like eliminants (x-critical and
singular points, y-critical points, flexes), of the leading coefficient in y,
of the box edges h(x, Y1), h(x, Y2), and the box sides X1, X2 themselves.
Between consecutive events the curve is a set of disjoint graphs over x,
each monotone and convex; those are the regular segments.

Branches are connected to the points over an event by small boxes whose
horizontal edges are proven free of the curve with Sturm counts.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from . import roots as rr
from .poly import (MPoly, divexact, eval_poly, factor_only_in, gcd_poly,
                   hessian_homogeneous, partial_derivative, resultant)
from .roots import Interval

log = logging.getLogger(__name__)

MP_DPS = 60
EVENT_WIDTH = Fraction(1, 2 ** 140)


class TopologyError(RuntimeError):
    pass


class AssumptionError(ValueError):
    pass


@dataclass(frozen=True)
class TangentDir2:
    slope: Optional[float]          # None means vertical

    @property
    def vertical(self) -> bool:
        return self.slope is None

    @classmethod
    def of(cls, k, threshold: float = 100.0) -> "TangentDir2":
        if k is None or not np.isfinite(k) or abs(k) > threshold:
            return cls(None)
        return cls(float(k))

    def __repr__(self):
        return "Vertical" if self.slope is None else f"Slope({self.slope:.10g})"


@dataclass
class PlanePoint:
    x: float
    y: float
    kind: str                       # regular, x-critical, y-critical, singular, flex, box-boundary
    xiv: Interval                   # isolating interval (or point) of the x-coordinate
    ybox: Tuple[Fraction, Fraction] = None
    event: Optional[int] = None     # index into CurveTopology.events
    id: int = -1
    xr: Optional[Fraction] = None   # exact x when rational
    flags: frozenset = frozenset()


@dataclass
class PlaneSegment:
    p0: PlanePoint
    p1: PlanePoint
    k0: TangentDir2
    k1: TangentDir2
    branch_ordinal: int
    strip: int
    ybox: Tuple[Fraction, Fraction]
    id: int = -1
    n_branches: int = 0             # branches of the strip, for ordinal lookups

    @property
    def x_domain(self) -> Tuple[float, float]:
        return (self.p0.x, self.p1.x)

    @property
    def has_vt(self) -> bool:
        return self.k0.vertical or self.k1.vertical


@dataclass
class Event:
    iv: Interval
    sources: set
    x: float = 0.0
    mid: Fraction = None
    points: List[PlanePoint] = field(default_factory=list)


@dataclass
class CurveTopology:
    h: MPoly
    box: Tuple[Fraction, Fraction, Fraction, Fraction]
    events: List[Event]
    samples: List[Fraction]          # rational x inside each strip
    counts: List[int]                # branches per strip
    points: List[PlanePoint]
    segments: List[PlaneSegment]
    adjacency: Dict[int, List[int]]

    def split_x(self) -> List[float]:
        return [e.x for e in self.events]

    def degree(self, point_id: int) -> int:
        return len(self.adjacency.get(point_id, []))


# ----------------------------------------------------------------------
# numeric helpers


class Bivariate:
    """Caches an MPoly in (x, y) for exact and numeric evaluation."""

    def __init__(self, h: MPoly):
        h = h.with_vars(("x", "y"))
        self.h = h
        self.hx = partial_derivative(h, "x")
        self.hy = partial_derivative(h, "y")
        self.dy = h.degree("y")
        self.dx = h.degree("x")
        # ycoef[j] = coefficient list in x of y^j
        self.ycoef = [[0] * (self.dx + 1) for _ in range(self.dy + 1)]
        for (i, j), c in h.terms.items():
            self.ycoef[j][i] = c
        self.xcoef = [[0] * (self.dy + 1) for _ in range(self.dx + 1)]
        for (i, j), c in h.terms.items():
            self.xcoef[i][j] = c
        self._fy = [np.array([float(c) for c in reversed(row)]) for row in self.ycoef]
        self._terms = [(i, j, c) for (i, j), c in h.terms.items()]
        self._dterms = {
            "x": [(i, j, c) for (i, j), c in self.hx.terms.items()],
            "y": [(i, j, c) for (i, j), c in self.hy.terms.items()],
        }

    def fiber(self, xr: Fraction) -> list:
        """Exact coefficients (low->high) of h(xr, y)."""
        return [rr.horner(row, Fraction(xr)) for row in self.ycoef]

    def at_y(self, yr: Fraction) -> list:
        return [rr.horner(row, Fraction(yr)) for row in self.xcoef]

    def fiber_float(self, x: float) -> np.ndarray:
        """Float coefficients, highest degree first, of h(x, y)."""
        return np.array([np.polyval(c, x) for c in reversed(self._fy)])

    def _ev(self, terms, x, y):
        return sum(c * x ** i * y ** j for i, j, c in terms)

    def eval_mp(self, x, y):
        return self._ev([(i, j, _mpf(c)) for i, j, c in self._terms], x, y)

    def grad_mp(self, x, y):
        gx = self._ev([(i, j, _mpf(c)) for i, j, c in self._dterms["x"]], x, y)
        gy = self._ev([(i, j, _mpf(c)) for i, j, c in self._dterms["y"]], x, y)
        return gx, gy

    def abs_scale(self, x, y):
        ax, ay = abs(x), abs(y)
        return sum(abs(_mpf(c)) * ax ** i * ay ** j for i, j, c in self._terms)

    def grad_scale(self, x, y):
        """Magnitude scale for deciding whether a gradient component vanishes."""
        ax, ay = abs(x), abs(y)
        sx = sum(abs(_mpf(c)) * ax ** i * ay ** j for i, j, c in self._dterms["x"])
        sy = sum(abs(_mpf(c)) * ax ** i * ay ** j for i, j, c in self._dterms["y"])
        return sx, sy

    def slope_mp(self, x, y):
        gx, gy = self.grad_mp(x, y)
        if gy == 0:
            return None
        return -gx / gy

    def slope(self, x: float, y: float) -> float:
        with mpmath.workdps(30):
            k = self.slope_mp(mpmath.mpf(x), mpmath.mpf(y))
        return float("inf") if k is None else float(k)


def _mpf(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpf(c)


def dyadic_between(a: Fraction, b: Fraction) -> Fraction:
    """Rational with the smallest power-of-two denominator in the middle half of (a, b)."""
    a, b = Fraction(a), Fraction(b)
    w = b - a
    lo, hi = a + w / 4, b - w / 4
    k = 0
    while True:
        d = 2 ** k
        n = -((-lo.numerator * d) // lo.denominator)   # ceil(lo * d)
        if Fraction(n, d) <= hi:
            return Fraction(n, d)
        k += 1


# ----------------------------------------------------------------------
# event polynomials


def _univ(p: MPoly, var: str = "x") -> list:
    if p.is_zero():
        return []
    return rr.upoly_sqf(p.univariate_coeffs())


def check_no_vertical_lines(h: MPoly):
    vx = factor_only_in(h.with_vars(("x", "y")), "x")
    if not vx.is_zero() and not vx.is_constant():
        raise AssumptionError(f"assumption violated: vertical line component {vx!r}")


def event_polys(h: MPoly, box) -> Dict[str, list]:
    """Squarefree univariate polynomials in x whose real roots are the events of h."""
    h = h.with_vars(("x", "y"))
    X1, X2, Y1, Y2 = box
    out: Dict[str, list] = {}
    if h.degree("y") <= 0:
        if h.degree("x") > 0:
            raise AssumptionError("assumption violated: curve is a union of vertical lines")
        return out
    check_no_vertical_lines(h)
    hx = partial_derivative(h, "x")
    hy = partial_derivative(h, "y")
    disc = resultant(h, hy, "y")
    if disc.is_zero():
        raise TopologyError("positive-dimensional critical locus (input not squarefree)")
    out["disc"] = _univ(disc)
    horiz = factor_only_in(h, "y")
    hn = divexact(h, horiz) if not horiz.is_constant() else h
    if hn.degree("x") > 0 and hn.degree("y") > 0:
        r = resultant(hn, partial_derivative(hn, "x"), "y")
        if not r.is_zero():
            out["ycrit"] = _univ(r)
    if h.degree() >= 3:
        H = hessian_homogeneous(h)
        if not H.is_zero():
            g = gcd_poly(h, H)
            h1 = divexact(h, g) if not g.is_constant() else h
            if h1.degree("y") > 0 and not H.is_constant():
                r = resultant(h1, H, "y")
                if not r.is_zero():
                    out["flex"] = _univ(r)
    lc = h.leading_coeff("y")
    if lc.degree("x") > 0:
        out["lc"] = _univ(lc)
    for name, yv in (("bottom", Y1), ("top", Y2)):
        e = eval_poly(h, {"y": Fraction(yv)})
        u = _univ(e) if not isinstance(e, (int, Fraction)) else []
        if u:
            out[name] = u
    return {k: v for k, v in out.items() if len(v) >= 2}


def coprime_basis(polys: Sequence[Tuple[str, list]]) -> List[Tuple[set, list]]:
    """Pairwise coprime squarefree polynomials with the same real roots as the input."""
    basis: List[Tuple[set, list]] = []
    for name, q in polys:
        q = rr.to_int_primitive(q)
        tags = {name}
        new_basis = []
        for btags, b in basis:
            if len(q) < 2:
                new_basis.append((btags, b))
                continue
            g = rr.upoly_gcd(b, q)
            if len(g) < 2:
                new_basis.append((btags, b))
                continue
            bq = rr.to_int_primitive(rr.divmod_poly(b, g)[0])
            q = rr.to_int_primitive(rr.divmod_poly(q, g)[0])
            if len(bq) >= 2:
                new_basis.append((btags, bq))
            new_basis.append((btags | tags, g))
        basis = new_basis
        if len(q) >= 2:
            basis.append((tags, q))
    return basis


def isolate_events(polys: Dict[str, list], X1: Fraction, X2: Fraction) -> List[Event]:
    """Sorted, pairwise disjoint event intervals in [X1, X2], including X1 and X2."""
    basis = coprime_basis(list(polys.items()))
    items: List[Tuple[Interval, set, list]] = []
    for tags, p in basis:
        for iv in rr.isolate_roots(p, X1, X2).roots:
            items.append((iv, set(tags), p))
    # box sides; merge with a root sitting exactly on them
    for X, tag in ((X1, "xmin"), (X2, "xmax")):
        hit = [it for it in items if it[0].is_point() and it[0].lo == X]
        if hit:
            hit[0][1].add(tag)
        else:
            items.append((Interval(X, X), {tag}, [-X.numerator, X.denominator]))
    items.sort(key=lambda it: it[0].lo)
    # refine until disjoint and well separated
    for _ in range(400):
        items.sort(key=lambda it: (it[0].lo + it[0].hi) / 2)
        bad = set()
        for i in range(len(items) - 1):
            a, b = items[i][0], items[i + 1][0]
            gap = b.lo - a.hi
            if gap <= 0 or gap < 2 * max(a.width, b.width):
                bad.update((i, i + 1))
        if not bad:
            break
        for i in bad:
            iv, tags, p = items[i]
            if not iv.is_point():
                items[i] = (rr.refine_interval(p, iv, iv.width / 4), tags, p)
    else:
        raise TopologyError("could not separate event intervals")
    events = []
    for iv, tags, p in items:
        if not iv.is_point():
            iv = rr.refine_interval(p, iv, EVENT_WIDTH)
        ev = Event(iv=iv, sources=tags)
        ev.mid = iv.mid
        ev.x = float(ev.mid)
        ev.poly = p
        events.append(ev)
    return events


# ----------------------------------------------------------------------
# fibers


def fiber_roots(B: Bivariate, xr: Fraction, ylo: Fraction, yhi: Fraction) -> Tuple[List[Interval], list]:
    """Isolating intervals of the roots of h(xr, y) in the open interval (ylo, yhi)."""
    c = B.fiber(xr)
    rs = rr.isolate_roots(c, ylo, yhi)
    out = [iv for iv in rs.roots if not (iv.is_point() and iv.lo in (ylo, yhi))]
    return out, list(rs.poly)


def _cluster_roots(coeffs_mp, tol_im, tol_cl):
    """Real clusters (center, size) of the numeric roots of a polynomial."""
    cs = list(coeffs_mp)
    big = max(abs(c) for c in cs)
    while len(cs) > 1 and abs(cs[-1]) < big * mpmath.mpf(10) ** (-(MP_DPS - 10)):
        cs.pop()
    if len(cs) < 2:
        return []
    hi_first = list(reversed(cs))
    try:
        rts = mpmath.polyroots(hi_first, maxsteps=400, extraprec=4 * MP_DPS)
    except mpmath.libmp.NoConvergence:
        rts = mpmath.polyroots(hi_first, maxsteps=4000, extraprec=12 * MP_DPS, error=False)
        if isinstance(rts, tuple):
            rts = rts[0]
    if not isinstance(rts, (list, tuple)):
        rts = [rts]
    near_real = [r for r in rts if abs(mpmath.im(r)) <= tol_im * (1 + abs(r))]
    reals = sorted(mpmath.re(r) for r in near_real)
    clusters: List[List] = []
    for r in reals:
        if clusters and abs(r - clusters[-1][-1]) <= tol_cl * (1 + abs(r)):
            clusters[-1].append(r)
        else:
            clusters.append([r])
    return [(sum(c) / len(c), len(c), max(c) - min(c)) for c in clusters]


def _no_crossing(B: Bivariate, yr: Fraction, a: Fraction, b: Fraction) -> bool:
    """True when h(x, yr) has no root for x in the closed interval [a, b]."""
    p = rr.trim(B.at_y(yr))
    if len(p) < 2:
        return bool(p) and p[0] != 0
    ip = rr.to_int_primitive(p)
    if rr.sign_at(ip, a) == 0 or rr.sign_at(ip, b) == 0:
        return False
    if a == b:
        return True
    return rr.count_roots_in(ip, a, b) == 0


def _analyze_event(B: Bivariate, ev: Event, ybox, left_q, right_q, left_n, right_n, cfg):
    """Points over an event and the box assignment of neighbouring strip branches.

    Returns (points, left_assign, right_assign, boxes, delta) where *_assign maps
    branch ordinal -> cluster index.
    """
    Y1, Y2 = ybox
    with mpmath.workdps(MP_DPS):
        cm = _mpf(ev.mid)
        coeffs = [_mpf(c) for c in B.fiber(ev.mid)]
        tol_cl = mpmath.mpf(10) ** (-8)
        clusters = _cluster_roots(coeffs, tol_cl, tol_cl)
        span = Y2 - Y1
        margin = mpmath.mpf(float(span)) * mpmath.mpf(10) ** (-9)
        lo_lim, hi_lim = _mpf(Y1) - margin, _mpf(Y2) + margin
        nearby = [c for c in clusters if _mpf(Y1) - span <= c[0] <= _mpf(Y2) + span]
        boxes = []
        for i, (yc, m, spread) in enumerate(nearby):
            gaps = []
            if i > 0:
                gaps.append(yc - nearby[i - 1][0])
            if i + 1 < len(nearby):
                gaps.append(nearby[i + 1][0] - yc)
            rho = min(gaps) * mpmath.mpf("0.4") if gaps else mpmath.mpf(float(span)) / 4 + 1
            rho = min(rho, mpmath.mpf(float(span)) / 4 + mpmath.mpf(1) / 8)
            if rho <= 4 * spread:
                raise TopologyError(f"unresolved root cluster over x={float(cm):.6g}")
            lo = Fraction(float(yc - rho))
            hi = Fraction(float(yc + rho))
            boxes.append((lo, hi, yc, m))
    has_left = left_q is not None
    has_right = right_q is not None
    lim = []
    if has_left:
        lim.append(ev.iv.lo - left_q)
    if has_right:
        lim.append(right_q - ev.iv.hi)
    delta = min(lim) / 2 if lim else Fraction(1)
    for _ in range(80):
        a = ev.iv.lo - delta if has_left else ev.iv.lo
        b = ev.iv.hi + delta if has_right else ev.iv.hi
        ok = all(_no_crossing(B, lo, a, b) and _no_crossing(B, hi, a, b) for lo, hi, _, _ in boxes)
        if ok:
            break
        delta /= 4
    else:
        raise TopologyError(f"could not separate fiber boxes over x={ev.x:.6g}")

    def assign(xs: Fraction, count: int):
        ivs, sq = fiber_roots(B, xs, Y1, Y2)
        if len(ivs) != count:
            raise TopologyError(f"branch count changed inside a strip near x={ev.x:.6g}")
        res = {}
        for j, iv in enumerate(ivs):
            for _ in range(200):
                inside = [k for k, (lo, hi, _, _) in enumerate(boxes) if lo < iv.lo and iv.hi < hi]
                if inside:
                    res[j] = inside[0]
                    break
                if iv.is_point():
                    break
                iv = rr.refine_interval(sq, iv, iv.width / 8)
            if j not in res:
                raise TopologyError(f"branch {j} near x={ev.x:.6g} reaches no fiber point")
        return res

    left = assign(ev.iv.lo - delta, left_n) if has_left else {}
    right = assign(ev.iv.hi + delta, right_n) if has_right else {}
    keep = []
    for k, (lo, hi, yc, m) in enumerate(boxes):
        inbox = lo_lim <= yc <= hi_lim
        used = k in left.values() or k in right.values()
        if used and not inbox:
            raise TopologyError("branch connects to a point outside the box")
        if inbox:
            keep.append(k)
    return boxes, keep, left, right, delta


def _classify(B: Bivariate, Hb: Optional[Bivariate], ev: Event, yc, m, ybox):
    """Kind, snapped y and the set of properties of a fiber point."""
    Y1, Y2 = ybox
    small = mpmath.mpf(10) ** -12
    with mpmath.workdps(MP_DPS):
        x = _mpf(ev.mid)
        gx, gy = B.grad_mp(x, yc)
        sx, sy = B.grad_scale(x, yc)
        x_zero = abs(gx) <= small * (sx + 1)
        y_zero = m > 1 or abs(gy) <= small * (sy + 1)
        flex = False
        if Hb is not None and "flex" in ev.sources and not (x_zero and y_zero):
            flex = abs(Hb.eval_mp(x, yc)) <= small * (Hb.abs_scale(x, yc) + 1)
    y = float(yc)
    tol = 1e-9 * float(Y2 - Y1)
    if abs(y - float(Y1)) < tol and "bottom" in ev.sources:
        y = float(Y1)
    if abs(y - float(Y2)) < tol and "top" in ev.sources:
        y = float(Y2)
    flags = set()
    if y_zero and x_zero:
        flags.add("singular")
    elif y_zero:
        flags.add("x-critical")
    elif x_zero:
        flags.add("y-critical")
    if flex:
        flags.add("flex")
    if y in (float(Y1), float(Y2)) or ev.sources & {"xmin", "xmax"}:
        flags.add("box-boundary")
    for kind in ("singular", "x-critical", "flex", "y-critical", "box-boundary"):
        if kind in flags:
            return kind, y, frozenset(flags)
    return "regular", y, frozenset(flags)


def _branch_point(B: Bivariate, xs: Fraction, lo: Fraction, hi: Fraction, idx: int, width=Fraction(1, 2 ** 90)):
    ivs, sq = fiber_roots(B, xs, lo, hi)
    iv = rr.refine_interval(sq, ivs[idx], width)
    return iv.mid


def _singular_slopes(B: Bivariate, ev: Event, box, side_branches, delta, cfg):
    """Slopes of the branches through a singular point, estimated near it."""
    lo, hi = box[0], box[1]
    dt = min(delta / 2, Fraction(1, 10 ** 7) * (1 + abs(Fraction(ev.x)).__ceil__())) / 1000
    dt = Fraction(float(dt))
    out = {}
    for side, ords in side_branches.items():
        if not ords:
            continue
        xs = ev.iv.lo - dt if side < 0 else ev.iv.hi + dt
        xs2 = ev.iv.lo - dt / 64 if side < 0 else ev.iv.hi + dt / 64
        for rank, j in enumerate(sorted(ords)):
            ks = []
            for x_ in (xs, xs2):
                yv = _branch_point(B, x_, lo, hi, rank)
                with mpmath.workdps(MP_DPS):
                    k = B.slope_mp(_mpf(x_), _mpf(yv))
                ks.append(None if k is None or not mpmath.isfinite(k) else float(k))
            k1, k2 = ks
            # a vertical branch steepens like 1/sqrt(dx); a steep smooth one does not
            if k1 is None or k2 is None or (abs(k2) > cfg.vt_threshold and abs(k2) > 3 * abs(k1)):
                out[(side, j)] = None
            else:
                # linear extrapolation of the slope to the point itself
                out[(side, j)] = k2 - (k1 - k2) / 63
    return out


def _group_slopes(slopes: Dict, tau: float, threshold: float) -> Dict:
    """Average slopes that agree within tau; vertical ones stay vertical."""
    keys = list(slopes)
    parent = {k: k for k in keys}

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def vert(v):
        return v is None

    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            va, vb = slopes[a], slopes[b]
            if vert(va) and vert(vb):
                same = True
            elif vert(va) or vert(vb):
                same = False
            else:
                same = abs(va - vb) <= tau * max(1.0, abs(va), abs(vb))
            if same:
                parent[find(a)] = find(b)
    groups: Dict = {}
    for k in keys:
        groups.setdefault(find(k), []).append(k)
    out = {}
    for members in groups.values():
        vals = [slopes[k] for k in members]
        if any(vert(v) for v in vals):
            for k in members:
                out[k] = TangentDir2(None)
        else:
            avg = sum(vals) / len(vals)
            for k in members:
                out[k] = TangentDir2(avg)
    return out


@dataclass
class TopoConfig:
    vt_threshold: float = 100.0
    tangent_tau: float = 1e-3


def collect_events(h: MPoly, box, extra: Dict[str, list] = None) -> Dict[str, list]:
    polys = dict(event_polys(h, box))
    for k, v in (extra or {}).items():
        polys[f"extra:{k}"] = v
    return polys


def _copy_event(ev: Event) -> Event:
    out = Event(iv=ev.iv, sources=set(ev.sources), x=ev.x, mid=ev.mid)
    out.poly = getattr(ev, "poly", None)
    return out


def segment_curve(h: MPoly, box, extra: Dict[str, list] = None, cfg: TopoConfig = None,
                  polys: Dict[str, list] = None, events: List[Event] = None) -> CurveTopology:
    """Split h=0 inside box = (X1, X2, Y1, Y2) into regular curve segments.

    ``extra`` adds univariate polynomials in x whose roots must also be split
    points (used to put two curves on a common partition). A precomputed,
    isolated ``events`` list pins the partition exactly.
    """
    cfg = cfg or TopoConfig()
    box = tuple(Fraction(b) for b in box)
    X1, X2, Y1, Y2 = box
    h = h.with_vars(("x", "y"))
    if events is not None:
        events = [_copy_event(ev) for ev in events]
    else:
        if polys is None:
            polys = collect_events(h, box, extra)
        elif extra:
            polys = dict(polys)
            for k, v in extra.items():
                polys[f"extra:{k}"] = v
        events = isolate_events(polys, X1, X2)
    points: List[PlanePoint] = []
    segments: List[PlaneSegment] = []
    adjacency: Dict[int, List[int]] = {}
    if h.degree("y") <= 0:
        return CurveTopology(h, box, events, [], [], points, segments, adjacency)
    B = Bivariate(h)
    Hb = None
    if any("flex" in ev.sources for ev in events):
        Hb = Bivariate(hessian_homogeneous(h))
    samples = [dyadic_between(events[i].iv.hi, events[i + 1].iv.lo) for i in range(len(events) - 1)]
    counts = [len(fiber_roots(B, q, Y1, Y2)[0]) for q in samples]
    # per event: connection maps
    conn_left: List[Dict[int, int]] = []    # strip i-1 branch -> point id
    conn_right: List[Dict[int, int]] = []
    tangents: Dict[Tuple[int, int, int], TangentDir2] = {}   # (event, side, ordinal)
    for e, ev in enumerate(events):
        lq = samples[e - 1] if e > 0 else None
        rq = samples[e] if e < len(samples) else None
        ln = counts[e - 1] if e > 0 else 0
        rn = counts[e] if e < len(samples) else 0
        if ln == 0:
            lq = None
        if rn == 0:
            rq = None
        boxes, keep, left, right, delta = _analyze_event(B, ev, (Y1, Y2), lq, rq, ln, rn, cfg)
        pid_of = {}
        for k in keep:
            lo, hi, yc, m = boxes[k]
            kind, y, flags = _classify(B, Hb, ev, yc, m, (Y1, Y2))
            p = PlanePoint(x=ev.x, y=y, kind=kind, xiv=ev.iv, ybox=(lo, hi), event=e,
                           id=len(points), xr=ev.mid if ev.iv.is_point() else None, flags=flags)
            points.append(p)
            ev.points.append(p)
            pid_of[k] = p.id
            adjacency[p.id] = []
            inc = {-1: [j for j, kk in left.items() if kk == k], 1: [j for j, kk in right.items() if kk == k]}
            if kind == "singular":
                est = _singular_slopes(B, ev, (lo, hi), inc, delta, cfg)
                grouped = _group_slopes(est, cfg.tangent_tau, cfg.vt_threshold)
                for (side, j), t in grouped.items():
                    tangents[(e, side, j)] = t
            else:
                if kind == "x-critical":
                    t = TangentDir2(None)
                else:
                    with mpmath.workdps(MP_DPS):
                        k_ = B.slope_mp(_mpf(ev.mid), yc)
                    # exact slope of a smooth point: steep is not vertical
                    t = TangentDir2(None if k_ is None or not mpmath.isfinite(k_) else float(k_))
                for side, js in inc.items():
                    for j in js:
                        tangents[(e, side, j)] = t
        conn_left.append({j: pid_of[k] for j, k in left.items()})
        conn_right.append({j: pid_of[k] for j, k in right.items()})
    for i, q in enumerate(samples):
        for j in range(counts[i]):
            a = points[conn_right[i][j]]
            b = points[conn_left[i + 1][j]]
            seg = PlaneSegment(p0=a, p1=b, k0=tangents[(i, 1, j)], k1=tangents[(i + 1, -1, j)],
                               branch_ordinal=j, strip=i, ybox=(Y1, Y2), id=len(segments),
                               n_branches=counts[i])
            if seg.k0.vertical and seg.k1.vertical:
                _relax_double_vt(h, B, seg)
            segments.append(seg)
            adjacency[a.id].append(seg.id)
            adjacency[b.id].append(seg.id)
    return CurveTopology(h, box, events, samples, counts, points, segments, adjacency)


def _relax_double_vt(h: MPoly, B: Bivariate, seg: PlaneSegment):
    """A segment cannot be vertical at both ends; an end that is vertical only by
    the steepness threshold gets its finite slope back."""
    cands = []
    for end, p in (("p0", seg.p0), ("p1", seg.p1)):
        if p.kind == "x-critical":
            continue
        if p.kind == "singular":
            w = seg.p1.x - seg.p0.x
            xe = p.x + (1e-6 * w if end == "p0" else -1e-6 * w)
            k = B.slope(xe, point_on_branch(h, seg, Fraction(xe)))
        else:
            k = B.slope(p.x, p.y)
        if k is not None and np.isfinite(k):
            cands.append((abs(k), end, float(k)))
    if not cands:
        raise TopologyError(f"segment {seg.id} is vertical at both ends")
    _, end, k = min(cands)
    log.info("segment %d: steep end %s kept with slope %.6g", seg.id, end, k)
    if end == "p0":
        seg.k0 = TangentDir2(k)
    else:
        seg.k1 = TangentDir2(k)


# ----------------------------------------------------------------------
# point queries


def critical_points(h: MPoly, box, cfg: TopoConfig = None) -> List[PlanePoint]:
    topo = segment_curve(h, box, cfg=cfg)
    return [p for p in topo.points if p.flags & {"x-critical", "y-critical", "singular"}]


def flexes(h: MPoly, box, cfg: TopoConfig = None) -> List[PlanePoint]:
    topo = segment_curve(h, box, cfg=cfg)
    return [p for p in topo.points if "flex" in p.flags]


def point_on_branch(h: MPoly, seg: PlaneSegment, x0, width=Fraction(1, 2 ** 60)) -> float:
    """y of the segment's branch at x0, picked by ordinal among the roots of h(x0, y)."""
    x0 = Fraction(x0)
    if not (seg.p0.x < x0 < seg.p1.x):
        raise ValueError("x0 must lie strictly inside the segment's x-domain")
    B = _bivariate(h)
    Y1, Y2 = seg.ybox
    ivs, sq = fiber_roots(B, x0, Y1, Y2)
    if seg.branch_ordinal >= len(ivs):
        raise TopologyError(f"x0={float(x0)} not inside the segment's strip")
    iv = rr.refine_interval(sq, ivs[seg.branch_ordinal], width)
    return float(iv.mid)


_BIV_CACHE: Dict[int, Tuple[MPoly, Bivariate]] = {}


def _bivariate(h: MPoly) -> Bivariate:
    hit = _BIV_CACHE.get(id(h))
    if hit is not None and hit[0] is h:
        return hit[1]
    b = Bivariate(h)
    _BIV_CACHE[id(h)] = (h, b)
    if len(_BIV_CACHE) > 64:
        _BIV_CACHE.pop(next(iter(_BIV_CACHE)))
    return b


def tangent_at(h: MPoly, seg: PlaneSegment, endpoint: str = "p0") -> TangentDir2:
    """Tangent stored on the segment; the slope is -h_x/h_y (the implicit derivative)."""
    return seg.k0 if endpoint == "p0" else seg.k1


def regular_tangent(h: MPoly, x: float, y: float, threshold: float = 100.0) -> TangentDir2:
    """Implicit slope -h_x/h_y at a regular point."""
    return TangentDir2.of(_bivariate(h).slope(x, y), threshold)
