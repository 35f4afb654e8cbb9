"""Lifting plane projections of f = g = 0 back to space.

h = sqf Res_z(f, g) is the xy-projection of the curve; hbar is the projection
after the shear (x, y, z) -> (x, y + s z, z).  When s is small against the
fiber gaps of h, every space point over (x0, b) lands at b + s z inside a
private neighbourhood of b, so z = (b' - b) / s.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from . import roots as rr
from .plane import SegApprox, check_disjoint_plane
from .poly import (MPoly, factor_only_in, gcd_poly, resultant, shear_yz, squarefree_part,
                   to_string)
from .topology import (AssumptionError, Bivariate, CurveTopology, _bivariate, _cluster_roots,
                       _mpf, fiber_roots)

log = logging.getLogger(__name__)

FIBER_DPS = 60


class LGPError(RuntimeError):
    """Local generic position does not hold for the chosen shear."""


# ----------------------------------------------------------------------
# assumptions and projections


def projection(f: MPoly, g: MPoly) -> MPoly:
    """Squarefree Res_z(f, g) as a polynomial in (x, y)."""
    r = resultant(f, g, "z")
    if r.is_zero():
        raise AssumptionError("Res_z(f, g) vanishes identically")
    return squarefree_part(r).with_vars(("x", "y"))


def check_assumptions(f: MPoly, g: MPoly) -> dict:
    """Raise AssumptionError unless f, g meet the projection assumptions."""
    f = f.with_vars(("x", "y", "z"))
    g = g.with_vars(("x", "y", "z"))
    cg = gcd_poly(f, g)
    if not cg.is_constant():
        raise AssumptionError(f"gcd nonconstant: {to_string(cg)}")
    lf, lg = f.leading_coeff("z"), g.leading_coeff("z")
    lcg = gcd_poly(lf, lg)
    if not lcg.is_constant():
        bad = factor_only_in(lcg, "x")
        if not bad.is_constant():
            raise AssumptionError(f"leading coefficients in z share the factor {to_string(bad)} in x only")
    raw = resultant(f, g, "z")
    if raw.is_zero():
        raise AssumptionError("Res_z(f, g) vanishes identically")
    bad = factor_only_in(raw.with_vars(("x", "y")), "x")
    if not bad.is_constant():
        raise AssumptionError(f"projection has the factor {to_string(bad)} in x only")
    return {"lc_f": lf, "lc_g": lg, "lc_gcd": lcg, "resultant": raw}


# ----------------------------------------------------------------------
# fibers in z


class ZPoly:
    """f(x0, y0, z) coefficients for numeric (x0, y0)."""

    def __init__(self, p: MPoly):
        p = p.with_vars(("x", "y", "z"))
        self.p = p
        self.deg = max(p.degree("z"), 0)
        self.rows: List[List[Tuple[int, int, Fraction]]] = [[] for _ in range(self.deg + 1)]
        for (i, j, k), c in p.terms.items():
            self.rows[k].append((i, j, c))

    def coeffs(self, x, y) -> list:
        """Low to high, as mpf."""
        return [sum((_mpf(c) * x ** i * y ** j for i, j, c in row), mpmath.mpf(0)) for row in self.rows]

    def scales(self, x, y) -> list:
        ax, ay = abs(x), abs(y)
        return [sum((abs(_mpf(c)) * ax ** i * ay ** j for i, j, c in row), mpmath.mpf(0)) for row in self.rows]


def _live_coeffs(P: ZPoly, x, y):
    """Coefficients with numerically vanishing top terms dropped; None if P(x, y, z) == 0."""
    cs = P.coeffs(x, y)
    sc = P.scales(x, y)
    eps = mpmath.mpf(10) ** (-(mpmath.mp.dps - 15))
    keep = [c if abs(c) > eps * (s + eps) else mpmath.mpf(0) for c, s in zip(cs, sc)]
    while keep and keep[-1] == 0:
        keep.pop()
    return keep or None


def real_z_roots(P: ZPoly, x, y, tol: float = 1e-7) -> Optional[list]:
    """Real roots (near-real included) of P(x, y, z); None when the fiber polynomial vanishes."""
    cs = _live_coeffs(P, x, y)
    if cs is None:
        return None
    if len(cs) < 2:
        return []
    return [c[0] for c in _cluster_roots(cs, mpmath.mpf(tol), mpmath.mpf(10) ** (-12))]


def common_z(F: ZPoly, G: ZPoly, x, y, tol: float = 1e-20) -> list:
    """Distinct real common roots of F(x, y, z) and G(x, y, z).

    Pass x and y as Fractions or high-precision mpf; a rational x is converted
    at the fiber precision.
    """
    with mpmath.workdps(FIBER_DPS):
        x, y = _mpf(x), mpmath.mpf(y)
        out = []
        order = [(F, G), (G, F)]
        for A, Bp in order:
            za = real_z_roots(A, x, y, tol=1e-12)
            if za is None:
                continue
            for z in za:
                cb = Bp.coeffs(x, y)
                sb = Bp.scales(x, y)
                val = sum(c * z ** k for k, c in enumerate(cb))
                scale = sum(c * abs(z) ** k for k, c in enumerate(sb)) + mpmath.mpf(10) ** -40
                if abs(val) <= tol * scale:
                    out.append(z)
            break
        else:
            raise AssumptionError(f"both fiber polynomials vanish over ({float(x):.6g}, {float(y):.6g})")
        return sorted(float(z) for z in out)


def _root_mag(P: ZPoly, x, y) -> Optional[float]:
    with mpmath.workdps(30):
        rts = real_z_roots(P, mpmath.mpf(x), mpmath.mpf(y))
    if rts is None:
        return None
    return max((abs(float(r)) for r in rts), default=0.0)


def _fiber_mp(B: Bivariate, xr: Fraction, ylo, yhi, width=Fraction(1, 2 ** 200)) -> list:
    """Roots of h(xr, y) in (ylo, yhi) as high-precision mpf."""
    ivs, sq = fiber_roots(B, Fraction(xr), Fraction(ylo), Fraction(yhi))
    out = []
    with mpmath.workdps(FIBER_DPS):
        for iv in ivs:
            iv = rr.refine_interval(sq, iv, width)
            out.append(_mpf(iv.mid))
    return out


def _all_real_bound(B: Bivariate, xr: Fraction) -> Fraction:
    c = rr.trim(B.fiber(Fraction(xr)))
    if len(c) < 2:
        return Fraction(1)
    return rr.cauchy_bound(c) + 1


# ----------------------------------------------------------------------
# the shear


@dataclass
class ShearParams:
    s: Fraction
    r: float
    R: float
    alphas: List[Tuple[float, Optional[Fraction]]]      # (value, exact value if rational)
    fibers: Dict[float, List[float]]
    R_cauchy: float = 0.0
    tries: int = 1
    hbar: Optional[MPoly] = field(default=None, repr=False)

    @property
    def bound(self) -> float:
        """r/(2R): admissible shear magnitudes lie strictly below it."""
        return self.r / (2 * self.R) if self.R > 0 else math.inf

    @property
    def radius(self) -> float:
        return self.r / 2


def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """Dyadic with the smallest denominator in (a, b), nearest the middle."""
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise ValueError("empty interval")
    mid = (a + b) / 2
    k = 0
    while True:
        d = 2 ** k
        lo = math.floor(a * d) + 1
        hi = math.ceil(b * d) - 1
        if lo <= hi:
            n = min(max(round(mid * d), lo), hi)
            return Fraction(n, d)
        k += 1


def alpha_sequence(topo: CurveTopology):
    """Critical x-values of h (projected singular/critical points and flexes)
    interleaved with rationals, as (x, exact or None, event or None)."""
    X1, X2 = topo.box[0], topo.box[1]
    crit = [ev for ev in topo.events if ev.sources & {"disc", "flex"}]
    seq = []
    if not crit:
        q = simplest_between(X1, X2)
        return [(float(q), q, None)]
    if X1 < crit[0].iv.lo:
        seq.append((float(X1), X1, None))
    for i, ev in enumerate(crit):
        exact = ev.mid if ev.iv.is_point() else None
        seq.append((ev.x, exact, ev))
        if i + 1 < len(crit):
            q = simplest_between(ev.iv.hi, crit[i + 1].iv.lo)
            seq.append((float(q), q, None))
    if X2 > crit[-1].iv.hi:
        seq.append((float(X2), X2, None))
    return seq


def fiber_radii(f: MPoly, g: MPoly, topo: CurveTopology):
    """alphas, beta fibers, tight R, Cauchy R and the minimal fiber gap."""
    F, G = ZPoly(f), ZPoly(g)
    B = _bivariate(topo.h)
    Y1, Y2 = topo.box[2], topo.box[3]
    alphas, fibers = [], {}
    R = 0.0
    Rc = 0.0
    gaps = []
    for x, exact, ev in alpha_sequence(topo):
        if ev is not None and exact is None:
            ys = sorted(p.y for p in ev.points)
        else:
            ys = [float(b) for b in _fiber_mp(B, exact, Y1, Y2)]
        alphas.append((x, exact))
        fibers[x] = ys
        gaps.extend(b - a for a, b in zip(ys, ys[1:]))
        for y in ys:
            mags = [m for m in (_root_mag(F, x, y), _root_mag(G, x, y)) if m is not None]
            if mags:
                R = max(R, min(mags))
            for P in (F, G):
                with mpmath.workdps(30):
                    cs = _live_coeffs(P, mpmath.mpf(x), mpmath.mpf(y))
                if cs and len(cs) >= 2:
                    Rc = max(Rc, 1 + float(max(abs(c / cs[-1]) for c in cs[:-1])))
                    break
    r = min(gaps) if gaps else R
    return alphas, fibers, R, Rc, r


def default_s(r: float, R: float) -> Fraction:
    """Largest power of two not above r/(4R)."""
    if R <= 0:
        return Fraction(1)
    v = r / (4 * R)
    return Fraction(2) ** math.floor(math.log2(v))


def sheared(p: MPoly, s) -> MPoly:
    """Equation of the image of p = 0 under (x, y, z) -> (x, y + s z, z), i.e. p(x, y - s z, z)."""
    return shear_yz(p, -Fraction(s))


def check_z_generic(f: MPoly, g: MPoly, s, xs: Sequence[Fraction] = None, box=None,
                    hbar: MPoly = None) -> bool:
    """At most one space point over every sampled non-y-critical point of hbar = 0.

    ``xs`` are rational sample abscissae; ``box`` = (X1, X2, Y1, Y2, Z1, Z2)
    limits the hbar fibers to the sheared y-range.
    """
    s = Fraction(s)
    fs, gs = sheared(f, s), sheared(g, s)
    hbar = hbar if hbar is not None else projection(fs, gs)
    Fs, Gs = ZPoly(fs), ZPoly(gs)
    B = _bivariate(hbar)
    if xs is None:
        X1, X2 = (Fraction(box[0]), Fraction(box[1])) if box else (Fraction(-1), Fraction(1))
        xs = [X1 + (X2 - X1) * Fraction(2 * i + 1, 18) for i in range(9)]
    for x0 in xs:
        x0 = Fraction(x0)
        if box is not None:
            lo = Fraction(box[2]) + s * min(Fraction(box[4]), Fraction(box[5])) - 1
            hi = Fraction(box[3]) + s * max(Fraction(box[4]), Fraction(box[5])) + 1
        else:
            hi = _all_real_bound(B, x0)
            lo = -hi
        for yb in _fiber_mp(B, x0, lo, hi):
            with mpmath.workdps(FIBER_DPS):
                gx, gy = B.grad_mp(_mpf(x0), yb)
                sx, sy = B.grad_scale(_mpf(x0), yb)
                if abs(gy) <= mpmath.mpf(10) ** -30 * (sy + 1):
                    continue        # y-critical
            if len(common_z(Fs, Gs, Fraction(x0), yb)) > 1:
                log.info("z-generic check failed over x=%g y=%g", float(x0), float(yb))
                return False
    return True


def compute_s(f: MPoly, g: MPoly, topo: CurveTopology, box3=None, s_override=None,
              max_tries: int = 10) -> ShearParams:
    """Shear parameter from the fiber gaps and z-root magnitudes of h's alpha fibers.

    ``topo`` is the topology of h over the xy part of the box. An override is
    validated against r/(2R) and the z-generic check.
    """
    f = f.with_vars(("x", "y", "z"))
    g = g.with_vars(("x", "y", "z"))
    alphas, fibers, R, Rc, r = fiber_radii(f, g, topo)
    if R == 0 and not any(fibers.values()):
        s = Fraction(s_override) if s_override is not None else Fraction(1)
        return ShearParams(s, math.inf, 0.0, alphas, fibers, Rc, 0, None)
    box = box3 if box3 is not None else tuple(topo.box) + (Fraction(-10), Fraction(10))
    xs = [e for _, e in alphas if e is not None]
    # midpoints between alphas sample the strips as well
    vals = [Fraction(a) for a, _ in alphas]
    for a, b in zip(vals, vals[1:]):
        xs.append(simplest_between(a, b))
    xs = sorted(set(xs))
    if s_override is not None:
        s = Fraction(s_override)
        if not (0 < s and (R == 0 or float(s) < r / (2 * R))):
            raise LGPError(f"s={s} violates 0 < s < r/(2R) = {r / (2 * R):.10g}")
        hbar = projection(sheared(f, s), sheared(g, s))
        if not check_z_generic(f, g, s, xs, box, hbar):
            raise LGPError(f"s={s} fails the z-generic check")
        return ShearParams(s, r, R, alphas, fibers, Rc, 1, hbar)
    s = default_s(r, R)
    for t in range(1, max_tries + 1):
        hbar = projection(sheared(f, s), sheared(g, s))
        if check_z_generic(f, g, s, xs, box, hbar):
            return ShearParams(s, r, R, alphas, fibers, Rc, t, hbar)
        log.info("s=%s rejected, retrying with s/3", s)
        s = s / 3
    raise LGPError("no admissible shear found")


# ----------------------------------------------------------------------
# fibers and correspondence


def solve_fiber(f: MPoly, g: MPoly, x0, sp: ShearParams, h: MPoly, hbar: MPoly,
                ybox=None) -> List[Tuple[float, float]]:
    """(beta, z) space points over x0 from roots beta of h(x0, .) and beta' of hbar(x0, .).

    Each beta' is matched to the unique beta within r/2, z = (beta' - beta)/s.
    Where that rule is ambiguous (fibers far from the alphas) the common
    z-roots of f and g over each beta settle the matching instead.
    """
    x0 = Fraction(x0)
    Bh, Bb = _bivariate(h), _bivariate(hbar)
    bh = _all_real_bound(Bh, x0)
    bb = _all_real_bound(Bb, x0)
    betas = _fiber_mp(Bh, x0, -bh, bh)
    primes = [float(b) for b in _fiber_mp(Bb, x0, -bb, bb)]
    F = ZPoly(f.with_vars(("x", "y", "z")))
    G = ZPoly(g.with_vars(("x", "y", "z")))
    try:
        m = _lgp_matches(betas, primes, sp, F, G, x0)
    except LGPError:
        m = _direct_matches(betas, primes, float(sp.s), F, G, x0)
    out = [(float(betas[i]), z) for i, js in m.items() for _, z in js]
    if ybox is not None:
        out = [(y, z) for y, z in out if float(ybox[0]) <= y <= float(ybox[1])]
    return sorted(out)


def fiber_points(f: MPoly, g: MPoly, x0, h: MPoly, ybox) -> List[Tuple[float, List[float]]]:
    """Direct fiber solve: roots beta of h(x0, .) in ybox with their real common z-roots."""
    F, G = ZPoly(f), ZPoly(g)
    B = _bivariate(h)
    out = []
    for b in _fiber_mp(B, Fraction(x0), ybox[0], ybox[1]):
        out.append((float(b), common_z(F, G, Fraction(x0), b)))
    return out


@dataclass
class Correspondence:
    s: Fraction
    r: float
    pairs: Dict[int, List[int]]                 # h segment id -> hbar segment ids, by z
    z_at_sample: Dict[Tuple[int, int], float]
    unresolved: List[int] = field(default_factory=list)
    dropped: List[int] = field(default_factory=list)       # h segments without in-box space points
    unmatched_hbar: List[int] = field(default_factory=list)
    methods: Dict[int, str] = field(default_factory=dict)   # strip -> "lgp" or "fiber"


def _strip_segments(topo: CurveTopology) -> Dict[int, list]:
    out: Dict[int, list] = {}
    for sg in topo.segments:
        out.setdefault(sg.strip, []).append(sg)
    for v in out.values():
        v.sort(key=lambda sg: sg.branch_ordinal)
    return out


def correspond_segments(topo_h: CurveTopology, topo_hb: CurveTopology, sp: ShearParams,
                        f: MPoly, g: MPoly, zbox=None) -> Correspondence:
    """Match h segments with hbar segments strip by strip.

    At each strip sample the r/2 neighbourhood rule is applied and every match
    is confirmed on f and g; a failing strip is settled by a direct fiber solve.
    """
    if topo_h.samples != topo_hb.samples:
        raise LGPError("topologies are not on a common partition")
    f = f.with_vars(("x", "y", "z"))
    g = g.with_vars(("x", "y", "z"))
    F, G = ZPoly(f), ZPoly(g)
    s = float(sp.s)
    Z1, Z2 = (float(zbox[0]), float(zbox[1])) if zbox is not None else (-math.inf, math.inf)
    hs, hbs = _strip_segments(topo_h), _strip_segments(topo_hb)
    cor = Correspondence(sp.s, sp.r, {}, {})
    Y1, Y2 = topo_h.box[2], topo_h.box[3]
    Yb1, Yb2 = topo_hb.box[2], topo_hb.box[3]
    Bh, Bb = _bivariate(topo_h.h), _bivariate(topo_hb.h)
    for k, segs in hs.items():
        x0 = topo_h.samples[k]
        others = hbs.get(k, [])
        betas = _fiber_mp(Bh, x0, Y1, Y2)
        primes = [float(b) for b in _fiber_mp(Bb, x0, Yb1, Yb2)]
        if len(betas) != len(segs) or len(primes) != len(others):
            raise LGPError(f"fiber count mismatch in strip {k}")
        matches = None
        try:
            matches = _lgp_matches(betas, primes, sp, F, G, x0)
            cor.methods[k] = "lgp"
        except LGPError as exc:
            log.info("strip %d: %s; solving the fiber directly", k, exc)
        if matches is None:
            matches = _direct_matches(betas, primes, s, F, G, x0)
            cor.methods[k] = "fiber"
        used = set()
        for i, sg in enumerate(segs):
            row = sorted((z, j) for j, z in matches.get(i, []) if Z1 <= z <= Z2)
            if not row:
                cor.dropped.append(sg.id)
                continue
            cor.pairs[sg.id] = [others[j].id for _, j in row]
            for z, j in row:
                if j in used:
                    raise LGPError(f"hbar segment {others[j].id} matched twice")
                used.add(j)
                cor.z_at_sample[(sg.id, others[j].id)] = z
        for j, ob in enumerate(others):
            if j not in used:
                cor.unmatched_hbar.append(ob.id)
    for k, others in hbs.items():
        if k not in hs:
            cor.unmatched_hbar.extend(ob.id for ob in others)
    return cor


def _residual_ok(F: ZPoly, G: ZPoly, x, y, z, tol=1e-8) -> bool:
    with mpmath.workdps(30):
        x, y, z = mpmath.mpf(x), mpmath.mpf(y), mpmath.mpf(z)
        for P in (F, G):
            cs, sc = P.coeffs(x, y), P.scales(x, y)
            v = sum(c * z ** k for k, c in enumerate(cs))
            w = sum(c * abs(z) ** k for k, c in enumerate(sc)) + mpmath.mpf(10) ** -30
            if abs(v) > tol * w:
                return False
    return True


def _lgp_matches(betas, primes, sp, F, G, x0):
    rad, s = sp.radius, float(sp.s)
    out: Dict[int, List[Tuple[int, float]]] = {}
    bf = [float(b) for b in betas]
    for j, bp in enumerate(primes):
        m = [i for i, b in enumerate(bf) if abs(bp - b) < rad]
        if len(m) != 1:
            raise LGPError(f"beta'={bp:.10g} has {len(m)} neighbours within r/2")
        i = m[0]
        z = (bp - bf[i]) / s
        if not _residual_ok(F, G, float(x0), betas[i], z, tol=1e-6):
            raise LGPError(f"match beta'={bp:.10g} is not a space point")
        out.setdefault(i, []).append((j, z))
    return out


def _direct_matches(betas, primes, s, F, G, x0):
    out: Dict[int, List[Tuple[int, float]]] = {}
    taken = {}
    for i, b in enumerate(betas):
        for z in common_z(F, G, Fraction(x0), b):
            target = float(b) + s * z
            if not primes:
                continue
            j = int(np.argmin([abs(target - p) for p in primes]))
            if abs(primes[j] - target) > 1e-6 * (1 + abs(target)):
                # the space point leaves the sheared box; nothing to match
                continue
            if j in taken:
                raise LGPError(f"two space points over x={float(x0):.6g} share an hbar root")
            taken[j] = i
            out.setdefault(i, []).append((j, z))
    return out


# ----------------------------------------------------------------------
# recovery and error


@dataclass
class ErrorBudget:
    eps: float
    s: Fraction
    eps_nonvt: float
    eps_vt: float

    @classmethod
    def make(cls, eps: float, s, factor: float = 0.98) -> "ErrorBudget":
        s = Fraction(s)
        sf = float(s)
        base = factor * sf / math.sqrt(sf * sf + 4) * eps
        return cls(eps, s, base, base / 2)

    def verify(self) -> bool:
        """eps_nonvt < s/sqrt(s^2+4) eps and eps_vt < s/(2 sqrt(s^2+4)) eps, as exact rationals."""
        e, s = Fraction(self.eps), self.s
        a, b = Fraction(self.eps_nonvt), Fraction(self.eps_vt)
        return (a > 0 and b > 0 and a * a * (s * s + 4) < s * s * e * e
                and 4 * b * b * (s * s + 4) < s * s * e * e)


def space_error_bound(eps1: float, eps2: float, s) -> Tuple[float, float]:
    """(per-coordinate bound, Hausdorff bound) of a graph piece from plane errors."""
    s = float(s)
    per = max(eps1, (eps1 + eps2) / s)
    haus = math.sqrt(s * s * eps1 * eps1 + (eps1 + eps2) ** 2) / s
    return per, haus


@dataclass(frozen=True)
class GraphTriple:
    """(x, p(x), (q(x) - p(x))/s)."""
    p: SegApprox
    q: SegApprox
    s: float
    kind: str = "graph"

    @property
    def is_rational(self) -> bool:
        return self.p.is_rational and self.q.is_rational

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        y1 = np.asarray(self.p(x), dtype=float)
        y2 = np.asarray(self.q(x), dtype=float)
        return np.stack([x, y1, (y2 - y1) / self.s], axis=-1)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        d1 = np.asarray(self.p.deriv(x), dtype=float)
        d2 = np.asarray(self.q.deriv(x), dtype=float)
        return np.stack([np.ones_like(x), d1, (d2 - d1) / self.s], axis=-1)


@dataclass
class ErrorCert:
    eps1: float
    eps2: float
    per_coord: float
    hausdorff: float
    reparam: float = 0.0

    @property
    def total(self) -> float:
        return self.hausdorff + self.reparam


@dataclass
class SpacePiece:
    form: object                         # GraphTriple or reparam.ReparamTriple
    x_domain: Tuple[float, float]
    cert: ErrorCert
    graph: GraphTriple
    ends: Tuple[object, object] = (None, None)      # vertex keys at x_domain[0], x_domain[1]
    h_seg: Optional[int] = None
    hbar_seg: Optional[int] = None
    id: int = -1

    @property
    def kind(self) -> str:
        return self.form.kind

    @property
    def is_rational(self) -> bool:
        return self.form.is_rational


def recover_space(pair: Tuple[SegApprox, SegApprox], s) -> SpacePiece:
    p, q = pair
    if p.x_domain != q.x_domain:
        raise ValueError(f"domain mismatch {p.x_domain} vs {q.x_domain}")
    gt = GraphTriple(p, q, float(s))
    per, haus = space_error_bound(p.error_bound, q.error_bound, s)
    cert = ErrorCert(p.error_bound, q.error_bound, per, haus)
    return SpacePiece(gt, p.x_domain, cert, gt)


def check_disjoint_space(a: SpacePiece, b: SpacePiece, detail: dict = None) -> bool:
    """Pieces over one plane piece of h are disjoint iff their hbar pieces are."""
    from .reparam import ReparamTriple, check_disjoint_triples
    if isinstance(a.form, ReparamTriple) and isinstance(b.form, ReparamTriple):
        if not check_disjoint_triples(a.form, b.form):
            return False
    lo = max(a.x_domain[0], b.x_domain[0])
    hi = min(a.x_domain[1], b.x_domain[1])
    if not lo < hi:
        return True
    shared = [x for x in (lo, hi)
              if np.allclose(a.graph(x), b.graph(x), rtol=0, atol=1e-9)]
    return check_disjoint_plane(a.graph.q, b.graph.q, domain=(lo, hi), shared=shared, detail=detail)
