"""Rational reparametrization of space pieces that start at a vertical tangent.

Over a VT interval the graph form (x, p(x), (q(x) - p(x))/s) uses square
roots.  It is replaced by

    P(t) = ((a1 t^2 + b1 t + c1)/(d1 t + 1), u(t), (a2 t^2 + b2 t + c2)/(d2 t + 1) + c3/(d3 t + 1))

with u(t) linear in t (u = y, or u = z with y and z swapped), interpolating
both ends and matching the tangent directions there.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import roots as rr
from .plane import dyadic

log = logging.getLogger(__name__)

DEFAULT_GRID = (Fraction(-1, 2), Fraction(-1, 4), Fraction(1, 4), Fraction(1, 2),
                Fraction(1), Fraction(2), Fraction(4))


class ReparamError(ValueError):
    pass


@dataclass(frozen=True)
class TangentDir3:
    form: str                       # "General", "YAxis" or "ZAxis"
    vec: Tuple[float, float, float]

    @classmethod
    def general(cls, yp: float, zp: float) -> "TangentDir3":
        return cls("General", (1.0, float(yp), float(zp)))

    @classmethod
    def yaxis(cls, p: float) -> "TangentDir3":
        return cls("YAxis", (0.0, 1.0, float(p)))

    @classmethod
    def zaxis(cls, sign: float = 1.0) -> "TangentDir3":
        return cls("ZAxis", (0.0, 0.0, 1.0 if sign >= 0 else -1.0))

    def unit(self) -> np.ndarray:
        v = np.asarray(self.vec, dtype=float)
        return v / np.linalg.norm(v)


def classify_vt_tangent(p_slope: float, q_slope: float, s, threshold: float = 100.0,
                        snap: float = 1e-3) -> TangentDir3:
    """Space tangent (1, p', (q' - p')/s) rescaled when p' or the z-part overflows."""
    s = float(s)
    p, q = float(p_slope), float(q_slope)
    if abs(p) <= threshold:
        w = (q - p) / s
        if abs(w) > threshold:
            return TangentDir3.zaxis(np.sign(w))
        return TangentDir3.general(p, 0.0 if abs(w) < snap else w)
    w = (q - p) / (s * p)
    if abs(w) > threshold:
        return TangentDir3.zaxis(np.sign(w))
    return TangentDir3.yaxis(0.0 if abs(w) < snap else w)


def merge_line_directions(dirs: Sequence[TangentDir3], threshold: float = 100.0,
                          snap: float = 1e-3) -> TangentDir3:
    """Average of tangent lines meeting at one point, reclassified."""
    ref = None
    acc = np.zeros(3)
    for d in dirs:
        u = d.unit()
        if ref is None:
            ref = u
        acc += u if float(np.dot(u, ref)) >= 0 else -u
    acc /= np.linalg.norm(acc)
    x, y, z = acc
    if abs(x) > 0 and abs(y / x) <= threshold and abs(z / x) <= threshold:
        w = z / x
        return TangentDir3.general(y / x, 0.0 if abs(w) < snap else w)
    if abs(y) > 0 and abs(z / y) <= threshold:
        w = z / y
        return TangentDir3.yaxis(0.0 if abs(w) < snap else w)
    return TangentDir3.zaxis(np.sign(z))


@dataclass(frozen=True)
class ReparamTriple:
    """Components in t in [0, 1]; ``mode`` says which coordinate is the linear driver u."""
    mode: str                     # "YAxis": (x, u, w); "ZAxis": (x, w, u)
    a1: float
    b1: float
    c1: float
    d1: float
    a2: float
    b2: float
    c2: float
    d2: float
    c3: float
    d3: float
    u0: float
    u1: float
    kind: str = "reparam"

    @property
    def is_rational(self) -> bool:
        return True

    def _xw(self, t):
        t = np.asarray(t, dtype=float)
        x = (self.a1 * t * t + self.b1 * t + self.c1) / (self.d1 * t + 1)
        w = (self.a2 * t * t + self.b2 * t + self.c2) / (self.d2 * t + 1) + self.c3 / (self.d3 * t + 1)
        u = self.u0 + (self.u1 - self.u0) * t
        return x, u, w

    def __call__(self, t):
        x, u, w = self._xw(t)
        if self.mode == "YAxis":
            return np.stack([x, u, w], axis=-1)
        return np.stack([x, w, u], axis=-1)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        D1 = self.d1 * t + 1
        dx = ((2 * self.a1 * t + self.b1) * D1 - self.d1 * (self.a1 * t * t + self.b1 * t + self.c1)) / D1 ** 2
        D2, D3 = self.d2 * t + 1, self.d3 * t + 1
        dw = ((2 * self.a2 * t + self.b2) * D2 - self.d2 * (self.a2 * t * t + self.b2 * t + self.c2)) / D2 ** 2 \
            - self.c3 * self.d3 / D3 ** 2
        du = np.full_like(t, self.u1 - self.u0)
        if self.mode == "YAxis":
            return np.stack([dx, du, dw], axis=-1)
        return np.stack([dx, dw, du], axis=-1)

    def driver_form(self) -> dict:
        """Components rewritten in the driving coordinate u itself:
        x = m u + k + n/(e u + 1), matching the printed style."""
        L = self.u1 - self.u0
        out = {"driver": "y" if self.mode == "YAxis" else "z"}
        out["x"] = _lin_plus_pole(self.a1, self.b1, self.c1, self.d1, self.u0, L)
        return out


def _lin_plus_pole(a, b, c, d, u0, L):
    """(a t^2 + b t + c)/(d t + 1) with t = (u - u0)/L as m u + k + n/(e u + 1)."""
    if abs(d) < 1e-300:
        # polynomial: a t^2 + b t + c
        return {"poly_t": (a, b, c)}
    m_t = a / d
    k_t = b / d - a / d ** 2
    n = c - k_t
    # d t + 1 = (d/L) u + (1 - d u0/L)
    A, Bc = d / L, 1 - d * u0 / L
    m = m_t / L
    k = k_t - m_t * u0 / L
    if abs(Bc) < 1e-300:
        return {"m": m, "k": k, "n_over_u": n / A}
    return {"m": m, "k": k, "n": n / Bc, "e": A / Bc}


def _check_free(d2: float, d3: float):
    if d3 == 0 or d2 == d3:
        raise ReparamError("invalid free parameters: need d3 != 0 and d2 != d3")
    if d2 <= -1 or d3 <= -1:
        raise ReparamError("invalid free parameters: pole in [0, 1]")


def reparametrize_vt_segment(p0, p1, t0: TangentDir3, t1: TangentDir3, d2: float = 1.0,
                             d3: float = 2.0) -> ReparamTriple:
    """Rational triple from p0 (VT end, t = 0) to p1 (t = 1), tangent to t0 and t1."""
    d2, d3 = float(d2), float(d3)
    _check_free(d2, d3)
    if t0.form == "YAxis":
        mode, drv, oth = "YAxis", 1, 2
    elif t0.form == "ZAxis":
        mode, drv, oth = "ZAxis", 2, 1
    else:
        raise ReparamError("start tangent must be vertical in the xy-projection")
    P0 = [float(v) for v in p0]
    P1 = [float(v) for v in p1]
    u0, u1 = P0[drv], P1[drv]
    L = u1 - u0
    if L == 0:
        raise ReparamError("driving coordinate does not change along the segment")
    v1 = np.asarray(t1.vec, dtype=float)
    if abs(v1[drv]) < 1e-14 * np.linalg.norm(v1):
        raise ReparamError("end tangent has no component along the driving coordinate")
    dP1 = v1 * (L / v1[drv])
    v0 = np.asarray(t0.vec, dtype=float)
    dP0 = v0 * (L / v0[drv])
    # x part: value x0 and slope 0 at t=0, value x1 and slope x1' at t=1
    X0, X1, X1p = P0[0], P1[0], dP1[0]
    if not (X0 - X1) * (X0 - X1 + X1p) < 0:
        raise ReparamError("invalid free parameters: (x0-x1)(x0-x1+x1') < 0 fails")
    den = -X1 + X1p + X0
    a1 = (X0 * X0 - 2 * X0 * X1 + X1 * X1) / den
    b1 = -X0 * (2 * X0 - 2 * X1 + X1p) / den
    c1 = X0
    d1 = -(2 * X0 - 2 * X1 + X1p) / den
    if d1 <= -1:
        raise ReparamError("invalid free parameters: x denominator has a pole in [0, 1]")
    W0, W1, W0p, W1p = P0[oth], P1[oth], dP0[oth], dP1[oth]
    e2, e3 = 1 + d2, 1 + d3
    M = np.array([
        [0.0, 0.0, 1.0, 1.0],
        [1 / e2, 1 / e2, 1 / e2, 1 / e3],
        [0.0, 1.0, -d2, -d3],
        [(2 + d2) / e2 ** 2, 1 / e2 ** 2, -d2 / e2 ** 2, -d3 / e3 ** 2],
    ])
    rhs = np.array([W0, W1, W0p, W1p])
    try:
        a2, b2, c2, c3 = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise ReparamError(f"invalid free parameters: {exc}") from None
    return ReparamTriple(mode, float(a1), float(b1), float(c1), float(d1), float(a2), float(b2), float(c2), d2, float(c3), d3, u0, u1)


def reparam_error(graph, x_domain: Tuple[float, float], triple: ReparamTriple, n: int = 19,
                  detail: dict = None) -> float:
    """Sampled distance between the graph piece and the triple, both directions.

    For each graph sample the parameter comes from the driving coordinate
    (linear in t) or from x(t) = x0 (quadratic), whichever lands closer.
    """
    xa, xb = float(x_domain[0]), float(x_domain[1])
    drv = 1 if triple.mode == "YAxis" else 2
    L = triple.u1 - triple.u0
    skipped = 0

    def cand_ts(x0, target):
        ts = [(target[drv] - triple.u0) / L]
        A = triple.a1
        Bq = triple.b1 - x0 * triple.d1
        Cq = triple.c1 - x0
        if abs(A) > 1e-300:
            disc = Bq * Bq - 4 * A * Cq
            if disc >= 0:
                r = math.sqrt(disc)
                ts += [(-Bq + r) / (2 * A), (-Bq - r) / (2 * A)]
        elif abs(Bq) > 1e-300:
            ts.append(-Cq / Bq)
        return [t for t in ts if -1e-12 <= t <= 1 + 1e-12]

    def d_graph(x0):
        nonlocal skipped
        target = graph(x0)
        ts = cand_ts(x0, target)
        if not ts:
            skipped += 1
            return 0.0
        return min(float(np.linalg.norm(triple(min(max(t, 0.0), 1.0)) - target)) for t in ts)

    def g_drv(x):
        return float(graph(x)[drv])

    def d_triple(t):
        P = triple(t)
        best = []
        xt = float(P[0])
        if xa <= xt <= xb:
            best.append(float(np.linalg.norm(graph(xt) - P)))
        fa, fb = g_drv(xa) - P[drv], g_drv(xb) - P[drv]
        if fa * fb <= 0 and fa != fb:
            xs = brentq(lambda x: g_drv(x) - P[drv], xa, xb, xtol=1e-15, rtol=1e-15)
            best.append(float(np.linalg.norm(graph(xs) - P)))
        return min(best) if best else 0.0

    xs = [xa + (xb - xa) * i / (n + 1) for i in range(1, n + 1)]
    ts = [i / (n + 1) for i in range(1, n + 1)]
    e1 = [d_graph(x) for x in xs]
    e2 = [d_triple(t) for t in ts]
    best = max(e1 + e2 + [0.0])
    # refine around the largest samples
    for seq, grid, fun in ((e1, xs, d_graph), (e2, ts, d_triple)):
        if not seq:
            continue
        i = int(np.argmax(seq))
        lo = grid[i - 1] if i > 0 else (xa if fun is d_graph else 0.0)
        hi = grid[i + 1] if i + 1 < len(grid) else (xb if fun is d_graph else 1.0)
        r = minimize_scalar(lambda v: -fun(v), bounds=(lo, hi), method="bounded",
                            options={"xatol": 1e-9 * max(hi - lo, 1e-300)})
        best = max(best, -float(r.fun))
    if skipped > 0.1 * n:
        log.warning("reparam_error: %d of %d samples had no parameter in [0, 1]", skipped, n)
    if detail is not None:
        detail["skipped"] = skipped
    return best * (1 + 1e-6) + 1e-14 if best > 0 else 0.0


def select_free_params(evaluate: Callable[[Fraction, Fraction], float],
                       grid: Iterable = DEFAULT_GRID):
    """(d2, d3, error) minimizing evaluate over valid grid pairs, first wins ties."""
    grid = list(grid)
    best = None
    for d2 in grid:
        for d3 in grid:
            if d3 == 0 or d2 == d3 or d2 <= -1 or d3 <= -1:
                continue
            try:
                e = evaluate(d2, d3)
            except ReparamError:
                continue
            if not math.isfinite(e):
                continue
            if best is None or e < best[2]:
                best = (d2, d3, e)
    if best is None:
        raise ReparamError("no candidate free parameters satisfy the constraints")
    return best


# ----------------------------------------------------------------------
# disjointness of two triples over the same driving range


def _num_den(tr: ReparamTriple, comp: str):
    """Numerator and denominator (exact, low->high in t) of a component."""
    q = lambda v: dyadic(v)
    if comp == "x":
        return [q(tr.c1), q(tr.b1), q(tr.a1)], [Fraction(1), q(tr.d1)]
    N2 = [q(tr.c2), q(tr.b2), q(tr.a2)]
    D2 = [Fraction(1), q(tr.d2)]
    D3 = [Fraction(1), q(tr.d3)]
    num = rr.trim(_padd(rr.mul(N2, D3), [q(tr.c3) * c for c in D2]))
    return num, rr.mul(D2, D3)


def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _diff_roots(A: ReparamTriple, B: ReparamTriple, comp: str):
    na, da = _num_den(A, comp)
    nb, db = _num_den(B, comp)
    P = rr.trim(_padd(rr.mul(na, db), [-c for c in rr.mul(nb, da)]))
    if not P:
        return None
    if len(P) < 2:
        return []
    rs = rr.isolate_roots(P, Fraction(0), Fraction(1))
    out = []
    for iv in rs.roots:
        if iv.is_point() and iv.lo in (0, 1):
            continue
        out.append(float(rr.refine_interval(rs.poly, iv, Fraction(1, 2 ** 60)).mid))
    return out


def check_disjoint_triples(A: ReparamTriple, B: ReparamTriple, tol: float = 1e-9) -> bool:
    """True iff the triples share no point for t in the open interval (0, 1)."""
    same_drive = A.mode == B.mode and abs(A.u0 - B.u0) <= tol and abs(A.u1 - B.u1) <= tol
    if not same_drive:
        ts = np.linspace(0, 1, 401)[1:-1]
        PA, PB = A(ts), B(ts)
        d = np.min(np.linalg.norm(PA[:, None, :] - PB[None, :, :], axis=-1))
        return bool(d > tol)
    rx = _diff_roots(A, B, "x")
    rw = _diff_roots(A, B, "w")
    if rx is None and rw is None:
        return False
    if rx == [] or rw == []:
        return True
    if rx is None:
        return not rw
    if rw is None:
        return not rx
    for t in rx:
        if np.linalg.norm(A(t) - B(t)) <= 1e-7:
            return False
    return True
