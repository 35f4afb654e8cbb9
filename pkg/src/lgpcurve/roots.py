"""Univariate real root isolation, refinement and counting.

Univariate polynomials are dense coefficient lists, lowest degree first, with
int or Fraction entries. Isolation uses Descartes' rule of signs with
bisection on the squarefree part; counting on an interval uses Sturm
sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

Coeffs = List[int]


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval with lo > hi")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, v) -> bool:
        return self.lo <= v <= self.hi

    def __float__(self):
        return float(self.mid)


@dataclass(frozen=True)
class RootSet:
    poly: tuple          # squarefree integer coefficients the intervals refer to
    roots: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]

    def approx(self) -> List[float]:
        return [float(r.mid) for r in self.roots]


# ----------------------------------------------------------------------
# dense univariate helpers

def trim(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def to_int_primitive(p: Sequence) -> Coeffs:
    """Scale to coprime integers with positive leading coefficient."""
    p = trim(p)
    if not p:
        return []
    den = 1
    for c in p:
        if isinstance(c, Fraction):
            den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if ints[-1] < 0:
        g = -g
    return [c // g for c in ints]


def as_coeffs(p) -> list:
    if hasattr(p, "univariate_coeffs"):
        return p.univariate_coeffs()
    return list(p)


def degree(p: Sequence) -> int:
    return len(trim(p)) - 1


def derivative(p: Sequence) -> list:
    return [c * i for i, c in enumerate(p)][1:]


def horner(p: Sequence, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign_at(p: Coeffs, r: Fraction) -> int:
    """Sign of integer polynomial p at rational r, computed in integers."""
    r = Fraction(r)
    a, b = r.numerator, r.denominator
    n = len(p) - 1
    if n < 0:
        return 0
    acc = p[n]
    bp = 1
    for i in range(n - 1, -1, -1):
        bp *= b
        acc = acc * a + p[i] * bp
    return (acc > 0) - (acc < 0)


def mul(p: Sequence, q: Sequence) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def divmod_poly(p: Sequence, q: Sequence) -> Tuple[list, list]:
    """Division over Q."""
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError
    r = [Fraction(c) for c in p]
    dq = len(q) - 1
    lq = Fraction(q[-1])
    if len(r) < len(q):
        return [], r
    quo = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1, dq - 1, -1):
        c = r[k] / lq
        if c:
            quo[k - dq] = c
            for j in range(dq + 1):
                r[k - dq + j] -= c * q[j]
    return trim(quo), trim(r[:dq])


def _int_exact_div(p: Coeffs, q: Coeffs) -> Optional[Coeffs]:
    """p/q over Z if q divides p exactly, else None."""
    p = list(p)
    dq = len(q) - 1
    if len(p) - 1 < dq:
        return None if any(p) else []
    lq = q[-1]
    quo = [0] * (len(p) - dq)
    for k in range(len(p) - 1, dq - 1, -1):
        c, rem = divmod(p[k], lq)
        if rem:
            return None
        if c:
            quo[k - dq] = c
            for j in range(dq + 1):
                p[k - dq + j] -= c * q[j]
    if any(p[:dq]):
        return None
    return quo


def _maxnorm(p: Coeffs) -> int:
    return max(abs(c) for c in p)


def _heugcd(f: Coeffs, g: Coeffs) -> Optional[Coeffs]:
    xi = 2 * min(_maxnorm(f), _maxnorm(g)) + 29
    for _ in range(8):
        a = horner(f, xi)
        b = horner(g, xi)
        gam = gcd(a, b)
        # balanced xi-adic expansion
        G = []
        while gam:
            r = gam % xi
            if r > xi // 2:
                r -= xi
            G.append(r)
            gam = (gam - r) // xi
        G = to_int_primitive(G)
        if G and _int_exact_div(f, G) is not None and _int_exact_div(g, G) is not None:
            return G
        xi = xi * 73794 // 27011
    return None


def _euclid_gcd(f: Coeffs, g: Coeffs) -> Coeffs:
    a, b = to_int_primitive(f), to_int_primitive(g)
    if len(a) < len(b):
        a, b = b, a
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, to_int_primitive(r)
    return a


def upoly_gcd(f: Sequence, g: Sequence) -> Coeffs:
    f, g = to_int_primitive(f), to_int_primitive(g)
    if not f:
        return g
    if not g:
        return f
    if len(f) == 1 or len(g) == 1:
        return [1]
    h = _heugcd(f, g)
    if h is None:
        h = _euclid_gcd(f, g)
    return h


def upoly_sqf(p: Sequence) -> Coeffs:
    p = to_int_primitive(p)
    if len(p) <= 2:
        return p
    g = upoly_gcd(p, derivative(p))
    if len(g) == 1:
        return p
    q = _int_exact_div(p, g)
    if q is None:
        q, _ = divmod_poly(p, g)
    return to_int_primitive(q)


# ----------------------------------------------------------------------
# Descartes isolation

def _taylor_shift1(p: Coeffs) -> Coeffs:
    """Coefficients of p(t + 1)."""
    a = list(p)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += a[j + 1]
    return a


def _sign_variations(seq) -> int:
    v = 0
    last = 0
    for c in seq:
        if c:
            s = 1 if c > 0 else -1
            if last and s != last:
                v += 1
            last = s
    return v


def _descartes01(q: Coeffs) -> int:
    """Sign variations bounding the roots of q in (0, 1)."""
    return _sign_variations(_taylor_shift1(q[::-1]))


def _compose_affine(p: Coeffs, lo: Fraction, w: Fraction) -> Coeffs:
    """Integer multiple of p(lo + w*t)."""
    a, b = lo.numerator, lo.denominator
    c, d = w.numerator, w.denominator
    n = len(p) - 1
    # lo + w t = (a d + c b t) / (b d)
    lin0, lin1 = a * d, c * b
    den = b * d
    q = [p[n]]
    dp = 1
    for k in range(n - 1, -1, -1):
        dp *= den
        # q = q * (lin0 + lin1 t) + p_k * den^(n-k)
        nq = [0] * (len(q) + 1)
        for i, v in enumerate(q):
            nq[i] += v * lin0
            nq[i + 1] += v * lin1
        nq[0] += p[k] * dp
        q = nq
    return to_int_primitive(q)


def cauchy_bound(p: Sequence) -> Fraction:
    p = trim(p)
    if len(p) < 2:
        raise ValueError("root bound needs positive degree")
    lead = Fraction(p[-1])
    return 1 + max(abs(Fraction(c) / lead) for c in p[:-1])


def root_bound(p) -> Fraction:
    """Cauchy bound 1 + max|a_i/a_n|; zero polynomial is an error."""
    c = trim(as_coeffs(p))
    if not c:
        raise ValueError("zero polynomial has no root bound")
    return cauchy_bound(c)


def _pow2_above(v: Fraction) -> Fraction:
    k = 0
    while Fraction(2) ** k < v:
        k += 1
    return Fraction(2) ** k


def _isolate_sqf(p: Coeffs, lo: Fraction, hi: Fraction) -> List[Interval]:
    """Isolating intervals for roots of squarefree p in [lo, hi]."""
    out: List[Interval] = []
    if len(p) < 2 or lo > hi:
        return out
    if lo == hi:
        return [Interval(lo, lo)] if sign_at(p, lo) == 0 else []
    for end in (lo, hi):
        if sign_at(p, end) == 0:
            out.append(Interval(end, end))
    q0 = _compose_affine(p, lo, hi - lo)
    stack = [(q0, lo, hi)]
    n = len(p) - 1
    while stack:
        q, a, b = stack.pop()
        # strip roots at t = 0 (these are already recorded interval endpoints)
        while q and q[0] == 0:
            q = q[1:]
        if len(q) < 2:
            continue
        v = _descartes01(q)
        if v == 0:
            continue
        if v == 1 and sign_at(p, a) != 0 and sign_at(p, b) != 0:
            out.append(Interval(a, b))
            continue
        m = (a + b) / 2
        deg = len(q) - 1
        ql = [c << (deg - i) for i, c in enumerate(q)]  # 2^deg q(t/2)
        qr = _taylor_shift1(ql)
        if qr[0] == 0:
            out.append(Interval(m, m))
        stack.append((qr, m, b))
        stack.append((ql, a, m))
    out.sort(key=lambda iv: (iv.lo, iv.hi))
    return out


def isolate_roots(p, lo: Fraction = None, hi: Fraction = None) -> RootSet:
    """Isolate all distinct real roots (optionally restricted to [lo, hi])."""
    c = trim(as_coeffs(p))
    if not c:
        raise ValueError("isolate_roots of zero polynomial")
    sq = upoly_sqf(c)
    if len(sq) < 2:
        return RootSet(tuple(sq), ())
    B = _pow2_above(cauchy_bound(sq))
    a = Fraction(-B) if lo is None else max(Fraction(lo), -B)
    b = Fraction(B) if hi is None else min(Fraction(hi), B)
    if lo is not None and hi is not None and Fraction(lo) > Fraction(hi):
        return RootSet(tuple(sq), ())
    return RootSet(tuple(sq), tuple(_isolate_sqf(sq, a, b)))


def refine_interval(p: Coeffs, iv: Interval, width) -> Interval:
    """Bisect an isolating interval of squarefree p until its width <= width."""
    width = Fraction(width)
    if iv.is_point() or iv.width <= width:
        return iv
    a, b = iv.lo, iv.hi
    sa = sign_at(p, a)
    if sa == 0:
        return Interval(a, a)
    sb = sign_at(p, b)
    if sb == 0:
        return Interval(b, b)
    while b - a > width:
        m = (a + b) / 2
        sm = sign_at(p, m)
        if sm == 0:
            return Interval(m, m)
        if sm == sa:
            a = m
        else:
            b = m
    return Interval(a, b)


def refine(rs: RootSet, index: int, width) -> Interval:
    return refine_interval(list(rs.poly), rs.roots[index], width)


def refine_all(rs: RootSet, width) -> RootSet:
    return RootSet(rs.poly, tuple(refine_interval(list(rs.poly), iv, width) for iv in rs.roots))


# ----------------------------------------------------------------------
# Sturm counting

def _neg_rem(a, b):
    _, r = divmod_poly(a, b)
    r = [-c for c in r]
    den = 1
    for c in r:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in r]
    g = 0
    for c in ints:
        g = gcd(g, c)
    g = abs(g) or 1
    return [c // g for c in ints]


def sturm_sequence(p) -> List[list]:
    return _sturm_chain(to_int_primitive(as_coeffs(p)))


def _sturm_chain(p: Coeffs) -> List[list]:
    seq = [p, derivative(p)]
    while True:
        a, b = seq[-2], trim(seq[-1])
        if len(b) <= 1:
            break
        r = _neg_rem(a, b)
        r = trim(r)
        if not r:
            break
        seq.append(r)
    return seq


def _variations_at(seq, x: Fraction) -> int:
    return _sign_variations([sign_at(s, x) for s in seq])


def count_roots_in(p, a, b) -> int:
    """Number of distinct real roots in the open interval (a, b), via Sturm."""
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise ValueError("count_roots_in needs a < b")
    sq = upoly_sqf(as_coeffs(p))
    if len(sq) < 2:
        return 0
    # nudge endpoints off roots, staying inside (a, b)
    width = b - a
    if sign_at(sq, a) == 0:
        step = width / 4
        while not _no_root_between(sq, a, a + step):
            step /= 2
        a = a + step
    if sign_at(sq, b) == 0:
        step = width / 4
        while not _no_root_between(sq, b - step, b):
            step /= 2
        b = b - step
    seq = _sturm_chain(sq)
    return _variations_at(seq, a) - _variations_at(seq, b)


def _no_root_between(sq: Coeffs, a: Fraction, b: Fraction) -> bool:
    """True if sq has no root in (a, b) apart from possible roots at a or b."""
    ivs = _isolate_sqf(sq, a, b)
    return all(iv.lo in (a, b) and iv.hi in (a, b) and iv.is_point() for iv in ivs)


def count_roots_descartes(p, a, b) -> int:
    """Distinct roots in the open interval (a, b), counted by isolation."""
    a, b = Fraction(a), Fraction(b)
    rs = isolate_roots(p, a, b)
    return sum(1 for iv in rs.roots if not (iv.is_point() and iv.lo in (a, b)))
