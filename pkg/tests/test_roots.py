import math
import random
from fractions import Fraction

import mpmath
from hypothesis import given, settings, strategies as st

from lgpcurve.poly import parse_poly
from lgpcurve.roots import (count_roots_descartes, count_roots_in, isolate_roots, mul, refine,
                            root_bound, sign_at, upoly_sqf)


def from_roots(rs):
    p = [1]
    for r in rs:
        p = mul(p, [-Fraction(r), 1])
    return p


def test_isolate_sqrt3():
    rs = isolate_roots(parse_poly("y^2-3", ("y",)))
    assert len(rs) == 2
    for iv, want in zip(rs, (-math.sqrt(3), math.sqrt(3))):
        assert iv.lo <= Fraction(want) <= iv.hi or abs(float(iv.mid) - want) < 1e-9
        assert abs(float(iv.mid) - want) < float(iv.width) + 1e-12


def test_isolate_constant():
    assert len(isolate_roots([5])) == 0


def test_isolate_wilkinson():
    p = from_roots(range(1, 7))
    rs = isolate_roots(p)
    assert len(rs) == 6
    for i, iv in enumerate(rs, start=1):
        assert iv.contains(i)
        assert sum(iv.contains(j) for j in range(1, 7)) == 1


def test_isolating_intervals_certified():
    rng = random.Random(7)
    for _ in range(20):
        p = [rng.randint(-9, 9) for _ in range(6)] + [rng.choice([-1, 1]) * rng.randint(1, 9)]
        sq = upoly_sqf(p)
        for iv in isolate_roots(p):
            if iv.is_point():
                assert sign_at(sq, iv.lo) == 0
            else:
                assert sign_at(sq, iv.lo) * sign_at(sq, iv.hi) < 0
                assert count_roots_in(p, iv.lo, iv.hi) == 1


def test_refine_sqrt3():
    rs = isolate_roots([-3, 0, 1])
    iv = refine(rs, 1, Fraction(1, 10 ** 9))
    mpmath.mp.dps = 40
    assert iv.width <= Fraction(1, 10 ** 9)
    assert iv.lo <= Fraction(str(mpmath.sqrt(3))) <= iv.hi


def test_refine_nesting_and_noop():
    rs = isolate_roots([-3, 0, 1])
    iv = refine(rs, 1, Fraction(1, 4))
    from lgpcurve.roots import RootSet
    prev = iv
    for k in range(10):
        nxt = refine(RootSet(rs.poly, (prev,)), 0, prev.width / 2)
        assert prev.lo <= nxt.lo and nxt.hi <= prev.hi
        prev = nxt
    narrow = refine(RootSet(rs.poly, (prev,)), 0, 1)
    assert narrow == prev


def test_count_roots():
    assert count_roots_in([-2, 0, 1], 0, 2) == 1
    assert count_roots_in([1, 0, 1], -10, 10) == 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=6, max_size=6), st.integers(1, 9),
       st.fractions(-5, 5, max_denominator=4), st.fractions(0, 5, max_denominator=4))
def test_count_matches_isolation(low, lead, a, w):
    p = low + [lead]
    b = a + w + Fraction(1, 7)
    # non-point isolating intervals are open, so lo == a still lies inside (a, b)
    n = sum(1 for iv in isolate_roots(p, a, b)
            if (a < iv.lo and iv.hi < b) or (not iv.is_point() and a <= iv.lo and iv.hi <= b))
    inside = count_roots_in(p, a, b)
    sq = upoly_sqf(p)
    edge = sum(1 for iv in isolate_roots(p) if iv.contains(a) or iv.contains(b))
    assert n <= inside <= n + edge
    assert count_roots_descartes(p, a, b) == inside


def test_count_additive():
    p = from_roots([Fraction(1, 3), 1, 2, Fraction(5, 2)])
    for c in (Fraction(1, 2), Fraction(3, 2), Fraction(9, 4)):
        assert count_roots_in(p, 0, c) + count_roots_in(p, c, 3) == count_roots_in(p, 0, 3)


def test_root_bound():
    assert root_bound([-4, 0, 1]) == 5
    assert root_bound([0, 0, 0, 1]) == 1
    rng = random.Random(8)
    for _ in range(100):
        rs = [rng.randint(-30, 30) for _ in range(rng.randint(1, 5))]
        assert root_bound(from_roots(rs)) >= max(abs(r) for r in rs)
