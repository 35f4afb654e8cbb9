import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lgpcurve.poly import (MPoly, PolySyntaxError, det_cofactor, divides, eval_poly, gcd_poly,
                           parse_poly, partial_derivative, random_poly, resultant, shear_yz,
                           squarefree_part, sylvester_matrix, to_string)
from lgpcurve.space import sheared

XYZ = ("x", "y", "z")
XY = ("x", "y")


def P(text, vars=XYZ):
    return parse_poly(text, vars)


def same_up_to_constant(a, b):
    a, b = a.with_vars(XYZ), b.with_vars(XYZ)
    return a.primitive() == b.primitive() or a.primitive() == b.primitive().scale(-1)


def rand_point(rng, vars):
    return {v: Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for v in vars}


def test_parse_sphere():
    p = P("x^2+y^2+z^2-4")
    assert eval_poly(p, {"x": 1, "y": 1, "z": 1}) == -1
    assert p.degree() == 2


def test_parse_zero():
    p = P("0")
    assert p.is_zero() and not p.terms


def test_parse_product_matches_evaluation():
    rng = random.Random(1)
    p = P("(z-1)*(x^2+y^2-3*z^2)")
    assert len(p.terms) == 6     # x^2z, y^2z, -3z^3, -x^2, -y^2, 3z^2
    for _ in range(10):
        pt = rand_point(rng, XYZ)
        x, y, z = pt["x"], pt["y"], pt["z"]
        assert eval_poly(p, pt) == (z - 1) * (x * x + y * y - 3 * z * z)


def test_parse_errors():
    with pytest.raises(PolySyntaxError):
        P("x^^2")
    with pytest.raises(PolySyntaxError):
        P("w+1")


def test_eval_partial():
    assert eval_poly(P("x^2+y^2-3", XY), {"x": 0, "y": 0}) == -3
    circle = eval_poly(P("x^2+y^2+z^2-4"), {"z": 1})
    assert same_up_to_constant(circle, P("x^2+y^2-3"))


def test_eval_matches_term_sum():
    rng = random.Random(2)
    for _ in range(20):
        p = random_poly(rng, XYZ, 3)
        pt = rand_point(rng, XYZ)
        naive = sum(c * pt["x"] ** e[0] * pt["y"] ** e[1] * pt["z"] ** e[2] for e, c in p.terms.items())
        assert eval_poly(p, pt) == naive


def test_partial_derivative():
    assert partial_derivative(P("x^2+y^2-3", XY), "y") == P("2*y", XY)
    assert partial_derivative(P("y-x^3", XY), "x") == P("-3*x^2", XY)


def test_partial_derivative_finite_difference():
    rng = random.Random(3)
    p = random_poly(rng, XY, 4)
    dp = partial_derivative(p, "x")
    for _ in range(10):
        x, y = rng.uniform(-1, 1), rng.uniform(-1, 1)
        for d in (1e-4, 1e-5):
            fd = (eval_poly(p, {"x": x + d, "y": y}) - eval_poly(p, {"x": x, "y": y})) / d
            assert abs(fd - eval_poly(dp, {"x": x, "y": y})) < 2000 * d


def test_resultant_small():
    r = resultant(P("y-x", XY), P("y-1", XY), "y")
    assert same_up_to_constant(r, P("x-1"))


def test_resultant_example1():
    f, g = P("x^2+y^2+z^2-4"), P("(z-1)*(x^2+y^2-3*z^2)")
    h = squarefree_part(resultant(f, g, "z"))
    assert same_up_to_constant(h, P("x^2+y^2-3"))
    hb = squarefree_part(resultant(shear_yz(f, 1), shear_yz(g, 1), "z"))
    want = P("(x^2+y^2-2+2*y)*(x^2+y^2-2-2*y)")
    assert same_up_to_constant(hb, want)


def test_resultant_vanishes_on_common_root():
    # p, q share the root y = x + 1 for every x
    r = resultant(P("(y-x-1)*(y+2)", XY), P("(y-x-1)*(y-3*x)", XY), "y")
    assert r.is_zero()
    r = resultant(P("y^2-x", XY), P("y-2", XY), "y")
    assert eval_poly(r, {"x": 4}) == 0


def test_resultant_matches_sylvester():
    rng = random.Random(4)
    for _ in range(10):
        p, q = random_poly(rng, XY, 3), random_poly(rng, XY, 3)
        if p.degree("y") < 1 or q.degree("y") < 1:
            continue
        assert resultant(p, q, "y") == det_cofactor(sylvester_matrix(p, q, "y"))


def test_squarefree():
    assert same_up_to_constant(squarefree_part(P("(x-1)^2")), P("x-1"))
    rng = random.Random(5)
    for _ in range(5):
        p, q = random_poly(rng, XY, 2, 4), random_poly(rng, XY, 2, 4)
        if p.is_constant() or q.is_constant():
            continue
        a, b = squarefree_part(p * p * q), squarefree_part(p * q)
        assert same_up_to_constant(squarefree_part(a), squarefree_part(b))


def test_squarefree_divides():
    p = P("(x^2+y^2-3)^2*(x-y)", XY)
    sq = squarefree_part(p)
    assert divides(sq, p)
    assert divides(p, sq ** 3)


def test_squarefree_sampled_on_circle():
    import math
    h = squarefree_part(resultant(P("x^2+y^2+z^2-4"), P("(z-1)*(x^2+y^2-3*z^2)"), "z"))
    for k in range(12):
        t = 2 * math.pi * k / 12
        assert abs(eval_poly(h, {"x": math.sqrt(3) * math.cos(t), "y": math.sqrt(3) * math.sin(t)})) < 1e-9
    assert eval_poly(h, {"x": 1, "y": 1}) != 0


def test_shear():
    f = P("x^2+y^2+z^2-4")
    assert shear_yz(f, 1) == P("x^2+(y+z)^2+z^2-4")
    assert shear_yz(f, 0) == f


def test_sheared_is_inverse_shear():
    f = P("x^2+y^2+z^2-4")
    assert sheared(f, Fraction(1, 2)) == shear_yz(f, Fraction(-1, 2))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.fractions(min_value=-3, max_value=3, max_denominator=8))
def test_shear_inverse_and_homomorphism(seed, s):
    rng = random.Random(seed)
    p, q = random_poly(rng, XYZ, 2, 4), random_poly(rng, XYZ, 2, 4)
    assert shear_yz(shear_yz(p, s), -s) == p
    assert shear_yz(p * q, s) == shear_yz(p, s) * shear_yz(q, s)
    assert shear_yz(p, s).degree("z") <= p.degree("z") + p.degree("y")


def test_gcd():
    p = P("x^2+y^2-3", XY)
    assert same_up_to_constant(gcd_poly(p, p), p)
    f, g = P("x^2+y^2+z^2-4"), P("(z-1)*(x^2+y^2-3*z^2)")
    assert gcd_poly(f, g).is_constant()


def test_gcd_common_factor():
    rng = random.Random(6)
    lin = P("x-1", XY)
    for _ in range(5):
        r, w = random_poly(rng, XY, 2, 4), random_poly(rng, XY, 2, 4)
        if r.is_zero() or w.is_zero():
            continue
        assert divides(lin, gcd_poly(lin * r, lin * w))


def test_to_string_round_trip():
    p = P("3/2*x^2*y-z+7")
    assert parse_poly(to_string(p), XYZ) == p
