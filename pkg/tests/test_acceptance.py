"""The ten acceptance criteria; each test records one pass/fail line for the summary."""
import math
import random
import time
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from conftest import record, run_example
from helpers import CIRCLE, circle_upper
from lgpcurve.fixtures import EX1
from lgpcurve.plane import approx_triangle, estimate_error, fit_rational_quadratic, subdivide
from lgpcurve.poly import (det_cofactor, parse_poly, random_poly, resultant, shear_yz,
                           squarefree_part, sylvester_matrix)
from lgpcurve.reparam import ReparamTriple
from lgpcurve.space import check_z_generic, compute_s, projection, space_error_bound
from lgpcurve.topology import point_on_branch, segment_curve

XY, XYZ = ("x", "y"), ("x", "y", "z")
S3 = math.sqrt(3)
BOX3 = tuple(Fraction(v) for v in (-2, 2, -2, 2, -2, 2))


def check(n, cond, detail):
    record(n, cond, detail)
    assert cond, detail


def proportional(a, b):
    a, b = a.with_vars(XYZ).primitive(), b.with_vars(XYZ).primitive()
    return a == b or a == b.scale(-1)


def test_criterion_1_symbolic():
    t = time.time()
    f, g = parse_poly(EX1["f"]), parse_poly(EX1["g"])
    h = squarefree_part(resultant(f, g, "z"))
    hb = squarefree_part(resultant(shear_yz(f, 1), shear_yz(g, 1), "z"))
    dt = time.time() - t
    ok = (proportional(h, parse_poly("x^2+y^2-3")) and
          proportional(hb, parse_poly("(x^2+y^2-2+2*y)*(x^2+y^2-2-2*y)")) and dt < 5)
    check(1, ok, f"h ~ x^2+y^2-3 and hbar ~ product, exact; {dt:.2f} s")


def test_criterion_2_shear():
    f, g = parse_poly(EX1["f"]), parse_poly(EX1["g"])
    h = projection(f, g)
    topo = segment_curve(h.with_vars(XY), BOX3[:4])
    sp = compute_s(f, g, topo, BOX3, s_override=1)
    zg = check_z_generic(f, g, 1, box=BOX3)
    ok = 3.4641016 <= sp.r <= 3.4641017 and sp.R >= 1.0 and sp.s == 1 and 1 < sp.bound and zg
    check(2, ok, f"r={sp.r:.10f} R={sp.R:.6g} bound={sp.bound:.10f} s=1 accepted, z-generic={zg}")


def _dist_two_circles(P):
    rho = np.hypot(P[:, 0], P[:, 1])
    return np.minimum(np.hypot(rho - S3, P[:, 2] - 1), np.hypot(rho - S3, P[:, 2] + 1))


def test_criterion_3_example1():
    out = run_example("ex1")
    rational = all(p.is_rational for p in out.pieces)
    dmax, zmax = 0.0, 0.0
    for p in out.pieces:
        P = _samples(p, 200)
        dmax = max(dmax, float(np.max(_dist_two_circles(P))))
        zmax = max(zmax, float(np.max(np.abs(np.abs(P[:, 2]) - 1))))
    disj = all(c["ok"] for c in out.certificates["disjointness"]) and out.certificates["plane_disjointness_ok"]
    loops = out.topology["loops"]
    wall = out.extras["wall"]
    ok = rational and dmax <= 1e-2 and zmax <= 1e-2 and disj and loops == 2 and wall < 60
    check(3, ok, f"{len(out.pieces)} rational pieces, max dist {dmax:.3g}, max |z|-1 {zmax:.3g}, "
                 f"disjoint={disj}, loops={loops}, {wall:.1f} s")


def _samples(p, n):
    if isinstance(p.form, ReparamTriple):
        return p.form(np.linspace(0, 1, n))
    return p.form(np.linspace(p.x_domain[0], p.x_domain[1], n))


@pytest.mark.xfail(strict=True, reason="printed c~ does not interpolate its own endpoints; see decisions ledger")
def test_criterion_4_coefficients():
    seg = circle_upper(-1.60, -1.40)
    ap = fit_rational_quadratic((-1.60, 0.6633249580), (-1.40, 1.019803903), seg.k0.slope, seg.k1.slope)
    got = ap.form.simplified()
    want = (0.6106757885, 2.310809554, -0.1270414345, 0.5070598449)
    rel = [abs(g - w) / abs(w) for g, w in zip(got, want)]
    err = estimate_error(CIRCLE, seg, ap)
    ok = all(r < 5e-6 for r in rel) and err <= 0.0005
    check(4, ok, "coefficients " + ", ".join(f"{g:.10g}" for g in got)
          + f"; rel dev {max(rel):.2g} (c~ {rel[2]:.2g}); error {err:.5f}")


def _bound_violations(out, per_piece):
    s = float(out.extras["shear"].s)
    hA, hB = out.extras["h"].with_vars(XY), out.extras["hbar"].with_vars(XY)
    bad, count = 0, 0
    for p in out.pieces:
        gp, gq = p.graph.p, p.graph.q
        e1, e2 = gp.error_bound, gq.error_bound
        per, haus = space_error_bound(e1, e2, s)
        x0, x1 = p.x_domain
        xs = [Fraction(x0) + (Fraction(x1) - Fraction(x0)) * Fraction(2 * k + 1, 2 * per_piece)
              for k in range(per_piece)]
        for x in xs:
            y1 = point_on_branch(hA, gp.seg, x)
            y2 = point_on_branch(hB, gq.seg, x)
            P = p.graph(float(x))
            dy, dz = abs(P[1] - y1), abs(P[2] - (y2 - y1) / s)
            tol = 1e-12 * (1 + 1 / s)
            if max(dy, dz) > per + tol or math.hypot(dy, dz) > haus + tol:
                bad += 1
        count += 1
    return bad, count


def test_criterion_5_error_budget():
    total_bad, total = 0, 0
    parts = []
    for name, k in (("ex1", 8), ("ex2", 3), ("ex3", 5)):
        bad, n = _bound_violations(run_example(name), k)
        total_bad += bad
        total += n
        parts.append(f"{name}: {n} pieces, {bad} violations")
    check(5, total_bad == 0 and total >= 100, "; ".join(parts))


def _plane_pieces(out):
    seen = {}
    for p in out.pieces:
        for ap in (p.graph.p, p.graph.q):
            seen[id(ap)] = ap
    return list(seen.values())


def test_criterion_6_triangles():
    from lgpcurve.plane import approximate_plane_curve
    pieces = []
    for name in ("ex1", "ex2", "ex3"):
        pieces += _plane_pieces(run_example(name))
    for text, d in (("x^2+y^2-3", 0.0044), ("y^2-x^2*(x+1)", 1e-2), ("y-x^3", 1e-3)):
        pieces += approximate_plane_curve(parse_poly(text, XY), (-2, 2, -2, 2), d)[0]
    bad = 0
    for ap in pieces:
        x0, x1 = ap.x_domain
        xs = np.linspace(x0, x1, 52)[1:-1]
        bad += int(np.sum(~approx_triangle(ap).contains(np.column_stack([xs, ap(xs)]), slack=1e-9)))
    check(6, bad == 0, f"{len(pieces)} plane pieces x 50 samples, {bad} outside")


def test_criterion_7_subdivision():
    segs = [circle_upper(-1.0, 0.0)]
    errs = []
    for k in range(13):
        errs.append(max(estimate_error(CIRCLE, s, _fit(s)) for s in segs))
        if k < 12:
            segs = [c for s in segs for c in subdivide(CIRCLE, s)]
    mono = all(b <= a for a, b in zip(errs, errs[1:]))
    check(7, mono and errs[12] < 1e-6, f"errors {errs[0]:.2e} .. {errs[12]:.2e}, non-increasing={mono}")


def _fit(s):
    return fit_rational_quadratic((s.p0.x, s.p0.y), (s.p1.x, s.p1.y), s.k0.slope, s.k1.slope)


def test_criterion_8_resultant_oracle():
    rng = random.Random(2024)
    n, bad = 0, 0
    while n < 20:
        p = random_poly(rng, XY, rng.randint(1, 3), rng.randint(2, 6))
        q = random_poly(rng, XY, rng.randint(1, 3), rng.randint(2, 6))
        if p.degree("y") < 1 or q.degree("y") < 1:
            continue
        n += 1
        bad += resultant(p, q, "y") != det_cofactor(sylvester_matrix(p, q, "y"))
    check(8, bad == 0, f"{n} random pairs, {bad} mismatches")


def test_criterion_9_g1():
    parts, ok = [], True
    for name in ("ex1", "ex2", "ex3"):
        g1 = run_example(name).certificates["g1"]
        ok &= g1["max_cross"] < 1e-6 and g1["unpaired"] == 0
        parts.append(f"{name}: {g1['count']} joints, max cross {g1['max_cross']:.2g}")
    out = run_example("ex1")
    rep = max(c["reparam"] for c in out.certificates["pieces"] if c["kind"] == "reparam")
    ok &= rep <= 0.0022
    check(9, ok, "; ".join(parts) + f"; ex1 reparam error {rep:.3g}")


def _iso(a, b):
    return nx.is_isomorphic(a.graph, b.graph)


def test_criterion_10_examples_2_3():
    parts, ok = [], True
    for name, eps in (("ex2", 0.013), ("ex3", 0.014)):
        out = run_example(name)
        again = run_example(name, fresh=True)
        s = out.extras["shear"].s
        s2 = s * Fraction(3, 2)
        assert s2 < out.extras["shear"].bound
        pert = run_example(name, s=s2)
        good = (out.max_error <= eps and out.extras["wall"] < 600 and _iso(out, again) and _iso(out, pert)
                and pert.max_error <= eps)
        ok &= good
        parts.append(f"{name}: err {out.max_error:.4g} <= {eps}, {out.extras['wall']:.0f} s, "
                     f"stable across rerun and s={s2}: {_iso(out, again) and _iso(out, pert)}")
    check(10, ok, "; ".join(parts))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
