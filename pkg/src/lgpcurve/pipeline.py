"""End-to-end runs: plane curves and space curves f = g = 0."""
from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from . import roots as rr
from .config import JobConfig
from .plane import (FitError, Group, SegApprox, approximate_plane_curve, enforce_disjoint,
                    interval_is_vt, make_group, refine_group, split_interval)
from .poly import MPoly, eval_poly, parse_poly, resultant, squarefree_part, to_string
from .reparam import (ReparamError, ReparamTriple, TangentDir3, classify_vt_tangent,
                      merge_line_directions, reparam_error, reparametrize_vt_segment,
                      select_free_params)
from .space import (ErrorBudget, ErrorCert, SpacePiece, ShearParams, check_assumptions,
                    check_disjoint_space, compute_s, correspond_segments, projection,
                    recover_space, sheared)
from .topology import (CurveTopology, Event, TopoConfig, _bivariate, event_polys, isolate_events,
                       point_on_branch, segment_curve)

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str, hint: str = ""):
        self.stage, self.message, self.hint = stage, message, hint
        text = f"[{stage}] {message}"
        if hint:
            text += f" (hint: {hint})"
        super().__init__(text)


@contextmanager
def stage(name: str, hint: str = ""):
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        log.debug("stage %s failed", name, exc_info=True)
        raise PipelineError(name, f"{type(exc).__name__}: {exc}", hint) from exc


@dataclass
class PiecewiseOutput:
    mode: str                                   # "space" or "plane"
    pieces: list
    topology: dict
    certificates: dict
    provenance: dict
    graph: object = field(default=None, repr=False)
    extras: dict = field(default_factory=dict, repr=False)

    @property
    def max_error(self) -> float:
        return max((c["total"] for c in self.certificates.get("pieces", [])), default=0.0)


# ----------------------------------------------------------------------
# graphs, loops and G1 joints


def contract(G: nx.MultiGraph) -> nx.MultiGraph:
    """Remove degree-2 vertices that merely continue a chain."""
    H = nx.MultiGraph(G)
    changed = True
    while changed:
        changed = False
        for v in list(H.nodes):
            if H.degree(v) != 2:
                continue
            es = list(H.edges(v, keys=True))
            if len(es) != 2 or any(a == b for a, b, _ in es):
                continue
            (_, a, _), (_, b, _) = es
            H.remove_node(v)
            H.add_edge(a, b)
            changed = True
    return H


def topology_summary(ends: List[Tuple[object, object]], points: Dict[object, tuple] = None,
                     vt_keys=()) -> Tuple[dict, nx.MultiGraph]:
    G = nx.MultiGraph()
    for i, (a, b) in enumerate(ends):
        G.add_edge(a, b, key=i)
    loops = sum(1 for comp in nx.connected_components(G) if all(G.degree(v) == 2 for v in comp))
    H = contract(G)
    points = points or {}
    sing = sorted((points.get(v, ()) for v in G.nodes if G.degree(v) > 2), key=str)
    summary = {
        "pieces": len(ends),
        "components": nx.number_connected_components(G) if len(G) else 0,
        "loops": loops,
        "vertices": H.number_of_nodes(),
        "edges": H.number_of_edges(),
        "degree_sequence": sorted((d for _, d in H.degree()), reverse=True),
        "branch_points": [list(p) for p in sing],
        "vt_points": [list(points[v]) for v in sorted(set(vt_keys), key=str) if v in points],
    }
    return summary, H


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def g1_report(end_tangents: Dict[object, List[Tuple[int, np.ndarray]]]) -> dict:
    """Parallelism of one-sided tangents at every joint.

    Degree-2 joints compare their two pieces; at branch points the tangents
    are paired greedily by parallelism.
    """
    joints = []
    worst = 0.0
    unpaired = 0
    for key, items in end_tangents.items():
        if len(items) < 2:
            continue
        rest = [(pid, _unit(t)) for pid, t in items]
        while len(rest) >= 2:
            best = None
            for i in range(len(rest)):
                for j in range(i + 1, len(rest)):
                    c = float(np.linalg.norm(np.cross(rest[i][1], rest[j][1])))
                    if best is None or c < best[0]:
                        best = (c, i, j)
            c, i, j = best
            joints.append({"key": str(key), "pieces": [rest[i][0], rest[j][0]], "cross": c})
            worst = max(worst, c)
            rest = [r for k, r in enumerate(rest) if k not in (i, j)]
        unpaired += len(rest)
    return {"joints": joints, "max_cross": worst, "unpaired": unpaired, "count": len(joints)}


# ----------------------------------------------------------------------
# plane mode


def run_plane_pipeline(cfg: JobConfig) -> PiecewiseOutput:
    t_start = time.time()
    with stage("parse", "check the polynomial syntax"):
        h = parse_poly(cfg.f, ("x", "y"))
    box = cfg.box[:4]
    tcfg = TopoConfig(vt_threshold=cfg.vt_threshold, tangent_tau=cfg.tangent_tau)
    with stage("topology", "the curve must be squarefree without vertical line components"):
        if h.is_zero():
            raise ValueError("zero polynomial")
        h = squarefree_part(h).with_vars(("x", "y")) if not h.is_constant() else h
        topo = segment_curve(h, box, cfg=tcfg)
    report: list = []
    with stage("plane approximation", "try a larger epsilon"):
        if topo.segments:
            pieces, topo = approximate_plane_curve(h, box, cfg.epsilon, cfg.samples_n, tcfg, topo,
                                                   cfg.max_rounds, report=report)
        else:
            pieces = []
    ends, tangents, points, vt_keys = [], {}, {}, []
    for i, ap in enumerate(pieces):
        x0, x1 = ap.x_domain
        k0 = ("p", ap.p0_id) if ap.p0_id is not None else ("k", ap.seg.id, x0)
        k1 = ("p", ap.p1_id) if ap.p1_id is not None else ("k", ap.seg.id, x1)
        ends.append((k0, k1))
        points[k0] = (x0, ap.y0)
        points[k1] = (x1, ap.y1)
        for key, kk in ((k0, ap.k0), (k1, ap.k1)):
            t = np.array([0.0, 1.0]) if kk is None else np.array([1.0, kk])
            tangents.setdefault(key, []).append((i, np.array([t[0], t[1], 0.0])))
        if ap.vt_end:
            vt_keys.append(k0 if ap.vt_end == "p0" else k1)
    summary, H = topology_summary(ends, points, vt_keys)
    index = {id(ap): i for i, ap in enumerate(pieces)}
    summary["singular_points"] = [[p.x, p.y] for p in topo.points if p.kind == "singular"]
    summary["singular_degrees"] = [topo.degree(p.id) for p in topo.points if p.kind == "singular"]
    certs = {
        "pieces": [{"id": i, "error": ap.error_bound, "total": ap.error_bound, "sampled": True}
                   for i, ap in enumerate(pieces)],
        "disjointness": [{"a": index[id(a)], "b": index[id(b)], "ok": ok} for a, b, ok in report
                         if id(a) in index and id(b) in index],
        "g1": g1_report(tangents),
        "epsilon": cfg.epsilon,
    }
    prov = {"h": to_string(h), "box": [str(b) for b in box], "split_x": topo.split_x(),
            "n": cfg.samples_n, "seconds": time.time() - t_start}
    return PiecewiseOutput("plane", pieces, summary, certs, prov, graph=H, extras={"topology": topo})


# ----------------------------------------------------------------------
# space mode


def zexit_polys(f: MPoly, g: MPoly, Z1, Z2) -> Dict[str, list]:
    """x-coordinates where the curve may cross the planes z = Z1, z = Z2."""
    out = {}
    for name, Z in (("zexit:lo", Z1), ("zexit:hi", Z2)):
        fz = eval_poly(f, {"z": Fraction(Z)})
        gz = eval_poly(g, {"z": Fraction(Z)})
        if not isinstance(fz, MPoly) or not isinstance(gz, MPoly):
            continue
        fz, gz = fz.with_vars(("x", "y")), gz.with_vars(("x", "y"))
        if fz.is_zero() or gz.is_zero():
            log.warning("a surface contains the plane z=%s", Z)
            continue
        if fz.degree("y") <= 0 and gz.degree("y") <= 0:
            continue
        r = resultant(fz, gz, "y")
        if r.is_zero():
            log.warning("the curve meets z=%s in a whole component", Z)
            continue
        if r.is_constant():
            continue
        c = rr.upoly_sqf(r.univariate_coeffs())
        if len(c) >= 2:
            out[name] = c
    return out


def _relabel(events: List[Event], prefix: str = "hbar:") -> List[Event]:
    out = []
    for ev in events:
        src = set()
        for t in ev.sources:
            if t.startswith(prefix):
                src.add(t[len(prefix):])
            elif t in ("xmin", "xmax"):
                src.add(t)
            else:
                src.add("h:" + t)
        e2 = Event(iv=ev.iv, sources=src, x=ev.x, mid=ev.mid)
        e2.poly = getattr(ev, "poly", None)
        out.append(e2)
    return out


def _vkey(gi: int, g: Group, k: int, j: int):
    kn = g.knots[k]
    if kn.pids[0] is not None and kn.pids[j] is not None:
        return ("p", kn.pids[0], kn.pids[j])
    return ("k", gi, k, j)


def _vt_side(g: Group, i: int, j: int) -> Optional[str]:
    ka, kb = g.knots[i], g.knots[i + 1]
    a = ka.ts[0].vertical or ka.ts[j].vertical
    b = kb.ts[0].vertical or kb.ts[j].vertical
    if a and b:
        raise ReparamError("vertical tangents at both ends of one piece")
    return "p0" if a else ("p1" if b else None)


def _vt_direction(g: Group, i: int, j: int, side: str, s: Fraction, cfg: JobConfig) -> TangentDir3:
    """Space tangent at the VT end from exact branch slopes just inside the interval."""
    (h, sh), (hb, sb) = g.members[0], g.members[j]
    ka, kb = g.knots[i], g.knots[i + 1]
    xv, xo = (ka.x, kb.x) if side == "p0" else (kb.x, ka.x)
    w = abs(xo - xv)
    u = min(1e-9, w * 1e-6)
    xe = Fraction(xv) + (Fraction(u) if xo > xv else -Fraction(u))
    yh = point_on_branch(h, sh, xe, width=Fraction(1, 2 ** 90))
    yb = point_on_branch(hb, sb, xe, width=Fraction(1, 2 ** 90))
    ph = _bivariate(h).slope(float(xe), yh)
    pb = _bivariate(hb).slope(float(xe), yb)
    return classify_vt_tangent(ph, pb, s, cfg.vt_threshold)


def _knot_point(g: Group, k: int, j: int, s: float) -> np.ndarray:
    kn = g.knots[k]
    y1, y2 = kn.ys[0], kn.ys[j]
    return np.array([kn.x, y1, (y2 - y1) / s])


def _knot_tangent(g: Group, k: int, j: int, s: float) -> np.ndarray:
    kn = g.knots[k]
    p, q = kn.ts[0].slope, kn.ts[j].slope
    return np.array([1.0, p, (q - p) / s])


def _pairs_space(ga: Group, gb: Group):
    if ga is gb:
        m = len(ga.members)
        return [(a, b) for a in range(1, m) for b in range(a + 1, m)]
    if ga.members[0][1].strip != gb.members[0][1].strip:
        return []
    out = [(0, 0)]
    out += [(a, b) for a in range(1, len(ga.members)) for b in range(1, len(gb.members))]
    return out


def run_space_pipeline(cfg: JobConfig) -> PiecewiseOutput:
    t_start = time.time()
    timings = {}
    with stage("parse", "check the polynomial syntax"):
        f = parse_poly(cfg.f, ("x", "y", "z"))
        g = parse_poly(cfg.g, ("x", "y", "z"))
        if len(cfg.box) != 6:
            raise ValueError("space mode needs a box x1,x2,y1,y2,z1,z2")
    X1, X2, Y1, Y2, Z1, Z2 = cfg.box
    tcfg = TopoConfig(vt_threshold=cfg.vt_threshold, tangent_tau=cfg.tangent_tau)
    with stage("assumptions", "the surfaces need coprime z-leading coefficients in x"):
        check_assumptions(f, g)
    with stage("projection"):
        h = projection(f, g)
    box_h = (X1, X2, Y1, Y2)
    with stage("topology of h", "h must have no vertical line components"):
        polys_h = event_polys(h, box_h) if h.degree("y") > 0 else {}
        topo0 = segment_curve(h, box_h, cfg=tcfg, polys=polys_h)
    timings["h"] = time.time() - t_start
    with stage("shear", "give --s below r/(2R) or let it be chosen"):
        sp = compute_s(f, g, topo0, cfg.box, cfg.s)
        s = sp.s
        hbar = sp.hbar if sp.hbar is not None else projection(sheared(f, s), sheared(g, s))
    timings["shear"] = time.time() - t_start
    box_hb = (X1, X2, Y1 + s * min(Z1, Z2) - 1, Y2 + s * max(Z1, Z2) + 1)
    with stage("topology of hbar", "recompute s"):
        polys_hb = event_polys(hbar, box_hb) if hbar.degree("y") > 0 else {}
        union = dict(polys_h)
        union.update({"hbar:" + k: v for k, v in polys_hb.items()})
        union.update(zexit_polys(f, g, Z1, Z2))
        events = isolate_events(union, X1, X2)
        topo_h = segment_curve(h, box_h, cfg=tcfg, events=events)
        topo_hb = segment_curve(hbar, box_hb, cfg=tcfg, events=_relabel(events))
    timings["topology"] = time.time() - t_start
    with stage("correspondence", "increase precision or recompute s"):
        cor = correspond_segments(topo_h, topo_hb, sp, f, g, (Z1, Z2))
    budget = ErrorBudget.make(cfg.epsilon, s)
    if not budget.verify():
        raise PipelineError("budget", "plane budgets violate the error theorem")
    sf = float(s)
    seg_h = {sg.id: sg for sg in topo_h.segments}
    seg_hb = {sg.id: sg for sg in topo_hb.segments}
    n = cfg.samples_n
    plane_report: list = []
    with stage("plane approximation", "try a larger epsilon"):
        groups: List[Group] = []
        for hid in sorted(cor.pairs):
            members = [(h, seg_h[hid])] + [(hbar, seg_hb[j]) for j in cor.pairs[hid]]
            groups.append(make_group(members, float(cfg.vt_cap)))
        for gr in groups:
            refine_group(gr, budget.eps_nonvt, budget.eps_vt, n)
        enforce_disjoint(groups, _pairs_space, budget.eps_nonvt, budget.eps_vt, n, cfg.max_rounds,
                         report=plane_report)
    timings["plane"] = time.time() - t_start
    with stage("reparametrization", "VT pieces could not meet the budget"):
        for rnd in range(cfg.max_rounds):
            pieces, bad, space_checks = _assemble(groups, s, budget, cfg)
            if not bad:
                break
            log.info("reparametrization round %d: refining %d intervals", rnd, len(bad))
            by_group: Dict[int, set] = {}
            for gi, i in bad:
                by_group.setdefault(gi, set()).add(i)
            for gi, idxs in by_group.items():
                for i in sorted(idxs, reverse=True):
                    split_interval(groups[gi], i)
                refine_group(groups[gi], budget.eps_nonvt, budget.eps_vt, n)
            plane_report = []
            enforce_disjoint(groups, _pairs_space, budget.eps_nonvt, budget.eps_vt, n, cfg.max_rounds,
                             report=plane_report)
        else:
            raise FitError("VT pieces still fail after refinement")
    timings["reparam"] = time.time() - t_start
    # certificates and topology
    ends, tangents, points, vt_keys = [], {}, {}, []
    for p in pieces:
        ends.append(p.ends)
        for key, P, T in p.end_info:
            points[key] = tuple(float(v) for v in P)
            tangents.setdefault(key, []).append((p.id, T))
        if p.kind == "reparam":
            vt_keys.append(p.vt_key)
    summary, H = topology_summary(ends, points, vt_keys)
    summary["h_segments"] = len(topo_h.segments)
    summary["hbar_segments"] = len(topo_hb.segments)
    certs = {
        "pieces": [_cert_dict(p) for p in pieces],
        "plane_disjointness": len(plane_report),
        "plane_disjointness_ok": all(ok for _, _, ok in plane_report),
        "disjointness": space_checks,
        "g1": g1_report(tangents),
        "budget": {"eps": budget.eps, "eps_nonvt": budget.eps_nonvt, "eps_vt": budget.eps_vt,
                   "verified": budget.verify()},
    }
    prov = {
        "s": str(s), "r": sp.r, "R": sp.R, "R_cauchy": sp.R_cauchy, "bound": sp.bound,
        "s_tries": sp.tries,
        "alphas": [a for a, _ in sp.alphas],
        "h": to_string(h), "hbar": to_string(hbar),
        "box": [str(b) for b in cfg.box],
        "split_x": topo_h.split_x(),
        "correspondence": {str(k): v for k, v in sorted(cor.pairs.items())},
        "dropped_h_segments": cor.dropped,
        "fiber_methods": sorted(set(cor.methods.values())),
        "n": n,
        "seconds": time.time() - t_start,
        "timings": timings,
    }
    extras = {"topo_h": topo_h, "topo_hbar": topo_hb, "shear": sp, "correspondence": cor,
              "groups": groups, "budget": budget, "f": f, "g": g, "h": h, "hbar": hbar,
              "plane_report": plane_report}
    return PiecewiseOutput("space", pieces, summary, certs, prov, graph=H, extras=extras)


def _cert_dict(p: SpacePiece) -> dict:
    c = p.cert
    return {"id": p.id, "kind": p.kind, "eps1": c.eps1, "eps2": c.eps2, "per_coord": c.per_coord,
            "hausdorff": c.hausdorff, "reparam": c.reparam, "total": c.total, "sampled": True}


def _assemble(groups: List[Group], s: Fraction, budget: ErrorBudget, cfg: JobConfig):
    """Space pieces from fitted groups; returns (pieces, intervals to refine, space checks)."""
    sf = float(s)
    pieces: List[SpacePiece] = []
    pending = []        # reparam jobs
    bad = set()
    for gi, gr in enumerate(groups):
        for i, row in enumerate(gr.pieces):
            for j in range(1, len(gr.members)):
                sp = recover_space((row[0], row[j]), s)
                sp.h_seg = gr.members[0][1].id
                sp.hbar_seg = gr.members[j][1].id
                k0, k1 = _vkey(gi, gr, i, j), _vkey(gi, gr, i + 1, j)
                sp.ends = (k0, k1)
                sp.loc = (gi, i, j)
                sp.vt_key = None
                if sp.graph.is_rational:
                    a, b = row[0].x_domain
                    sp.end_info = [(k0, sp.graph(a), sp.graph.deriv(a)),
                                   (k1, sp.graph(b), sp.graph.deriv(b))]
                else:
                    side = _vt_side(gr, i, j)
                    if side is None:
                        raise ReparamError("non-rational piece without a vertical tangent")
                    sp.vt_side = side
                    sp.vt_key = k0 if side == "p0" else k1
                    pending.append(sp)
                sp.id = len(pieces)
                pieces.append(sp)
    # VT tangent lines, averaged over the pieces meeting at each VT point
    dirs: Dict[object, List[TangentDir3]] = {}
    raw = {}
    for sp in pending:
        gi, i, j = sp.loc
        d = _vt_direction(groups[gi], i, j, sp.vt_side, s, cfg)
        raw[sp.id] = d
        dirs.setdefault(sp.vt_key, []).append(d)
    merged = {k: merge_line_directions(v, cfg.vt_threshold) for k, v in dirs.items()}
    for sp in pending:
        gi, i, j = sp.loc
        gr = groups[gi]
        kv, ko = (i, i + 1) if sp.vt_side == "p0" else (i + 1, i)
        P0, P1 = _knot_point(gr, kv, j, sf), _knot_point(gr, ko, j, sf)
        t0 = merged[sp.vt_key]
        t1 = TangentDir3("General", tuple(_knot_tangent(gr, ko, j, sf)))
        dom = sp.x_domain
        if t0.form == "General":
            raise ReparamError("VT tangent is not vertical in the projection")

        def evaluate(d2, d3, P0=P0, P1=P1, t0=t0, t1=t1, graph=sp.graph, dom=dom):
            tr = reparametrize_vt_segment(P0, P1, t0, t1, d2, d3)
            return reparam_error(graph, dom, tr, cfg.samples_n)
        try:
            d2, d3, err = select_free_params(evaluate, cfg.grid)
        except ReparamError as exc:
            log.info("reparametrization of piece %d failed: %s", sp.id, exc)
            bad.add((gi, i))
            continue
        tr = reparametrize_vt_segment(P0, P1, t0, t1, d2, d3)
        sp.form = tr
        sp.cert.reparam = err
        sp.free_params = (d2, d3)
        sp.tangent_vt = t0
        kvk = _vkey(gi, gr, kv, j)
        kok = _vkey(gi, gr, ko, j)
        sp.end_info = [(kvk, tr(0.0), tr.deriv(0.0)), (kok, tr(1.0), tr.deriv(1.0))]
        if err > budget.eps_vt or sp.cert.total > budget.eps:
            bad.add((gi, i))
    # space disjointness over a shared plane piece of h
    checks = []
    by_loc: Dict[Tuple[int, int], List[SpacePiece]] = {}
    for sp in pieces:
        by_loc.setdefault(sp.loc[:2], []).append(sp)
    for (gi, i), lst in sorted(by_loc.items()):
        for a in range(len(lst)):
            for b in range(a + 1, len(lst)):
                A, B = lst[a], lst[b]
                if isinstance(A.form, ReparamTriple) != isinstance(B.form, ReparamTriple):
                    ok = check_disjoint_space(_as_graph(A), _as_graph(B))
                else:
                    ok = check_disjoint_space(A, B)
                checks.append({"a": A.id, "b": B.id, "ok": bool(ok)})
                if not ok:
                    bad.add((gi, i))
    return pieces, bad, checks


def _as_graph(p: SpacePiece) -> SpacePiece:
    return SpacePiece(p.graph, p.x_domain, p.cert, p.graph)


def run(cfg: JobConfig) -> PiecewiseOutput:
    return run_space_pipeline(cfg) if cfg.is_space else run_plane_pipeline(cfg)
