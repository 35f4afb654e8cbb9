"""JSON, SVG and polyline writers, and a JSON reader for round trips."""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from typing import List

import numpy as np

from .plane import ConicArc, RationalQuadratic, SegApprox
from .reparam import ReparamTriple

FORMAT = "lgpcurve-piecewise"
VERSION = 1
_VOLATILE = {"seconds", "timings"}


class ExportError(ValueError):
    pass


def num(v) -> str:
    """Fixed 17 significant digit decimal text."""
    return format(float(v), ".17g")


def _exact(v) -> str:
    return str(Fraction(float(v)))


def _clean(obj):
    """JSON-ready copy: float -> 17-digit string, tuples -> lists, keys -> str."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))
                if k not in _VOLATILE}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return num(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if obj is None:
        return None
    return str(obj)


_RQ = ("a", "b", "c", "d", "x0", "x1")
_CA = ("a", "C", "x_vt", "y_vt", "x_other")
_RT = ("a1", "b1", "c1", "d1", "a2", "b2", "c2", "d2", "c3", "d3", "u0", "u1")


def _plane_form(form) -> dict:
    if isinstance(form, RationalQuadratic):
        return {"type": "rational", "coefficients": {k: num(getattr(form, k)) for k in _RQ},
                "exact": {k: _exact(getattr(form, k)) for k in _RQ}}
    if isinstance(form, ConicArc):
        d = {"type": "conic", "coefficients": {k: num(getattr(form, k)) for k in _CA},
             "exact": {k: _exact(getattr(form, k)) for k in _CA}}
        d["x_dir"], d["branch_sign"] = int(form.x_dir), int(form.branch_sign)
        return d
    raise ExportError(f"unknown plane form {type(form).__name__}")


def _plane_piece(i: int, ap: SegApprox, cert: dict = None) -> dict:
    return {"id": i, "kind": ap.kind, "domain": [num(v) for v in ap.x_domain],
            "form": _plane_form(ap.form), "error_bound": num(ap.error_bound),
            "certificate": _clean(cert or {"error": ap.error_bound})}


def _space_piece(p, cert: dict) -> dict:
    d = {"id": p.id, "kind": p.kind, "domain": [num(v) for v in p.x_domain],
         "graph": {"s": num(p.graph.s), "p": _plane_form(p.graph.p.form), "q": _plane_form(p.graph.q.form)},
         "ends": [str(e) for e in p.ends], "h_segment": p.h_seg, "hbar_segment": p.hbar_seg,
         "certificate": _clean(cert)}
    if isinstance(p.form, ReparamTriple):
        f = p.form
        d["triple"] = {"mode": f.mode, "coefficients": {k: num(getattr(f, k)) for k in _RT},
                       "exact": {k: _exact(getattr(f, k)) for k in _RT}}
    return d


def to_document(out) -> dict:
    certs = out.certificates.get("pieces", [])
    if out.mode == "space":
        pieces = [_space_piece(p, c) for p, c in zip(out.pieces, certs)]
    else:
        pieces = [_plane_piece(i, ap, c) for i, (ap, c) in enumerate(zip(out.pieces, certs))]
    rest = {k: v for k, v in out.certificates.items() if k != "pieces"}
    return {"format": FORMAT, "version": VERSION, "mode": out.mode, "pieces": pieces,
            "topology": _clean(out.topology), "certificates": _clean(rest),
            "provenance": _clean(out.provenance)}


def to_json(out) -> bytes:
    return (json.dumps(to_document(out), indent=1, sort_keys=True) + "\n").encode()


def load_schema() -> dict:
    return json.loads(resources.files("lgpcurve").joinpath("schema.json").read_text())


def read_json(data) -> dict:
    """Parse exported JSON (bytes, str or path) and check the header."""
    if isinstance(data, (bytes, bytearray)):
        doc = json.loads(data.decode())
    elif isinstance(data, str) and data.lstrip().startswith("{"):
        doc = json.loads(data)
    else:
        with open(data, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    if doc.get("format") != FORMAT:
        raise ExportError("not an lgpcurve document")
    if doc.get("version") != VERSION:
        raise ExportError(f"unsupported version {doc.get('version')}")
    return doc


def _form_from(d: dict):
    c = {k: float(v) for k, v in d["coefficients"].items()}
    if d["type"] == "rational":
        return RationalQuadratic(**c)
    return ConicArc(c["a"], c["C"], c["x_vt"], c["y_vt"], d["x_dir"], d["branch_sign"], c["x_other"])


def piece_callables(doc: dict) -> List[object]:
    """Evaluable forms for each piece: plane forms of x, graph triples of x or triples of t."""
    from .space import GraphTriple
    out = []
    for pc in doc["pieces"]:
        if doc["mode"] == "plane":
            out.append(_form_from(pc["form"]))
        elif "triple" in pc:
            t = pc["triple"]
            out.append(ReparamTriple(t["mode"], **{k: float(v) for k, v in t["coefficients"].items()}))
        else:
            g = pc["graph"]
            dom = tuple(float(v) for v in pc["domain"])
            p = SegApprox(_form_from(g["p"]), dom)
            q = SegApprox(_form_from(g["q"]), dom)
            out.append(GraphTriple(p, q, float(g["s"])))
    return out


# ----------------------------------------------------------------------
# sampling, SVG, polyline


def sample_piece(form, domain, n: int) -> np.ndarray:
    """n points along one piece, as (n, 3) for space pieces or (n, 2) for plane pieces."""
    if isinstance(form, ReparamTriple):
        return np.asarray(form(np.linspace(0.0, 1.0, n)))
    xs = np.linspace(domain[0], domain[1], n)
    v = np.asarray(form(xs), dtype=float)
    if v.ndim == 2:
        return v
    return np.stack([xs, v], axis=-1)


def to_svg(out, n: int = 64, size: float = 512.0) -> bytes:
    if out.mode != "plane":
        raise ExportError("svg export is for plane mode only")
    box = [float(Fraction(b)) for b in out.provenance["box"]]
    X1, X2, Y1, Y2 = box
    sc = size / max(X2 - X1, Y2 - Y1)
    W, H = (X2 - X1) * sc, (Y2 - Y1) * sc
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{num(W)}" height="{num(H)}" '
             f'viewBox="0 0 {num(W)} {num(H)}">']
    for i, ap in enumerate(out.pieces):
        P = sample_piece(ap.form, ap.x_domain, n)
        pts = [((x - X1) * sc, (Y2 - y) * sc) for x, y in P]
        d = "M " + " L ".join(f"{num(a)} {num(b)}" for a, b in pts)
        lines.append(f'<path id="piece{i}" class="{ap.kind}" fill="none" stroke="black" '
                     f'stroke-width="1" d="{d}"/>')
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode()


def to_polyline(out, density: int = 100) -> bytes:
    """OBJ-style records: one ``v x y z`` per sample and one ``l`` line per piece."""
    if density < 2:
        raise ExportError("density must be at least 2")
    rows, k = [f"# {FORMAT} polyline, {len(out.pieces)} pieces"], 1
    for i, p in enumerate(out.pieces):
        P = sample_piece(p.form, p.x_domain, density)
        if P.shape[1] == 2:
            P = np.column_stack([P, np.zeros(len(P))])
        rows.append(f"o piece{i}")
        for x, y, z in P:
            rows.append(f"v {num(x)} {num(y)} {num(z)}")
        rows.append("l " + " ".join(str(j) for j in range(k, k + len(P))))
        k += len(P)
    return ("\n".join(rows) + "\n").encode()


def read_polyline(data: bytes) -> List[np.ndarray]:
    verts, polys = [], []
    for line in data.decode().splitlines():
        if line.startswith("v "):
            verts.append([float(t) for t in line.split()[1:4]])
        elif line.startswith("l "):
            polys.append([int(t) - 1 for t in line.split()[1:]])
    V = np.asarray(verts)
    return [V[idx] for idx in polys]


def export(out, fmt: str, density: int = 100) -> bytes:
    if fmt == "json":
        return to_json(out)
    if fmt == "svg":
        return to_svg(out)
    if fmt == "polyline":
        return to_polyline(out, density)
    raise ExportError(f"unknown format {fmt!r}")
