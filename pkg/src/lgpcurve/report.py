"""Figures and CSV tables for a finished run."""
from __future__ import annotations

import csv
import os
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .export import num, sample_piece  # noqa: E402

_CERT_COLS = ("eps1", "eps2", "hausdorff", "reparam", "total")


def write_csv(out, path: str) -> str:
    certs = out.certificates.get("pieces", [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if out.mode == "space":
            w.writerow(("id", "kind", "x0", "x1") + _CERT_COLS)
            for p, c in zip(out.pieces, certs):
                w.writerow([p.id, p.kind, num(p.x_domain[0]), num(p.x_domain[1])]
                           + [num(c[k]) for k in _CERT_COLS])
        else:
            w.writerow(("id", "kind", "x0", "x1", "error"))
            for i, ap in enumerate(out.pieces):
                w.writerow([i, ap.kind, num(ap.x_domain[0]), num(ap.x_domain[1]), num(ap.error_bound)])
    return path


def _plane_axes(ax, pieces, title):
    for ap in pieces:
        P = sample_piece(ap.form, ap.x_domain, 64)
        ax.plot(P[:, 0], P[:, 1], lw=1.2)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(title)
    ax.set_xlabel("x")
    ax.set_ylabel("y")


def plot_curve(out, path: str) -> str:
    if out.mode == "plane":
        fig, ax = plt.subplots(figsize=(6, 6))
        _plane_axes(ax, out.pieces, f"{len(out.pieces)} pieces")
    else:
        fig = plt.figure(figsize=(12, 5))
        ax = fig.add_subplot(1, 3, 1, projection="3d")
        for p in out.pieces:
            P = sample_piece(p.form, p.x_domain, 64)
            ax.plot(P[:, 0], P[:, 1], P[:, 2], lw=1.2, color="C3" if p.kind == "reparam" else "C0")
        ax.set_title(f"space curve, {len(out.pieces)} pieces")
        _plane_axes(fig.add_subplot(1, 3, 2), [p.graph.p for p in out.pieces], "h projection")
        _plane_axes(fig.add_subplot(1, 3, 3), [p.graph.q for p in out.pieces], "sheared projection")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_errors(out, path: str) -> str:
    certs = out.certificates.get("pieces", [])
    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.bar(range(len(certs)), [c["total"] for c in certs], color="C0")
    eps = out.certificates.get("budget", {}).get("eps", out.certificates.get("epsilon"))
    if eps is not None:
        ax.axhline(eps, color="C3", ls="--", label="epsilon")
        ax.legend()
    ax.set_xlabel("piece")
    ax.set_ylabel("certified error")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(out, outdir: str) -> List[str]:
    os.makedirs(outdir, exist_ok=True)
    return [plot_curve(out, os.path.join(outdir, "curve.png")),
            plot_errors(out, os.path.join(outdir, "errors.png")),
            write_csv(out, os.path.join(outdir, "pieces.csv"))]
