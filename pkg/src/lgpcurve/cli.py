"""Command line entry point: approx3d, approx2d and report."""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import JobConfig, parse_box, parse_rational
from .export import ExportError, export
from .pipeline import PipelineError, run
from .reparam import DEFAULT_GRID

LOG_ENV = "LGPCURVE_LOG"


def _grid(text):
    return tuple(parse_rational(t) for t in text.split(","))


def _common(p: argparse.ArgumentParser, space: bool):
    p.add_argument("--f", required=True, help="polynomial text, e.g. 'x^2+y^2-1'")
    if space:
        p.add_argument("--g", required=True, help="second polynomial in x, y, z")
        p.add_argument("--box", default="-2,2,-2,2,-2,2", help="x1,x2,y1,y2,z1,z2")
        p.add_argument("--s", default=None, help="shear override, checked against r/(2R)")
        p.add_argument("--seed-grid", type=_grid, default=DEFAULT_GRID,
                       help="comma-separated search grid for the free parameters d2, d3")
    else:
        p.add_argument("--box", default="-2,2,-2,2", help="x1,x2,y1,y2")
    p.add_argument("--eps", type=float, default=1e-2, help="Hausdorff error bound")
    p.add_argument("--vt-threshold", type=float, default=100.0)
    p.add_argument("--samples", type=int, default=19, help="error samples per piece")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lgpcurve", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name, space in (("approx3d", True), ("approx2d", False)):
        p = sub.add_parser(name, help=f"approximate a {'space' if space else 'plane'} curve")
        _common(p, space)
        p.add_argument("--export", choices=("json", "svg", "polyline"), default="json")
        p.add_argument("--density", type=int, default=100, help="polyline samples per piece")
        p.add_argument("--out", default="-", help="output file, '-' for stdout")
    p = sub.add_parser("report", help="run a job and write PNG figures plus a CSV table")
    p.add_argument("--f", required=True)
    p.add_argument("--g", default=None, help="omit for a plane curve")
    p.add_argument("--box", default=None)
    p.add_argument("--s", default=None)
    p.add_argument("--seed-grid", type=_grid, default=DEFAULT_GRID)
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--vt-threshold", type=float, default=100.0)
    p.add_argument("--samples", type=int, default=19)
    p.add_argument("--out", default="report", help="output directory")
    return ap


def config_from_args(args) -> JobConfig:
    g = getattr(args, "g", None)
    n = 6 if g is not None else 4
    box = args.box or ",".join(["-2", "2"] * (n // 2))
    return JobConfig(f=args.f, g=g, box=parse_box(box, n), epsilon=args.eps,
                     s=getattr(args, "s", None), vt_threshold=args.vt_threshold,
                     samples_n=args.samples, grid=getattr(args, "seed_grid", DEFAULT_GRID))


def _write(data: bytes, path: str):
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get(LOG_ENV, "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        out = run(cfg)
        if args.cmd == "report":
            from .report import write_report
            for path in write_report(out, args.out):
                print(path)
        else:
            _write(export(out, args.export, args.density), args.out)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ExportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    log = logging.getLogger("lgpcurve")
    log.info("%d pieces, max certified error %.6g", len(out.pieces), out.max_error)
    return 0


if __name__ == "__main__":
    sys.exit(main())
