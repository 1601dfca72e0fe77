"""Command line front end.

Exit status is 0 on success, 1 on usage errors and 2 when the command itself
fails.  Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench, synth
from .cascade import load_shipped_cascade, parse_cascade
from .errors import VhFaceError
from .imaging import histogram, load_image, otsu_threshold, save_pgm, save_png
from .vh import FaceBox, VhParams, segment_face


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise UsageError(message)


def _save(img, path):
    if str(path).lower().endswith(".png"):
        save_png(img, path)
    else:
        save_pgm(img, path)


def _vh_params(args) -> VhParams:
    try:
        return VhParams(border_fraction=args.border_fraction, min_run=args.min_run)
    except ValueError as exc:
        print(f"vhface: error: {exc}", file=sys.stderr)
        raise UsageError(str(exc)) from None


def cmd_segment(args):
    img = load_image(args.image)
    box = segment_face(img, _vh_params(args))
    if args.overlay:
        _save(synth.render_overlay(img, box), args.overlay)
    if args.json:
        print(json.dumps(box.as_dict()))
    else:
        print(f"{box.x1} {box.y1} {box.x2} {box.y2}")


def cmd_otsu(args):
    print(otsu_threshold(histogram(load_image(args.image))))


def cmd_overlay(args):
    img = load_image(args.image)
    box = FaceBox(*args.box) if args.box else segment_face(img, _vh_params(args))
    _save(synth.render_overlay(img, box), args.out)


def cmd_synth(args):
    path = synth.write_dataset(
        args.out,
        args.count,
        seed=args.seed,
        spectrum=args.spectrum.upper(),
        illumination=args.illum.upper() if args.illum else None,
        vary=not args.fixed_layout,
    )
    print(path)


def cmd_bench(args):
    manifest = bench.load_manifest(args.manifest)
    wanted = args.detector or ["vh"]
    detectors = []
    if "vh" in wanted:
        detectors.append(bench.VhDetector(_vh_params(args)))
    if "vj" in wanted:
        cascade = parse_cascade(args.cascade) if args.cascade else load_shipped_cascade()
        detectors.append(bench.VjDetector(cascade, args.scale_step, args.stride, args.min_neighbors))
    report = bench.run_benchmark(manifest, detectors)
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
    sys.stdout.write(bench.format_report(report))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vhface", description="VH projection face segmentation toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def vh_options(p):
        p.add_argument("--border-fraction", type=float, default=VhParams.border_fraction)
        p.add_argument("--min-run", type=int, default=VhParams.min_run)

    p = sub.add_parser("segment", help="print the face box of one image")
    p.add_argument("image")
    vh_options(p)
    p.add_argument("--overlay", metavar="OUT", help="also write the image with the box drawn")
    p.add_argument("--json", action="store_true", help="print the box as JSON")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("otsu", help="print the Otsu threshold of one image")
    p.add_argument("image")
    p.set_defaults(func=cmd_otsu)

    p = sub.add_parser("overlay", help="draw a box (default: the VH result) onto an image")
    p.add_argument("image")
    p.add_argument("--out", required=True)
    p.add_argument("--box", type=int, nargs=4, metavar=("X1", "Y1", "X2", "Y2"))
    vh_options(p)
    p.set_defaults(func=cmd_overlay)

    p = sub.add_parser("synth", help="write synthetic face images, ground truth and a manifest")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--spectrum", choices=["th", "vis"], default="th")
    p.add_argument("--illum", choices=["ar", "ir", "na"])
    p.add_argument("--fixed-layout", action="store_true", help="use the default face layout for every image")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="run detectors over a manifest and report SDR and timing")
    p.add_argument("--manifest", required=True)
    p.add_argument("--detector", action="append", choices=["vh", "vj"])
    p.add_argument("--cascade", help="cascade JSON (default: the bundled test cascade)")
    p.add_argument("--report", metavar="OUT", help="write the JSON report here")
    p.add_argument("--scale-step", type=float, default=1.1)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--min-neighbors", type=int, default=3)
    vh_options(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except UsageError:
        return 1
    except (VhFaceError, OSError, ValueError) as exc:
        print(f"vhface: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
