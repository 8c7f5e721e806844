"""Command-line front end: enhance / evaluate / phantom / profile.

Every command is deterministic given its config and seed; enhance writes a
provenance sidecar (parameters, version, input checksum) sufficient to
replay the run. Exit codes: 0 ok, 2 usage, 3 I/O, 4 numeric/contract.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .eigen import BRIGHT_ON_DARK, DARK_ON_BRIGHT
from .evaluate import mean_roc, profile, roc, write_roc_csv
from .frangi import frangi
from .image import Image, ImageIOError, load_image, save_image
from .mfat import FilterParams, enhance
from .phantom import cross_2d, degrade, tree_2d, tree_3d, tube_2d, yjunction_2d
from .scalespace import ScaleList

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

_POLARITY = {"bright": BRIGHT_ON_DARK, "dark": DARK_ON_BRIGHT}


def parse_sigmas(text) -> ScaleList:
    """Parse `min:step:max` (inclusive) or a single scale value."""
    parts = text.split(":")
    if len(parts) == 1:
        return ScaleList((float(parts[0]),))
    if len(parts) != 3:
        raise ValueError(f"bad scale spec {text!r}, expected min:step:max")
    lo, step, hi = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise ValueError(f"bad scale spec {text!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return ScaleList(tuple(lo + i * step for i in range(n)))


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _resolve_threads(value):
    if value is None:
        value = os.environ.get("CURVEFILT_THREADS") or os.cpu_count() or 1
    n = int(value)
    if n < 1:
        raise ValueError("--threads must be >= 1")
    return n


def _sidecar_path(out_path):
    return os.path.splitext(out_path)[0] + ".json"


def cmd_enhance(args) -> int:
    img = load_image(args.input)
    params = FilterParams(
        scales=parse_sigmas(args.sigmas),
        tau_rho=args.tau_rho,
        tau_nu=args.tau_nu,
        delta=args.delta,
        mode=args.mode,
        polarity=_POLARITY[args.polarity],
        response_variant=args.variant,
        normalize_scale=not args.no_scale_normalize,
        normalize_input=not args.no_normalize,
    )
    _resolve_threads(args.threads)
    if args.baseline:
        result = frangi(img, params.scales, polarity=params.polarity,
                        normalize_input=params.normalize_input)
    else:
        result = enhance(img, params)
    save_image(Image(result.values, spacing=img.spacing), args.out)
    provenance = {
        "version": __version__,
        "command": "enhance",
        "input": os.path.abspath(args.input),
        "input_sha256": _sha256(args.input),
        "baseline": bool(args.baseline),
        "params": result.provenance,
    }
    with open(_sidecar_path(args.out), "w") as f:
        json.dump(provenance, f, indent=1, sort_keys=True)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if len(args.gt) != len(args.response):
        raise ValueError("--response and --gt need the same number of paths")
    curves = []
    for resp_path, gt_path in zip(args.response, args.gt):
        resp = load_image(resp_path)
        gt = load_image(gt_path)
        mask = load_image(args.mask).data if args.mask else None
        curve = roc(resp, gt.data != 0, mask=mask)
        curves.append((resp_path, curve))
        print(f"{resp_path}\tAUC {curve.auc:.6f}")
    if args.out:
        write_roc_csv(curves[0][1], args.out)
    if args.mean_roc_out:
        grid, tpr = mean_roc([c for _, c in curves])
        with open(args.mean_roc_out, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["fpr", "mean_tpr"])
            for x, y in zip(grid, tpr):
                w.writerow([repr(float(x)), repr(float(y))])
    mean_auc = float(np.mean([c.auc for _, c in curves]))
    print(f"mean\tAUC {mean_auc:.6f}")
    return EXIT_OK


def cmd_phantom(args) -> int:
    dims = tuple(int(d) for d in args.dims.split(","))
    if args.kind == "tube":
        p = tube_2d(dims, args.width, args.orientation)
    elif args.kind == "cross":
        p = cross_2d(dims, args.width)
    elif args.kind == "yjunction":
        p = yjunction_2d(dims, args.width, args.branch_angle)
    elif args.kind == "tree2d":
        p = tree_2d(dims, seed=args.seed, n_branches=args.n_branches)
    elif args.kind == "tree3d":
        p = tree_3d(dims, seed=args.seed, n_branches=args.n_branches)
    else:
        raise ValueError(f"unknown phantom kind {args.kind!r}")
    if args.degrade:
        p = degrade(p, args.noise_variance, args.smooth_sigma, seed=args.seed)
    save_image(p.image, args.out)
    base, ext = os.path.splitext(args.out)
    save_image(p.ground_truth, base + "_gt" + ext)
    save_image(p.centerline, base + "_centerline" + ext)
    with open(base + "_descriptor.json", "w") as f:
        json.dump(p.descriptor, f, indent=1, sort_keys=True)
    return EXIT_OK


def cmd_profile(args) -> int:
    resp = load_image(args.input)
    start = tuple(float(v) for v in args.start.split(","))
    end = tuple(float(v) for v in args.end.split(","))
    values = profile(resp.data, start, end, args.n_samples)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "value"])
        for i, v in enumerate(values):
            t = i / (args.n_samples - 1)
            w.writerow([repr(float(t)), repr(float(v))])
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="curvefilt",
                                     description="Curvilinear structure enhancement toolkit")
    parser.add_argument("--config", help="JSON config file providing flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", help="run the enhancement filter on an image")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sigmas", default="1:0.5:3", help="scales as min:step:max, inclusive")
    p.add_argument("--mode", choices=["fat", "pfat"], default="pfat")
    p.add_argument("--tau-rho", type=float, default=0.5)
    p.add_argument("--tau-nu", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--polarity", choices=["bright", "dark"], default="bright")
    p.add_argument("--variant", choices=["consistent", "literal"], default="consistent")
    p.add_argument("--no-normalize", action="store_true", help="skip input [0,1] normalization")
    p.add_argument("--no-scale-normalize", action="store_true",
                   help="skip sigma^2 normalization of second derivatives")
    p.add_argument("--baseline", action="store_true", help="run the vesselness baseline instead")
    p.add_argument("--threads", default=None)
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("evaluate", help="ROC/AUC of responses against ground truth")
    p.add_argument("--response", nargs="+", required=True)
    p.add_argument("--gt", nargs="+", required=True)
    p.add_argument("--mask", default=None)
    p.add_argument("--out", default=None, help="per-point ROC CSV (first image)")
    p.add_argument("--mean-roc-out", default=None, help="vertically averaged mean ROC CSV")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("phantom", help="generate a synthetic ground-truthed phantom")
    p.add_argument("--kind", choices=["tube", "cross", "yjunction", "tree2d", "tree3d"],
                   required=True)
    p.add_argument("--dims", required=True, help="comma-separated extents, e.g. 256,256")
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=float, default=4.0)
    p.add_argument("--orientation", type=float, default=0.0)
    p.add_argument("--branch-angle", type=float, default=120.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-branches", type=int, default=7)
    p.add_argument("--degrade", action="store_true")
    p.add_argument("--noise-variance", type=float, default=10.0)
    p.add_argument("--smooth-sigma", type=float, default=1.0)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("profile", help="sample a response along a line segment")
    p.add_argument("--input", required=True)
    p.add_argument("--start", required=True, help="comma-separated point, row,col[,slice]")
    p.add_argument("--end", required=True)
    p.add_argument("--n-samples", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_profile)
    return parser


def _apply_config(parser, argv):
    # --config supplies defaults for the chosen subcommand; explicit flags win
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    with open(path) as f:
        cfg = json.load(f)
    rest = argv[:i] + argv[i + 2 :]
    for action in parser._subparsers._group_actions[0].choices.values():
        known = {a.dest for a in action._actions}
        action.set_defaults(**{k: v for k, v in cfg.items() if k in known})
    return rest


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except ImageIOError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
