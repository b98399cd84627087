"""Command-line front end.

Exit codes: 0 ok, 1 I/O, 2 usage, 3 non-square input, 4 strict verdict failure.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

from . import __version__
from .entropy import fit_log_scale, fmt, surface_from_sweep, sweep
from .fluctuation import COLOR, PATTERN, omega_csv, omegas, scale_range
from .imagecube import FormatError, ImageCube, color_census, load_image, save_image
from .laws import LawConfig, analysis_sweep, default_k_grid, verify_laws
from .synth import gen_hilbert, gen_pavement, gen_plane, gen_random

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_SHAPE, EXIT_STRICT = 0, 1, 2, 3, 4
LAWS = ("L1", "L2", "L3")


class ShapeError(Exception):
    pass


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _law_list(text: str) -> tuple:
    laws = tuple(t.strip().upper() for t in text.split(",") if t.strip())
    bad = [t for t in laws if t not in LAWS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown law(s) {bad}; choose from {LAWS}")
    return laws


def _census_line(cube: ImageCube) -> str:
    c = color_census(cube)
    return (f"{cube.width}x{cube.height}x{cube.channels}, dynamics {cube.dynamics:g}; "
            f"census: {c.distinct_colors}/{c.total_pixels} distinct colors, "
            f"fraction {c.fraction:.6f}")


def _load(args) -> ImageCube:
    cube = load_image(args.input, crop=args.crop)
    if args.crop_square:
        cube = cube.crop_square()
    return cube


def _require_square(cube: ImageCube) -> None:
    if cube.width != cube.height:
        raise ShapeError(
            f"input is {cube.width}x{cube.height}; fluctuation analysis needs a "
            "square image (use --crop-square or --crop x y w h)"
        )


# ------------------------------------------------------------------ commands


def cmd_generate(args) -> int:
    if args.generator == "plane":
        cube = gen_plane(args.n)
        params = {"n": args.n}
    elif args.generator == "random":
        cube = gen_random(args.n, args.seed)
        params = {"n": args.n, "seed": args.seed}
    elif args.generator == "hilbert":
        cube = gen_hilbert(args.m, args.seed, args.randomized, args.per_level)
        params = {"m": args.m, "seed": args.seed, "randomized": args.randomized,
                  "per_level": args.per_level}
    else:
        cube = gen_pavement(args.rows, args.cols)
        params = {"rows": args.rows, "cols": args.cols}
    extra = {"tool_version": __version__,
             "generator": {"name": args.generator, **params}}
    out = save_image(cube, args.output, dtype=args.dtype, extra=extra)
    print(f"wrote {out}: {_census_line(cube)}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    cube = _load(args)
    outdir = Path(args.output)
    k_grid = default_k_grid(cube, args.k_step)
    side = min(cube.width, cube.height)
    s_max = args.s_max or max(side // 2, 1)
    square = cube.width == cube.height and side >= 6
    if square:
        sw = analysis_sweep(cube, k_grid, args.workers)
    else:
        sw = sweep(cube, k_grid, range(1, s_max + 1), workers=args.workers)
    surface = surface_from_sweep(sw, s_max)
    _write(outdir / "surface.csv", surface.to_csv())
    provenance = {
        "tool_version": __version__,
        "input": str(args.input),
        "source_provenance": cube.provenance,
        "crop": args.crop,
        "crop_square": args.crop_square,
        "k_step": args.k_step,
        "s_max": s_max,
    }
    if s_max >= 3:
        fit = fit_log_scale(zip(surface.s_grid, surface.S_C[0]), side, "retained")
        _write(outdir / "fit.json", fit.to_json() + "\n")
    _write(outdir / "provenance.json", json.dumps(provenance, indent=2, sort_keys=True) + "\n")
    _require_square(cube)
    if side < 6:
        raise ShapeError("fluctuation analysis needs a side of at least 6")

    delta = io.StringIO()
    delta.write("k,mode,s,dS\n")
    for mode in (COLOR, PATTERN):
        n = len(scale_range(side, mode))
        S = sw.S_C if mode == COLOR else sw.S_H
        for ki, k in enumerate(k_grid):
            row = S[ki, :n]
            for s in range(n - 1):
                delta.write(f"{k},{mode},{s + 1},{fmt(row[s + 1] - row[s])}\n")
    _write(outdir / "delta_entropy.csv", delta.getvalue())
    _write(outdir / "omega_patterns.csv", omega_csv(omegas(cube, k_grid, PATTERN, sw=sw)))
    _write(outdir / "omega_image.csv", omega_csv(omegas(cube, k_grid, COLOR, sw=sw)))
    print(f"analyzed {args.input}: {_census_line(cube)}; outputs in {outdir}")
    return EXIT_OK


def _config_from_args(args) -> LawConfig:
    cfg = LawConfig(k_step=args.k_step, s_max=args.s_max, workers=args.workers)
    if args.probe_scales:
        cfg = LawConfig(**{**cfg.__dict__, "probe_scales": args.probe_scales})
    if args.tol_synthetic:
        cfg = cfg.synthetic()
    overrides = {}
    for name in ("tol_l1", "tol_l2", "tol_l3"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if overrides:
        cfg = LawConfig(**{**cfg.__dict__, **overrides})
    return cfg


def cmd_verify(args) -> int:
    cube = _load(args)
    _require_square(cube)
    report = verify_laws(cube, _config_from_args(args))
    print(report.summary())
    if args.format in ("json", "both"):
        text = report.to_json()
        if args.output:
            _write(Path(args.output), text)
        else:
            sys.stdout.write(text)
    if args.format in ("csv", "both"):
        base = Path(args.output).with_suffix("") if args.output else Path("report")
        outdir = base.parent / (base.name + "_csv")
        _write(outdir / "surface.csv", report.surface.to_csv())
        _write(outdir / "omega_patterns.csv", omega_csv(report.l3_omegas))
        _write(outdir / "omega_image.csv", omega_csv(report.image_omegas))
    if args.strict:
        verdicts = report.verdicts()
        failed = [law for law in args.expect if not verdicts[law]]
        if failed:
            print(f"strict: expected {','.join(failed)} to hold", file=sys.stderr)
            return EXIT_STRICT
    return EXIT_OK


# -------------------------------------------------------------------- parser


def _add_input_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="RAW (.bin/.json) or PNM file")
    p.add_argument("--crop", nargs=4, type=int, metavar=("X", "Y", "W", "H"))
    p.add_argument("--crop-square", action="store_true",
                   help="keep the top-left min(W,H) square")
    p.add_argument("--k-step", type=int, default=1)
    p.add_argument("--s-max", type=int, default=None)
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (default: SCALELAWS_THREADS or CPU count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scalelaws", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic image")
    g.add_argument("generator", choices=("plane", "random", "hilbert", "pavement"))
    g.add_argument("--n", type=int, default=256, help="side for plane/random")
    g.add_argument("--m", type=int, default=8, help="hilbert level, side 2^m")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--randomized", action="store_true")
    g.add_argument("--per-level", action="store_true",
                   help="hilbert: one random permutation per refinement level")
    g.add_argument("--rows", type=int, default=256)
    g.add_argument("--cols", type=int, default=256)
    g.add_argument("--dtype", choices=("u8", "u16", "u32", "f64"), default=None)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="entropy surface, delta-entropy and Omega CSVs")
    _add_input_options(a)
    a.add_argument("-o", "--output", required=True, help="output directory")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="L1/L2/L3 report")
    _add_input_options(v)
    v.add_argument("-o", "--output", default=None, help="JSON report path")
    v.add_argument("--format", choices=("json", "csv", "both"), default="json")
    v.add_argument("--probe-scales", type=_int_list, default=None)
    v.add_argument("--tol-synthetic", action="store_true",
                   help="widened tolerances for generated images")
    v.add_argument("--tol-l1", type=float, default=None)
    v.add_argument("--tol-l2", type=float, default=None)
    v.add_argument("--tol-l3", type=float, default=None)
    v.add_argument("--strict", action="store_true",
                   help="exit 4 when an expected law fails")
    v.add_argument("--expect", type=_law_list, default=LAWS)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ShapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
