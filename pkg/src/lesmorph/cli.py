"""Command-line front end.

    lesmorph filter --op dilate --sup les --se square:1 -i in.png -o out.png
    lesmorph sup --sup rles 0,0,1 0.6,0.4,0.2 0.3333333333333333,0.3333333333333333,0.8333333333333334
    lesmorph verify [--json]
    lesmorph dump 1,1,1 0.5,0.5,0.5

Exit codes: 0 success, 1 usage, 2 I/O, 3 numeric or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import morphology as morph
from .colorspace import OutOfGamutError, matrix_to_bicone, matrix_to_rgb, rgb_to_matrix
from .golden import GOLDEN_TOL, run_golden
from .spectral import DomainError, eig_sym, entries
from .supremum import SUPREMA, SupTolerances

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
OPERATORS = {"dilate": morph.dilate, "erode": morph.erode, "open": morph.opening, "close": morph.closing}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class CliConfig:
    command: str
    input: str | None = None
    output: str | None = None
    op: str = "dilate"
    sup: str = "les"
    se: str | None = None
    se_file: str | None = None
    range_mode: str = "fixed"
    tie_tol: float = 1e-9
    align_tol: float = 1e-9
    workers: int | None = None

    @property
    def tolerances(self) -> SupTolerances:
        return SupTolerances(self.tie_tol, self.align_tol)


def _fmt(v) -> str:
    return "%.17g" % v


def _nonneg(text: str) -> float:
    v = float(text)
    if not v >= 0.0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def parse_colour(text: str) -> np.ndarray:
    parts = text.replace(",", " ").split()
    if len(parts) != 3:
        raise UsageError(f"colour {text!r} must have three components r,g,b")
    try:
        rgb = np.array([float(p) for p in parts])
    except ValueError:
        raise UsageError(f"colour {text!r} is not numeric") from None
    if not (np.all(np.isfinite(rgb)) and rgb.min() >= 0.0 and rgb.max() <= 1.0):
        raise UsageError(f"colour {text!r} has components outside [0, 1]")
    return rgb


def _colours(args) -> np.ndarray:
    tokens = list(args.colours)
    if getattr(args, "file", None):
        with open(args.file, encoding="utf-8") as fh:
            tokens += [ln.split("#", 1)[0].strip() for ln in fh]
        tokens = [t for t in tokens if t]
    if not tokens:
        raise UsageError("at least one colour is required")
    return np.stack([parse_colour(t) for t in tokens])


def read_png(path: str):
    """8-bit image as floats in [0, 1] plus the untouched alpha channel (or None)."""
    with Image.open(path) as im:
        im.load()
        if im.mode not in ("RGB", "RGBA", "L", "LA", "P"):
            raise OSError(f"{path}: unsupported image mode {im.mode}")
        if im.mode == "P":
            im = im.convert("RGBA" if "transparency" in im.info else "RGB")
        alpha = np.asarray(im.getchannel("A")) if im.mode in ("RGBA", "LA") else None
        rgb = np.asarray(im.convert("RGB"), dtype=float) / 255.0
    return rgb, alpha


def quantise(rgb: np.ndarray) -> np.ndarray:
    return np.floor(np.clip(rgb, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def write_png(path: str, rgb: np.ndarray, alpha=None) -> None:
    data = quantise(rgb)
    if alpha is not None:
        Image.fromarray(np.dstack([data, alpha]), "RGBA").save(path, format="PNG")
    else:
        Image.fromarray(data, "RGB").save(path, format="PNG")


def cmd_filter(cfg: CliConfig) -> int:
    if (cfg.se is None) == (cfg.se_file is None):
        raise UsageError("give exactly one of --se or --se-file")
    text = None
    if cfg.se_file:
        with open(cfg.se_file, encoding="utf-8") as fh:
            text = fh.read()
    try:
        b = morph.parse_se(cfg.se) if cfg.se else morph.parse_se_file(io.StringIO(text))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rgb, alpha = read_png(cfg.input)
    kw = {"tol": cfg.tolerances, "workers": cfg.workers}
    if cfg.op != "dilate":
        kw["range_mode"] = cfg.range_mode
    out = OPERATORS[cfg.op](rgb, b, cfg.sup, **kw)
    write_png(cfg.output, out, alpha)
    return EXIT_OK


def cmd_sup(args, cfg: CliConfig) -> int:
    rgb = _colours(args)
    S = SUPREMA[cfg.sup](rgb_to_matrix(rgb), cfg.tolerances)
    lam, mu, phi = eig_sym(*entries(S))
    a11, a12, a22 = entries(S)
    out = sys.stdout
    print(f"supremum {cfg.sup} of {len(rgb)} colour(s)", file=out)
    print(f"matrix    {_fmt(a11)} {_fmt(a12)}", file=out)
    print(f"          {_fmt(a12)} {_fmt(a22)}", file=out)
    print(f"eigen     lam={_fmt(lam)} mu={_fmt(mu)} angle={_fmt(phi)}", file=out)
    print("rgb       " + " ".join(_fmt(v) for v in matrix_to_rgb(S)), file=out)
    return EXIT_OK


def cmd_verify(args, cfg: CliConfig) -> int:
    results = run_golden(cfg.tolerances)
    ok = all(r.passed for r in results)
    if args.json:
        json.dump({"passed": ok, "tolerance": GOLDEN_TOL,
                   "cases": [{"name": r.name, "deviation": r.deviation, "passed": r.passed} for r in results]},
                  sys.stdout, indent=2)
        print()
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<28} max deviation {r.deviation:.3e}")
        print("all golden cases pass" if ok else "golden verification FAILED")
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_dump(args, cfg: CliConfig) -> int:
    rgb = _colours(args)
    A = rgb_to_matrix(rgb)
    p = matrix_to_bicone(A)
    a11, _, a22 = entries(A)
    lam, mu, phi = eig_sym(*entries(A))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["r", "g", "b", "x", "y", "z", "radius", "lam", "mu", "angle"])
    radius = (a11 + a22) / np.sqrt(2.0)
    for i in range(len(rgb)):
        w.writerow([_fmt(v) for v in (*rgb[i], *p[i], radius[i], lam[i], mu[i], phi[i])])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lesmorph", description="Colour morphology with the log-exp supremum.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def tolerances(sp):
        sp.add_argument("--tie-tol", type=_nonneg, default=1e-9, help="eigenvalue tie threshold")
        sp.add_argument("--align-tol", type=_nonneg, default=1e-9, help="eigenvector alignment threshold")

    f = sub.add_parser("filter", help="filter a PNG image")
    f.add_argument("--op", choices=sorted(OPERATORS), required=True)
    f.add_argument("--sup", choices=["les", "rles"], default="les")
    se = f.add_mutually_exclusive_group(required=True)
    se.add_argument("--se", help="shape:radius with shape in " + ", ".join(morph.SHAPES))
    se.add_argument("--se-file", help="text file with lines 'dx dy [x y z]'")
    f.add_argument("--range", dest="range_mode", choices=["fixed", "image"], default="fixed",
                   help="complement range for erosion: (0,1) or the image's channel extrema")
    f.add_argument("-i", "--input", required=True)
    f.add_argument("-o", "--output", required=True)
    f.add_argument("--workers", type=int, default=None)
    tolerances(f)

    s = sub.add_parser("sup", help="supremum of a list of RGB colours")
    s.add_argument("--sup", choices=sorted(SUPREMA), default="les")
    s.add_argument("--file", help="file with one r,g,b colour per line")
    s.add_argument("colours", nargs="*", metavar="R,G,B")
    tolerances(s)

    v = sub.add_parser("verify", help="check the reference examples")
    v.add_argument("--json", action="store_true")
    tolerances(v)

    d = sub.add_parser("dump", help="bi-cone coordinates and eigenpairs as CSV")
    d.add_argument("--file", help="file with one r,g,b colour per line")
    d.add_argument("colours", nargs="*", metavar="R,G,B")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = CliConfig(
            command=args.command,
            input=getattr(args, "input", None),
            output=getattr(args, "output", None),
            op=getattr(args, "op", "dilate"),
            sup=getattr(args, "sup", "les"),
            se=getattr(args, "se", None),
            se_file=getattr(args, "se_file", None),
            range_mode=getattr(args, "range_mode", "fixed"),
            tie_tol=getattr(args, "tie_tol", 1e-9),
            align_tol=getattr(args, "align_tol", 1e-9),
            workers=getattr(args, "workers", None),
        )
        if cfg.command == "filter":
            return cmd_filter(cfg)
        if cfg.command == "sup":
            return cmd_sup(args, cfg)
        if cfg.command == "verify":
            return cmd_verify(args, cfg)
        return cmd_dump(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, UnidentifiedImageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OutOfGamutError, DomainError, ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
