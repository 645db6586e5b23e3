"""Command-line entry point: zeros, classify, index, cfrac, rh-audit, render.

Exit status is 0 on success, 1 on a domain error (the computation cannot be
done as asked) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

import mpmath

from . import family as fam
from .audit import rh_audit
from .basin import Palette, RenderSpec, emit_image, render
from .cache import CONFIG_ENV, Config, ZeroCache
from .dynamics import MapKind, as_callable, fixed_point_report, index_quadrature, orbit
from .errors import ZetadynError
from .rotation import rotation_row
from .zeros import BINARY64_DIGITS, find_zeros

log = logging.getLogger("zetadyn")

# options whose values may start with '-'
_VALUE_OPTS = ("--region", "--alpha", "--orbit", "--range", "--a", "--kappa")


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ parsing

def parse_complex(text: str) -> complex:
    """'re,im' or a Python complex literal ('0.5+14.1j', 'i' allowed)."""
    t = text.strip()
    try:
        if "," in t:
            re_, im_ = t.split(",")
            return complex(float(re_), float(im_))
        return complex(t.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_span(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if not a < b:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return a, b


def parse_indices(text: str) -> list[int]:
    """'1:20', '1,2,3', or a mix such as '1:4,10,100' (inclusive ranges)."""
    out: list[int] = []
    try:
        for part in text.split(","):
            if ":" in part:
                a, b = (int(x) for x in part.split(":"))
                out.extend(range(a, b + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad index list {text!r}") from None
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"indices must be >= 1 in {text!r}")
    return sorted(set(out))


def parse_region(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(x) for x in text.split(":"))
    except ValueError:
        vals = ()
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"expected RE_LO:RE_HI:IM_LO:IM_HI, got {text!r}")
    return vals


def parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("size must be positive")
    return w, h


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common options")
    g.add_argument("--config", metavar="FILE",
                   help=f"key = value settings file (default: ${CONFIG_ENV} if set)")
    g.add_argument("--cache-dir", metavar="DIR",
                   help="zero cache directory (default: $ZETADYN_CACHE_DIR or ~/.cache/zetadyn)")
    g.add_argument("--threads", type=_positive_int, metavar="N", help="cap on worker threads")
    g.add_argument("--pretty", action="store_true", help="aligned text instead of JSON/CSV")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def _function_args(p: argparse.ArgumentParser, default: str | None = "zeta") -> None:
    p.add_argument("--function", default=default, choices=("zeta", "xi", "eta", "chi", "cosh"),
                   help="analytic function g (default: %(default)s)")
    p.add_argument("--m", type=_positive_int, default=1, help="chi: multiplicity of the extra zero")
    p.add_argument("--a", type=parse_complex, default=complex(1.2),
                   help="chi: location of the extra zero (default: 1.2)")
    p.add_argument("--map", dest="map_kind", default="nu", choices=("nu", "newton"),
                   help="nu-map or relaxed Newton map (default: %(default)s)")
    p.add_argument("--kappa", type=parse_complex, default=complex(1.0),
                   help="Newton relaxation constant, |kappa - 1| < 1 (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zetadyn",
        description="Fixed points of nu-maps and Newton maps of zeta and relatives.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("zeros", help="scan and cache critical-line zeros")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--range", type=parse_span, metavar="LO:HI", help="ordinate range")
    grp.add_argument("--count", type=_positive_int, metavar="N", help="first N zeros")
    p.add_argument("--digits", type=_positive_int, help="certified digits (default: config)")
    p.add_argument("--out", metavar="FILE", help="also write the records to this CSV")
    p.add_argument("--no-cache", action="store_true", help="do not touch the zero cache")
    _common(p)

    p = sub.add_parser("classify", help="fixed-point report(s) as JSON")
    _function_args(p)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--alpha", type=parse_complex, help="fixed point, 're,im' or '0.5+14.1j'")
    grp.add_argument("--all-cached", action="store_true", help="every cached zero (or --zeros)")
    p.add_argument("--zeros", type=parse_indices, metavar="LIST",
                   help="zero indices for --all-cached, e.g. 1:20")
    p.add_argument("--order", type=_positive_int, help="order of the zero, if known")
    p.add_argument("--no-quadrature", action="store_true", help="skip the contour index")
    _common(p)

    p = sub.add_parser("index", help="closed-form vs quadrature holomorphic index")
    _function_args(p)
    p.add_argument("--alpha", type=parse_complex, required=True, help="fixed point")
    p.add_argument("--radius", type=float, help="contour radius (default: automatic)")
    p.add_argument("--nodes", type=_positive_int, default=256, help="initial node count")
    _common(p)

    p = sub.add_parser("cfrac", help="rotation numbers and continued fractions of zeros")
    p.add_argument("--n", dest="indices", type=parse_indices, default=parse_indices("1:4"),
                   metavar="LIST", help="zero indices (default: 1:4)")
    p.add_argument("--digits", type=_positive_int, default=30,
                   help="precision of the zeros (default: %(default)s)")
    p.add_argument("--terms", type=_positive_int, default=50,
                   help="quotients to print (default: %(default)s)")
    _common(p)

    p = sub.add_parser("rh-audit", help="fixed-point audit of the first zeros")
    _function_args(p)
    p.add_argument("--zeros", type=parse_indices, default=parse_indices("1:20"),
                   metavar="LIST", help="zero indices (default: 1:20)")
    p.add_argument("--scan-size", type=parse_size, default=(100, 100),
                   help="Newton stripe scan resolution (default: 100x100)")
    p.add_argument("--no-quadrature", action="store_true", help="skip the contour indices")
    p.add_argument("--reports", action="store_true", help="include every report in the JSON")
    _common(p)

    p = sub.add_parser("render", help="basin raster to PPM/PNG with a JSON sidecar")
    p.add_argument("--spec", metavar="FILE", help="RenderSpec JSON (e.g. a previous sidecar)")
    _function_args(p)
    p.add_argument("--region", type=parse_region, metavar="RE_LO:RE_HI:IM_LO:IM_HI")
    p.add_argument("--size", type=parse_size, default=(400, 400), help="WIDTHxHEIGHT")
    p.add_argument("--out", required=True, help="output .ppm (or .png)")
    p.add_argument("--max-iter", type=_positive_int, help="default 200")
    p.add_argument("--conv-tol", type=float, help="default from config (1e-8)")
    p.add_argument("--escape-radius", type=float, default=1e6)
    p.add_argument("--targets", choices=("auto", "none"), default="auto",
                   help="auto: known zeros near the region; none: discover all")
    p.add_argument("--palette", choices=("basins", "gray"), default="basins")
    p.add_argument("--no-shade", action="store_true", help="flat target colours")
    p.add_argument("--boundary", action="store_true", help="draw basin boundaries in white")
    p.add_argument("--orbit", type=parse_complex, metavar="SEED",
                   help="overlay the orbit of this seed")
    p.add_argument("--orbit-iter", type=_positive_int, default=5000,
                   help="orbit overlay length (default: %(default)s)")
    p.add_argument("--budget", type=_positive_int, help="pixel budget")
    _common(p)
    return parser


def _join_values(argv: list[str]) -> list[str]:
    """Turn '--region -20:10:-1:39' into '--region=-20:10:-1:39'."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


# ------------------------------------------------------------------ helpers

def load_config(args) -> Config:
    path = args.config or os.environ.get(CONFIG_ENV)
    cfg = Config.from_file(path) if path else Config()
    return cfg.merged(cache_dir=args.cache_dir, threads=args.threads,
                      budget=getattr(args, "budget", None))


def _function(args) -> fam.AnalyticFunction:
    if args.function == "chi":
        return fam.chi(args.m, args.a)
    return fam.by_name(args.function)


def _kind(args) -> MapKind:
    return MapKind.nu() if args.map_kind == "nu" else MapKind.newton(args.kappa)


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _record_dict(r) -> dict:
    from .zeros import _fmt_gamma

    return {"index": r.index, "gamma": _fmt_gamma(r), "precision_digits": r.precision_digits,
            "residual": float(r.residual), "method": r.method}


def _table(rows: list[list], header: list[str]) -> str:
    cells = [header] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


def _emit(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _fmt_c(z, digits=12) -> str:
    z = complex(z)
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}i"


# ----------------------------------------------------------------- commands

def cmd_zeros(args, cfg: Config) -> str:
    digits = args.digits or cfg.digits
    cache = None if args.no_cache else ZeroCache(cfg.cache_path)
    if args.range:
        lo, hi = args.range
        recs = cache.scan(lo, hi, digits) if cache else find_zeros(lo, hi, digits)
    else:
        if cache is None:
            from .zeros import zeros_up_to_index

            recs = zeros_up_to_index(args.count, digits)
        else:
            recs = cache.get(range(1, args.count + 1), digits)
    if args.out:
        from .zeros import store_zeros

        store_zeros(recs, args.out)
    if args.pretty:
        rows = [[r.index, _record_dict(r)["gamma"], r.precision_digits, f"{r.residual:.2e}",
                 r.method] for r in recs]
        return _table(rows, ["index", "gamma", "digits", "residual", "method"])
    return _emit({"records": [_record_dict(r) for r in recs]})


def _report_rows(reports) -> str:
    rows = [[_fmt_c(r.alpha), r.source, r.order, _fmt_c(r.multiplier), _fmt_c(r.index_closed_form),
             "-" if r.index_quadrature is None else _fmt_c(r.index_quadrature),
             r.classification, f"{r.classification_margin:+.3e}"] for r in reports]
    return _table(rows, ["alpha", "source", "order", "lambda", "iota", "iota_quad", "class",
                         "margin"])


def cmd_classify(args, cfg: Config) -> str:
    g, kind = _function(args), _kind(args)
    quad = not args.no_quadrature
    if args.all_cached:
        cache = ZeroCache(cfg.cache_path)
        if args.zeros:
            recs = cache.get(args.zeros, BINARY64_DIGITS)
        else:
            recs = [cache.records[k] for k in sorted(cache.records)]
        if not recs:
            raise ZetadynError("the zero cache is empty; run 'zetadyn zeros' first")
        known = [complex(0.5, float(r.gamma)) for r in recs]
        reports = [fixed_point_report(g, kind, a, quadrature=quad, polish=True,
                                      other_fixed_points=known) for a in known]
        if args.pretty:
            return _report_rows(reports)
        return _emit([r.to_json_dict() for r in reports])
    rep = fixed_point_report(g, kind, args.alpha, order_hint=args.order, quadrature=quad)
    if args.pretty:
        return _report_rows([rep])
    return _emit(rep.to_json_dict())


def cmd_index(args, cfg: Config) -> str:
    g, kind = _function(args), _kind(args)
    rep = fixed_point_report(g, kind, args.alpha, quadrature=False)
    others = [p for p, _ in g.declared_zeros] + [p for p, _ in g.declared_poles]
    iq = index_quadrature(as_callable(g, kind), rep.alpha, args.radius, args.nodes, others)
    out = {"alpha": _c(rep.alpha), "iota_closed": _c(rep.index_closed_form), "iota_quad": _c(iq),
           "difference": abs(iq - rep.index_closed_form),
           "radius": args.radius if args.radius is not None else "auto", "nodes": args.nodes}
    if args.pretty:
        return _table([[_fmt_c(rep.alpha), _fmt_c(rep.index_closed_form, 15), _fmt_c(iq, 15),
                        f"{out['difference']:.3e}"]],
                      ["alpha", "iota_closed", "iota_quad", "difference"])
    return _emit(out)


def cmd_cfrac(args, cfg: Config) -> str:
    cache = ZeroCache(cfg.cache_path)
    recs = cache.get(args.indices, args.digits)
    rows = [rotation_row(n, args.digits, recs, args.terms) for n in args.indices]
    if args.pretty:
        body = [[r.n, mpmath.nstr(r.gamma, 12), mpmath.nstr(r.theta, 8), r.certified_count,
                 r.expansion.format()] for r in rows]
        return _table(body, ["n", "gamma", "theta", "certified", "quotients"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "gamma", "theta", "certified_count", "quotients"])
    for r in rows:
        w.writerow([r.n, mpmath.nstr(r.gamma, args.digits), mpmath.nstr(r.theta, args.digits),
                    r.certified_count, r.expansion.format()])
    return buf.getvalue()


def cmd_rh_audit(args, cfg: Config) -> str:
    g, kind = _function(args), _kind(args)
    cache = ZeroCache(cfg.cache_path)
    recs = cache.get(args.zeros, BINARY64_DIGITS)
    v = rh_audit(recs, g, kind, quadrature=not args.no_quadrature, scan_size=args.scan_size,
                 threads=cfg.threads)
    if args.pretty:
        head = (f"{v.summary}\n{v.reason}\nin-strip fixed points: {v.in_strip}, "
                f"indifferent: {v.indifferent}\n")
        if kind.kind == "nu":
            head += (f"max |Re iota - m/2|: {v.max_re_iota_deviation:.3e}, "
                     f"max ||lambda|-1|: {v.max_modulus_gap:.3e}\n")
        if v.symmetry_residual is not None:
            head += f"symmetry residual: {v.symmetry_residual:.3e}\n"
        return head + _report_rows(v.reports)
    d = v.to_json_dict()
    if not args.reports:
        d.pop("reports")
    return _emit(d)


def _auto_targets(g, region, cfg: Config):
    """Critical-line zeros near the region plus declared zeros."""
    re_lo, re_hi, im_lo, im_hi = region
    targets = [complex(p) for p, _ in g.declared_zeros]
    if g.name in ("zeta", "eta", "xi", "chi"):
        top = min(max(abs(im_lo), abs(im_hi)) + 10.0, 1000.0)
        cache = ZeroCache(cfg.cache_path)
        for r in cache.scan(0.0, top, BINARY64_DIGITS):
            targets += [complex(0.5, float(r.gamma)), complex(0.5, -float(r.gamma))]
    return tuple(targets)


def cmd_render(args, cfg: Config) -> str:
    if args.spec:
        with open(args.spec) as fh:
            d = json.load(fh)
        spec = RenderSpec.from_dict(d.get("spec", d))
    else:
        if args.region is None:
            raise UsageError("render needs --region or --spec")
        g, kind = _function(args), _kind(args)
        w, h = args.size
        targets = _auto_targets(g, args.region, cfg) if args.targets == "auto" else ()
        spec = RenderSpec(g, kind, args.region, w, h,
                          max_iter=args.max_iter or 200,
                          conv_tol=args.conv_tol or cfg.conv_tol,
                          escape_radius=args.escape_radius, known_targets=targets,
                          budget=cfg.budget)
    raster = render(spec, threads=cfg.threads)
    pal = Palette(grayscale=args.palette == "gray", shade=not args.no_shade,
                  boundary=(255, 255, 255) if args.boundary else None)
    pts = None
    if args.orbit is not None:
        ob = orbit(spec.g, spec.kind, args.orbit, max_iter=args.orbit_iter,
                   escape_radius=spec.escape_radius, targets=spec.known_targets,
                   conv_tol=spec.conv_tol)
        pts = ob.points
    path = emit_image(raster, pal, args.out, overlay=pts)
    out = {"out": path, "sidecar": path + ".json", "counts": raster.counts(),
           "targets": len(raster.targets)}
    if pts is not None:
        out["orbit"] = {"seed": _c(args.orbit), "points": len(pts)}
    if args.pretty:
        return "".join(f"{k}: {v}\n" for k, v in out.items())
    return _emit(out)


COMMANDS = {"zeros": cmd_zeros, "classify": cmd_classify, "index": cmd_index,
            "cfrac": cmd_cfrac, "rh-audit": cmd_rh_audit, "render": cmd_render}


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        text = COMMANDS[args.command](args, cfg)
    except (ZetadynError, OSError) as exc:
        print(f"zetadyn {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError) as exc:
        # bad values that parsed but are out of range, or unreadable files
        print(f"zetadyn {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
