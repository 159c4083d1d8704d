"""Command line front end.

Exit codes: 0 on success, 2 when a structural hypothesis fails (including
inadmissible weights and failed demonstrations), 3 when a depth, enumeration,
or precision cap is hit, 64 for usage errors. Outputs never embed timestamps
or machine identity, so a rerun with the same arguments produces
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .conditions import build_report, gl_alignment
from .config import ExperimentConfig, builtin_config, config_digest, load_config
from .errors import (
    DepthCapError,
    EnclosureError,
    EnumerationCapError,
    GridShapeError,
    HypothesisFailure,
    ValidationError,
)
from .fibres import column_address, fibre_vs_section
from .gridset import check_grid_n, encode_pgm, to_pgm
from .ifs import (
    ENUM_CAP_DEFAULT,
    UNIT_SQUARE,
    AffineParams,
    Rect,
    as_fraction,
    format_word,
    parse_word,
)
from .measure import RandomSource, contains_all_words, sample_address
from .scenery import (
    boundary_demo,
    gallery_collect,
    gallery_distance,
    run_zoom_batch,
    sample_typical_prefixes,
    zoom_scales,
)
from .views import approx_view, epsilon_level, is_pattern, pattern_area_bound

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; shells expect 64 for that."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def render_levels(
    sys_, max_level: int, n_grid: int, window: Rect = UNIT_SQUARE
) -> np.ndarray:
    """Grayscale overview of the construction, optionally windowed.

    Each pixel shows the deepest level, up to max_level, whose cylinders meet
    the pixel's closed cell: 255 - floor(255 L / max_level), so deeper is
    darker and untouched background is white. max_level = 0 renders all-dark
    by convention (the level-0 cylinder is the whole square). A window rect
    restricts the image to that part of the square, which keeps deep levels
    affordable because cylinders outside the window are pruned instead of
    enumerated.
    """
    check_grid_n(n_grid)
    if max_level < 0:
        raise ValidationError("max level must be nonnegative")
    if window.width <= 0.0 or window.height <= 0.0:
        raise ValidationError("render window must have positive area")
    if max_level == 0:
        return np.zeros((n_grid, n_grid), dtype=np.uint8)
    level = np.zeros((n_grid, n_grid), dtype=np.int64)
    rf, sf, af, bf = sys_._rf, sys_._sf, sys_._af, sys_._bf
    wx, wy = window.width, window.height
    frontier = [AffineParams(1.0, 1.0, 0.0, 0.0)]
    for L in range(1, max_level + 1):
        if len(frontier) * sys_.m > ENUM_CAP_DEFAULT:
            raise EnumerationCapError(
                f"rendering level {L} needs {len(frontier) * sys_.m} cylinders",
                needed=len(frontier) * sys_.m,
                cap=ENUM_CAP_DEFAULT,
            )
        nxt = []
        for p in frontier:
            for k in range(sys_.m):
                c = AffineParams(
                    p.r * rf[k], p.s * sf[k], p.a + p.r * af[k], p.b + p.s * bf[k]
                )
                if (
                    c.a <= window.x1
                    and c.a + c.r >= window.x0
                    and c.b <= window.y1
                    and c.b + c.s >= window.y0
                ):
                    nxt.append(c)
        frontier = nxt
        for p in frontier:
            xn0, xn1 = (p.a - window.x0) / wx, (p.a + p.r - window.x0) / wx
            yn0, yn1 = (p.b - window.y0) / wy, (p.b + p.s - window.y0) / wy
            i0 = max(0, math.ceil(xn0 * n_grid - 1.0))
            i1 = min(n_grid - 1, math.floor(xn1 * n_grid))
            j0 = max(0, math.ceil(yn0 * n_grid - 1.0))
            j1 = min(n_grid - 1, math.floor(yn1 * n_grid))
            if i0 <= i1 and j0 <= j1:
                level[i0 : i1 + 1, j0 : j1 + 1] = L
    gray = (255 - (255 * level) // max_level).astype(np.uint8)
    return gray.T[::-1, :]


# ---------------------------------------------------------------------------
# plumbing


def _config_of(args) -> ExperimentConfig:
    if args.config is None:
        return builtin_config()
    return load_config(args.config)


def _checked_config(args) -> ExperimentConfig:
    """Config gate for experiment commands.

    Every experiment presumes the structural hypotheses, so a config that
    fails them is refused up front rather than producing meaningless output.
    The check command itself reports instead of refusing.
    """
    cfg = _config_of(args)
    report = build_report(cfg.system, p=cfg.weights.values)
    if not report.ok:
        raise HypothesisFailure("; ".join(report.failures))
    return cfg


def _manifest(cfg: ExperimentConfig, command: str, params: dict, files: list[str]) -> str:
    doc = {
        "tool": "tangentlab",
        "version": __version__,
        "command": command,
        "config_name": cfg.name,
        "config_sha256": config_digest(cfg),
        "params": params,
        "files": files,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands


def _cmd_check(args) -> int:
    cfg = _config_of(args)
    report = build_report(cfg.system, p=cfg.weights.values)
    print(json.dumps(report.to_json_dict(), sort_keys=True, indent=2))
    if not report.ok:
        for line in report.failures:
            print(f"hypothesis failure: {line}", file=sys.stderr)
        return 2
    return 0


def _cmd_sample(args) -> int:
    cfg = _checked_config(args)
    seed = cfg.zoom.seed if args.seed is None else args.seed
    rng = RandomSource(seed)
    words = sample_typical_prefixes(cfg.system, cfg.weights, args.count, args.length, rng)
    text = "\n".join(format_word(u) for u in words) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_view(args) -> int:
    cfg = _checked_config(args)
    t = float(as_fraction(args.scale))
    prefix = parse_word(args.prefix)
    K = cfg.zoom.K if args.levels is None else args.levels
    view = approx_view(cfg.system, prefix, t, K=K)
    pat = is_pattern(view)
    bound = pattern_area_bound(cfg.system, K)
    print(f"scale: {t!r}")
    print(f"depth: {view.depth_n}")
    print(f"level: {view.level}")
    print(f"pieces: {len(view.rects)}")
    print(f"epsilon: {view.epsilon!r}")
    print(f"pattern: {'yes' if pat.is_pattern else 'no'}")
    if pat.reason:
        print(f"reason: {pat.reason}")
    print(f"area: {pat.area!r}")
    print(f"area bound: {bound.value!r} (defined: {bound.defined})")
    if args.out:
        lines = ["x0,x1,y0,y1,word"]
        for u, r in zip(view.words, view.rects):
            lines.append(f"{r.x0!r},{r.x1!r},{r.y0!r},{r.y1!r},{format_word(u)}")
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _cmd_zoom(args) -> int:
    cfg = _checked_config(args)
    z = cfg.zoom
    seed = z.seed if args.seed is None else args.seed
    samples = z.samples if args.samples is None else args.samples
    grid = z.grid if args.grid is None else args.grid
    rng = RandomSource(seed)
    prefixes = sample_typical_prefixes(cfg.system, cfg.weights, samples, z.prefix_len, rng)
    reports = run_zoom_batch(
        cfg.system, cfg.weights, prefixes, z.t0, z.count, rho=z.rho, K=z.K, n_grid=grid
    )
    rows = [r for rep in reports for r in rep.rows]
    pattern_rows = sum(1 for r in rows if r.pattern)
    print(f"points: {len(reports)}")
    print(f"scales per point: {z.count}")
    print(f"pattern rows: {pattern_rows}/{len(rows)}")
    print(f"max grid distance: {max(r.grid_dist for r in rows)!r}")
    print(f"max product deviation: {max(r.product_dev for r in rows)!r}")
    if args.out:
        out = _out_dir(args)
        files = []
        for i, rep in enumerate(reports):
            name = f"zoom_{i:03d}.csv"
            (out / name).write_text(rep.to_csv(), encoding="utf-8")
            files.append(name)
        params = {
            "seed": seed,
            "samples": samples,
            "grid": grid,
            "t0": z.t0,
            "rho": z.rho,
            "count": z.count,
            "K": z.K,
            "prefix_len": z.prefix_len,
        }
        (out / "manifest.json").write_text(
            _manifest(cfg, "zoom", params, files), encoding="utf-8"
        )
    return 0


def _cmd_fibre(args) -> int:
    cfg = _checked_config(args)
    gl = gl_alignment(cfg.system)
    if gl is None:
        raise HypothesisFailure("system has no column structure; fibres are undefined")
    x1 = as_fraction(args.x1)
    addr = column_address(gl, x1, depth=args.level)
    print(f"x1: {args.x1}")
    print(f"column word: {format_word(addr.word)}")
    if addr.ambiguous:
        print(f"alternate: {format_word(addr.alternate)}")
    d = fibre_vs_section(cfg.system, gl, x1, args.level, N=args.grid)
    bound = 2.0 * float(cfg.system.s_max) ** args.level + 2.0 / args.grid
    print(f"distance: {d!r}")
    print(f"bound: {bound!r}")
    return 0


def _cmd_gallery(args) -> int:
    cfg = _checked_config(args)
    g = cfg.gallery
    grid = g.grid if args.grid is None else args.grid
    rho = g.rho if g.rho is not None else float(cfg.system.s_min)
    scales = zoom_scales(g.t0, rho, g.count)
    galleries = []
    for seed in g.seeds:
        u = sample_address(cfg.weights, g.prefix_len, RandomSource(seed))
        if not contains_all_words(u, 2, cfg.system.m):
            raise HypothesisFailure(
                f"address from seed {seed} misses some two-letter word; "
                "not typical enough for a gallery comparison"
            )
        galleries.append(gallery_collect(cfg.system, u, scales, grid))
    lines = []
    for d in range(1, g.count + 1):
        dist = gallery_distance(galleries[0].truncated(d), galleries[1].truncated(d))
        lines.append((d, dist))
        print(f"D_{d}: one_sided {dist.one_sided!r} symmetric {dist.symmetric!r}")
    eps = epsilon_level(cfg.system, 3)
    print(f"reference 4*eps_3 + 4*sqrt(2)/N: {4.0 * eps + 4.0 * math.sqrt(2.0) / grid!r}")
    if args.out:
        out = _out_dir(args)
        files = []
        for seed, gal in zip(g.seeds, galleries):
            for k, gs in enumerate(gal.grids):
                name = f"gallery_seed{seed}_{k:02d}.pgm"
                (out / name).write_bytes(to_pgm(gs))
                files.append(name)
        csv = "d,one_sided,symmetric\n" + "\n".join(
            f"{d},{v.one_sided!r},{v.symmetric!r}" for d, v in lines
        ) + "\n"
        (out / "distances.csv").write_text(csv, encoding="utf-8")
        files.append("distances.csv")
        params = {
            "seeds": list(g.seeds),
            "grid": grid,
            "t0": g.t0,
            "rho": rho,
            "count": g.count,
            "prefix_len": g.prefix_len,
        }
        (out / "manifest.json").write_text(
            _manifest(cfg, "gallery", params, files), encoding="utf-8"
        )
    return 0


def _cmd_render(args) -> int:
    cfg = _checked_config(args)
    img = render_levels(cfg.system, args.level, args.grid)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(encode_pgm(img))
    params = {"grid": args.grid, "level": args.level}
    out.with_suffix(out.suffix + ".manifest.json").write_text(
        _manifest(cfg, "render", params, [out.name]), encoding="utf-8"
    )
    print(f"wrote {out}")
    return 0


def _cmd_boundary(args) -> int:
    cfg = _checked_config(args)
    demo = boundary_demo(cfg.system, args.side, n_grid=args.grid)
    half = args.grid // 2
    for t, b in zip(demo.scales, demo.column_bounds):
        print(f"t: {t!r} extreme column: {b} (half: {half})")
    if args.out:
        out = _out_dir(args)
        files = []
        for k, gs in enumerate(demo.grids):
            name = f"boundary_{demo.side}_{k:02d}.pgm"
            (out / name).write_bytes(to_pgm(gs))
            files.append(name)
        params = {"side": demo.side, "grid": args.grid, "letter": demo.letter}
        (out / "manifest.json").write_text(
            _manifest(cfg, "boundary-demo", params, files), encoding="utf-8"
        )
    if not demo.ok:
        raise HypothesisFailure(
            f"{demo.side} boundary zooms leaked past the window midline"
        )
    print("boundary persists under magnification")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="tangentlab",
        description="Magnified views, zoom scenery, and fibre checks for "
        "planar self-affine carpets.",
    )
    parser.add_argument("--version", action="version", version=f"tangentlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON config file (default: builtin e6)")

    p = sub.add_parser("check", help="verify structural hypotheses")
    common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("sample", help="sample typical address prefixes")
    common(p)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--length", type=int, default=64)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="write words here instead of stdout")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("view", help="normalized magnified view at one scale")
    common(p)
    p.add_argument("--prefix", required=True, help="address word, e.g. 1.2.1")
    p.add_argument("--scale", required=True, help="window side t, e.g. 1/250")
    p.add_argument("--levels", type=int, default=None, help="extra levels K")
    p.add_argument("--out", help="CSV of view pieces")
    p.set_defaults(func=_cmd_view)

    p = sub.add_parser("zoom", help="zoom ladders at sampled points")
    common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--out", help="directory for per-point CSV reports")
    p.set_defaults(func=_cmd_zoom)

    p = sub.add_parser("fibre", help="fibre cover vs vertical section")
    common(p)
    p.add_argument("--x1", required=True, help="abscissa, e.g. 1/3 or 0.25")
    p.add_argument("--level", type=int, default=4)
    p.add_argument("--grid", type=int, default=1024)
    p.set_defaults(func=_cmd_fibre)

    p = sub.add_parser("gallery", help="compare sceneries of two typical points")
    common(p)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--out", help="directory for PGM frames and distances")
    p.set_defaults(func=_cmd_gallery)

    p = sub.add_parser("render", help="overview PGM of the construction")
    common(p)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--out", required=True, help="output PGM path")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("boundary-demo", help="zooms at a vertical-edge fixed point")
    common(p)
    p.add_argument("--side", required=True, choices=("left", "right"))
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--out", help="directory for PGM frames")
    p.set_defaults(func=_cmd_boundary)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HypothesisFailure as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return 2
    except (DepthCapError, EnumerationCapError, EnclosureError) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValidationError, GridShapeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
