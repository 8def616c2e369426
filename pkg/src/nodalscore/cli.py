"""Command line front end.

Subcommands: interval, square, rational-check, paley, torus, graph.  Every
flag can also come from a JSON file via --config (explicit flags win), and
every run that writes an output file also writes `<out>.config.json` with
the effective configuration.  Summaries are stable key=value lines on
stdout.  Exit codes: 0 on success, 2 on usage errors, 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import analytic, paley, pipeline, torus
from .core import find_strict_local_minima

__all__ = ["main", "entry"]


def _fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _summary(items):
    print(" ".join(f"{k}={_fmt(v)}" for k, v in items))


def _write_config(out_path, effective):
    path = f"{out_path}.config.json"
    with open(path, "w") as fh:
        json.dump(effective, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _merge(args, parser, keys):
    """Fill unset flags from --config JSON; explicit flags take precedence."""
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read --config: {exc}")
        if not isinstance(cfg, dict):
            parser.error("--config must hold a JSON object")
        unknown = set(cfg) - set(keys)
        if unknown:
            parser.error(f"unknown config keys: {sorted(unknown)}")
    merged = {}
    for key, default in keys.items():
        cli_val = getattr(args, key.replace("-", "_"))
        if cli_val is not None:
            merged[key] = cli_val
        elif key in cfg:
            merged[key] = cfg[key]
        else:
            merged[key] = default
    return merged


def _require(parser, merged, *names):
    for name in names:
        if merged[name] is None:
            parser.error(f"--{name} is required (flag or config)")


def _parse_grid_2d(parser, text):
    parts = text.lower().split("x")
    if len(parts) != 2:
        parser.error("--grid must look like MxM")
    try:
        mx, my = int(parts[0]), int(parts[1])
    except ValueError:
        parser.error("--grid must look like MxM")
    if mx < 2 or my < 2:
        parser.error("--grid sides must be >= 2")
    return mx, my


def _cmd_interval(args, parser):
    keys = {
        "n-terms": None,
        "grid": None,
        "find-minima": False,
        "out": None,
        "seed": 0,
    }
    merged = _merge(args, parser, keys)
    _require(parser, merged, "n-terms", "grid", "out")
    n_terms = int(merged["n-terms"])
    grid = int(merged["grid"])
    if grid < 1:
        parser.error("--grid must be >= 1")
    xs = np.arange(grid + 1) / grid
    values = analytic.interval_score_grid(xs, n_terms)
    out = merged["out"]
    pipeline.write_score_csv(values, out)
    _write_config(out, merged)
    items = [
        ("points", grid + 1),
        ("n_terms", n_terms),
        ("min_index", int(np.argmin(values))),
        ("min_x", float(xs[np.argmin(values)])),
        ("min_value", float(values.min())),
        ("max_value", float(values.max())),
    ]
    if merged["find-minima"]:
        minima = find_strict_local_minima(values, "grid-1d")
        items.append(("minima_count", minima.size))
        items.append(("minima_x", ";".join(format(x, ".17g") for x in xs[minima])))
    _summary(items)
    return 0


def _cmd_square(args, parser):
    keys = {
        "lambda-cut": None,
        "grid": None,
        "out": None,
        "pgm": None,
        "seed": 0,
    }
    merged = _merge(args, parser, keys)
    _require(parser, merged, "lambda-cut", "grid", "out")
    mx, my = _parse_grid_2d(parser, str(merged["grid"]))
    lam = float(merged["lambda-cut"])
    # interior lattice of the open square; the boundary scores 0 trivially
    xs = np.arange(1, mx + 1) / (mx + 1)
    ys = np.arange(1, my + 1) / (my + 1)
    gx, gy = np.meshgrid(xs, ys)
    values = analytic.square_score_grid(gx.ravel(), gy.ravel(), lam)
    out = merged["out"]
    pipeline.write_score_csv(values, out)
    _write_config(out, merged)
    if merged["pgm"]:
        pipeline.write_heatmap_pgm(values, mx, my, merged["pgm"])
    amin = int(np.argmin(values))
    _summary(
        [
            ("points", values.size),
            ("lambda_cut", lam),
            ("argmin_x", float(gx.ravel()[amin])),
            ("argmin_y", float(gy.ravel()[amin])),
            ("min_value", float(values.min())),
            ("max_value", float(values.max())),
        ]
    )
    return 0


def _cmd_rational_check(args, parser):
    keys = {"p": None, "q": None, "n-terms": None, "step": None, "out": None, "seed": 0}
    merged = _merge(args, parser, keys)
    _require(parser, merged, "p", "q")
    point = analytic.RationalPoint(int(merged["p"]), int(merged["q"]))
    n_terms = int(merged["n-terms"]) if merged["n-terms"] is not None else point.q**2
    step = float(merged["step"]) if merged["step"] is not None else 1.0 / (8 * point.q**2)
    merged["n-terms"], merged["step"] = n_terms, step
    strict = analytic.check_rational_minimum(point, n_terms, step)
    items = [
        ("p", point.p),
        ("q", point.q),
        ("n_terms", n_terms),
        ("step", step),
        ("strict_minimum", strict),
        ("center_value", analytic.interval_score(point.x, n_terms)),
    ]
    if merged["out"]:
        with open(merged["out"], "wb") as fh:
            fh.write(" ".join(f"{k}={_fmt(v)}" for k, v in items).encode() + b"\n")
        _write_config(merged["out"], merged)
    _summary(items)
    return 0


def _cmd_paley(args, parser):
    keys = {"p": None, "verify": False, "out": None, "seed": 0}
    merged = _merge(args, parser, keys)
    _require(parser, merged, "p")
    p = int(merged["p"])
    if p % 4 != 1 or p < 5:
        parser.error(f"--p {p} must be a prime congruent to 1 mod 4")
    try:
        score = paley.paley_score_closed_form(p)
    except ValueError as exc:
        parser.error(str(exc))
    items = [
        ("p", p),
        ("s_zero", score.s_zero.real),
        ("s_residue", score.s_residue.real),
        ("s_nonresidue", score.s_nonresidue.real),
        ("distinct_values", 3),
    ]
    if merged["verify"]:
        numeric = paley.paley_score_numeric(p)
        deviation = float(np.abs(numeric.per_vertex - score.per_vertex).max())
        items.append(("verify_max_deviation", deviation))
        items.append(("verify_pass", deviation <= 1e-10))
    if merged["out"]:
        pipeline.write_score_csv(score.per_vertex.real, merged["out"])
        _write_config(merged["out"], merged)
    _summary(items)
    return 0


def _cmd_torus(args, parser):
    keys = {
        "y": None,
        "eps": None,
        "bump": "constant",
        "n-grid": 512,
        "n-terms": None,
        "find-n-eps": None,
        "out": None,
        "seed": 0,
    }
    merged = _merge(args, parser, keys)
    _require(parser, merged, "y", "eps")
    if (merged["n-terms"] is None) == (merged["find-n-eps"] is None):
        parser.error("set exactly one of --n-terms and --find-n-eps")
    bump = {"constant": "constant-well", "cosine": "cosine-well"}.get(merged["bump"])
    if bump is None:
        parser.error("--bump must be constant or cosine")
    spec = torus.PotentialSpec(y=float(merged["y"]), eps=float(merged["eps"]), bump=bump)
    n_grid = int(merged["n-grid"])
    items = [("y", spec.y), ("eps", spec.eps), ("bump", merged["bump"]), ("n_grid", n_grid)]
    if merged["find-n-eps"] is not None:
        n_eps = torus.find_N_eps(spec, n_grid, int(merged["find-n-eps"]), seed=int(merged["seed"]))
        items.append(("n_eps", n_eps))
    else:
        n_terms = int(merged["n-terms"])
        field = torus.torus_score(n_grid, spec, n_terms, seed=int(merged["seed"]))
        grid = np.arange(n_grid) * (2.0 * math.pi / n_grid)
        amin = int(np.argmin(field.values))
        items += [
            ("n_terms", n_terms),
            ("argmin_index", amin),
            ("argmin_x", float(grid[amin])),
            ("in_window", bool(torus.window_mask(grid[amin : amin + 1], spec)[0])),
            ("min_value", float(field.values.min())),
        ]
        if merged["out"]:
            pipeline.write_score_csv(field.values, merged["out"])
            _write_config(merged["out"], merged)
    _summary(items)
    return 0


def _cmd_graph(args, parser):
    keys = {
        "input": None,
        "format": None,
        "laplacian": "sym",
        "knn": 16,
        "patch": 8,
        "bandwidth": "auto",
        "n-terms": None,
        "out": None,
        "pgm": None,
        "seed": 0,
    }
    merged = _merge(args, parser, keys)
    _require(parser, merged, "input", "format", "n-terms", "out")
    fmt = merged["format"]
    if fmt not in ("edges", "pgm", "obj"):
        parser.error("--format must be edges, pgm or obj")
    kind = {"sym": "sym-normalized", "comb": "combinatorial"}.get(merged["laplacian"])
    if kind is None:
        parser.error("--laplacian must be sym or comb")
    image = None
    if fmt == "edges":
        with open(merged["input"]) as fh:
            graph = pipeline.parse_edge_list(fh.read())
    elif fmt == "obj":
        with open(merged["input"]) as fh:
            graph = pipeline.mesh_graph(pipeline.parse_obj(fh.read()))
    else:
        with open(merged["input"], "rb") as fh:
            image = pipeline.parse_pgm(fh.read())
        bandwidth = merged["bandwidth"]
        if bandwidth != "auto":
            bandwidth = float(bandwidth)
        cfg = pipeline.PatchGraphConfig(
            patch_size=int(merged["patch"]),
            k_neighbors=int(merged["knn"]),
            bandwidth=bandwidth,
        )
        graph = pipeline.patch_graph(image, cfg, seed=int(merged["seed"]))
    field = pipeline.score_graph(
        graph, int(merged["n-terms"]), kind=kind, seed=int(merged["seed"])
    )
    out = merged["out"]
    pipeline.write_score_csv(field, out)
    _write_config(out, merged)
    if merged["pgm"]:
        if image is None:
            parser.error("--pgm output needs --format pgm input")
        pipeline.write_heatmap_pgm(field, image.width, image.height, merged["pgm"])
    values = field.values
    _summary(
        [
            ("n_vertices", graph.n),
            ("n_edges", graph.n_edges),
            ("n_terms", int(merged["n-terms"])),
            ("laplacian", merged["laplacian"]),
            ("argmax_index", int(np.argmax(values))),
            ("argmax_value", float(values.max())),
            ("argmin_index", int(np.argmin(values))),
            ("min_value", float(values.min())),
        ]
    )
    return 0


def _add_common(sub):
    sub.add_argument("--config", help="JSON file with flag defaults")
    sub.add_argument("--seed", type=int, default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nodalscore",
        description="spectral anomaly scores on intervals, squares, graphs and the circle",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("interval", help="interval score on a uniform grid")
    s.add_argument("--n-terms", type=int)
    s.add_argument("--grid", type=int)
    s.add_argument("--find-minima", action="store_true", default=None)
    s.add_argument("--out")
    _add_common(s)
    s.set_defaults(func=_cmd_interval)

    s = subs.add_parser("square", help="square score on an interior grid")
    s.add_argument("--lambda-cut", type=float)
    s.add_argument("--grid")
    s.add_argument("--out")
    s.add_argument("--pgm")
    _add_common(s)
    s.set_defaults(func=_cmd_square)

    s = subs.add_parser("rational-check", help="strict-minimum check at p/q")
    s.add_argument("--p", type=int)
    s.add_argument("--q", type=int)
    s.add_argument("--n-terms", type=int)
    s.add_argument("--step", type=float)
    s.add_argument("--out")
    _add_common(s)
    s.set_defaults(func=_cmd_rational_check)

    s = subs.add_parser("paley", help="three-valued Paley graph score")
    s.add_argument("--p", type=int)
    s.add_argument("--verify", action="store_true", default=None)
    s.add_argument("--out")
    _add_common(s)
    s.set_defaults(func=_cmd_paley)

    s = subs.add_parser("torus", help="perturbed circle operator score")
    s.add_argument("--y", type=float)
    s.add_argument("--eps", type=float)
    s.add_argument("--bump", choices=["constant", "cosine"])
    s.add_argument("--n-grid", type=int)
    s.add_argument("--n-terms", type=int)
    s.add_argument("--find-n-eps", type=int)
    s.add_argument("--out")
    _add_common(s)
    s.set_defaults(func=_cmd_torus)

    s = subs.add_parser("graph", help="score a graph from a file")
    s.add_argument("--input")
    s.add_argument("--format", choices=["edges", "pgm", "obj"])
    s.add_argument("--laplacian", choices=["sym", "comb"])
    s.add_argument("--knn", type=int)
    s.add_argument("--patch", type=int)
    s.add_argument("--bandwidth")
    s.add_argument("--n-terms", type=int)
    s.add_argument("--out")
    s.add_argument("--pgm")
    _add_common(s)
    s.set_defaults(func=_cmd_graph)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args, parser)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())
