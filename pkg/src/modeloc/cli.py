"""Command-line interface: estimate, benchmark, real-eval, plot.

Exit codes are a stable scripting contract: 0 on success, 2 for any
input problem (unreadable files, malformed rows, bad estimator specs),
3 when estimation itself fails on valid input.  All commands are pure
functions of their inputs, flags and seed; the ``MODELOC_THREADS``
environment variable overrides ``--threads``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from importlib import resources

import numpy as np

from . import evaluation, svgplot
from .estimators import make_estimator
from .exceptions import EstimationError, InputError
from .rng import RngStream
from .synthgen import MixtureConfig

DEFAULT_SEED = 42
PRESET_GRIDS = ("table1", "table2", "fig16_noise", "fig17_size")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def read_points_csv(path):
    """Read a points CSV: optional header, two or more numeric columns,
    optional trailing ``label`` column (only with a header)."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    with fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise InputError(f"{path} contains no data")
    header = None
    start = 0
    try:
        [float(cell) for cell in rows[0]]
    except ValueError:
        header = [c.strip().lower() for c in rows[0]]
        start = 1
    label_col = header.index("label") if header and "label" in header else None
    points, labels = [], []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        try:
            if label_col is not None:
                labels.append(row[label_col])
                numeric = [float(c) for i, c in enumerate(row) if i != label_col]
            else:
                numeric = [float(c) for c in row]
        except (ValueError, IndexError):
            raise InputError(f"{path}:{lineno}: malformed row {row!r}") from None
        if len(numeric) < 2:
            raise InputError(f"{path}:{lineno}: need at least two coordinates")
        points.append(numeric)
    widths = {len(p) for p in points}
    if len(widths) != 1:
        raise InputError(f"{path}: rows have inconsistent column counts {sorted(widths)}")
    return np.array(points, dtype=float), (labels if label_col is not None else None)


def _resolve_grid(name):
    import os

    if os.path.exists(name):
        return evaluation.load_grid(name)
    stem = name[:-5] if name.endswith(".grid") else name
    if stem in PRESET_GRIDS:
        ref = resources.files("modeloc").joinpath("grids").joinpath(f"{stem}.grid")
        with resources.as_file(ref) as path:
            return evaluation.load_grid(path)
    raise InputError(
        f"grid {name!r} is neither a file nor a preset ({', '.join(PRESET_GRIDS)})")


def cmd_estimate(args) -> int:
    points, _ = read_points_csv(args.input)
    est = make_estimator(args.estimator)
    params = est.get_params()
    if "random_state" in params:
        est.set_params(random_state=RngStream(args.seed))
    if "alpha" in params:
        est.set_params(alpha=args.alpha)
    est.fit(points)

    payload = {
        "estimator": args.estimator,
        "seed": args.seed,
        "alpha": args.alpha,
        "center": _jsonable(est.location_),
        "groups": [],
        "selected_index": None,
        "unassigned": list(range(len(points))),
        "diagnostics": {},
        "points": _jsonable(points),
    }
    if hasattr(est, "estimate_"):
        result = est.estimate_
        payload["groups"] = [
            {
                "index": gi,
                "size": g.size,
                "iteration": g.iteration,
                "terminal": g.terminal,
                "center": _jsonable(g.center),
                "members": _jsonable(g.members),
            }
            for gi, g in enumerate(result.groups)
        ]
        payload["selected_index"] = result.selected_index
        payload["unassigned"] = _jsonable(result.unassigned)
        payload["diagnostics"] = _jsonable(result.diagnostics)
    elif hasattr(est, "members_"):
        payload["groups"] = [{
            "index": 0, "size": int(est.members_.size), "iteration": 1,
            "terminal": False, "center": _jsonable(est.location_),
            "members": _jsonable(est.members_),
        }]
        payload["selected_index"] = 0
        payload["unassigned"] = _jsonable(
            np.setdiff1d(np.arange(len(points)), est.members_))

    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2)
    print(f"center: {est.location_.tolist()}")
    return 0


def cmd_benchmark(args) -> int:
    cells = _resolve_grid(args.grid)
    specs = [s.strip() for s in args.estimators.split(",") if s.strip()]
    if not specs:
        raise InputError("--estimators must list at least one spec")
    result = evaluation.benchmark_grid(
        cells, specs, reps=args.reps, rng=RngStream(args.seed),
        threads=evaluation.resolve_threads(args.threads),
        with_timing=not args.no_timing)
    if args.format == "json":
        result.to_json(args.out)
    else:
        result.to_csv(args.out)
    if args.json:
        result.to_json(args.json)
    print(f"wrote {args.out}: {len(cells)} cells x {len(specs)} estimators "
          f"x {args.reps} reps")
    return 0


def cmd_real_eval(args) -> int:
    targets, points = evaluation.read_calibration_csv(args.data)
    truth = evaluation.read_ground_truth(args.truth)
    specs = [s.strip() for s in args.estimators.split(",") if s.strip()]
    if not specs:
        raise InputError("--estimators must list at least one spec")
    config = evaluation.RealEvalConfig(draws=args.draws, draw_size=args.draw_size,
                                       pixel_per_degree=args.pixel_per_degree)
    per_target, overall = evaluation.real_eval(
        targets, points, truth, config, specs, rng=RngStream(args.seed))
    if args.format == "json":
        payload = {
            "per_target": [
                {"target": t, "estimator": s, "metrics": m.to_dict()}
                for (t, s), m in sorted(per_target.items(),
                                        key=lambda kv: (kv[0][0], kv[0][1]))
            ],
            "overall": [
                {"estimator": s, "metrics": overall[s].to_dict()}
                for s in sorted(overall)
            ],
        }
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
    else:
        evaluation.real_eval_to_csv(args.out, per_target, overall)
    print(f"wrote {args.out}: {len(set(t for t, _ in per_target))} targets")
    return 0


def _plot_from_estimate(payload):
    points = np.asarray(payload.get("points", []), dtype=float)
    if points.size == 0:
        raise InputError("estimate file has no embedded points; cannot plot")
    series = []
    claimed = np.zeros(len(points), dtype=bool)
    for group in payload.get("groups", []):
        members = np.asarray(group["members"], dtype=int)
        claimed[members] = True
        series.append((f"group-{group['index']}", points[members]))
    if not np.all(claimed):
        series.append(("unassigned", points[~claimed]))
    center = payload.get("center")
    return series, center


def cmd_plot(args) -> int:
    if args.input.endswith(".json"):
        try:
            with open(args.input) as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot parse {args.input}: {exc}") from None
        series, center = _plot_from_estimate(payload)
    else:
        points, labels = read_points_csv(args.input)
        if points.shape[1] != 2:
            raise InputError("plot supports two-dimensional points only")
        if labels is None:
            series = [("points", points)]
        else:
            order = sorted(set(labels))
            series = [(lab, points[[i for i, l in enumerate(labels) if l == lab]])
                      for lab in order]
        center = None
    true_centers = ()
    if args.truth:
        try:
            with open(args.truth) as fh:
                truth = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot parse {args.truth}: {exc}") from None
        true_centers = (list(truth.values()) if isinstance(truth, dict) else list(truth))
    svg = svgplot.scatter_svg(series, estimated_center=center,
                              true_centers=true_centers, title=args.title)
    with open(args.out, "w") as fh:
        fh.write(svg)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modeloc",
        description="Robust mode location for noisy multimodal point clouds.",
        epilog="Estimator specs follow family[:method[:param]], e.g. "
               "bril:projection, brl:oja, rec:mve, med:tukey, max:l2, "
               "sup:liu:0.1, mean, cw-median, cw-mode.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="locate the main mode of a points CSV")
    p_est.add_argument("--input", required=True, help="CSV of points (x,y[,label])")
    p_est.add_argument("--estimator", default="bril:projection")
    p_est.add_argument("--alpha", type=float, default=0.05)
    p_est.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_est.add_argument("--out", required=True, help="output JSON path")
    p_est.set_defaults(func=cmd_estimate)

    p_bench = sub.add_parser("benchmark", help="run a synthetic benchmark grid")
    p_bench.add_argument("--grid", required=True,
                         help=f"grid file or preset name ({', '.join(PRESET_GRIDS)})")
    p_bench.add_argument("--estimators", required=True,
                         help="comma-separated estimator specs")
    p_bench.add_argument("--reps", type=int, default=50)
    p_bench.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_bench.add_argument("--threads", type=int, default=None)
    p_bench.add_argument("--no-timing", action="store_true",
                         help="omit wall-clock timings for byte-identical output")
    p_bench.add_argument("--format", choices=("csv", "json"), default="csv")
    p_bench.add_argument("--json", default=None, help="also write a JSON mirror here")
    p_bench.add_argument("--out", required=True)
    p_bench.set_defaults(func=cmd_benchmark)

    p_real = sub.add_parser("real-eval", help="evaluate estimators on calibration data")
    p_real.add_argument("--data", required=True, help="CSV with trial,target,x,y")
    p_real.add_argument("--truth", required=True, help="JSON map target -> [x, y]")
    p_real.add_argument("--draws", type=int, default=25)
    p_real.add_argument("--draw-size", type=int, default=1000)
    p_real.add_argument("--pixel-per-degree", type=float, default=25.0)
    p_real.add_argument("--estimators", default="bril:projection")
    p_real.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_real.add_argument("--format", choices=("csv", "json"), default="csv")
    p_real.add_argument("--out", required=True)
    p_real.set_defaults(func=cmd_real_eval)

    p_plot = sub.add_parser("plot", help="render an SVG scatter of points or an estimate")
    p_plot.add_argument("--input", required=True, help="points CSV or estimate JSON")
    p_plot.add_argument("--truth", default=None, help="optional JSON of true centers")
    p_plot.add_argument("--title", default="")
    p_plot.add_argument("--out", required=True)
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EstimationError as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
