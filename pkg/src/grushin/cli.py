"""Command-line front end.

Every subcommand accepts the global flags; tables go to ``--out`` (or stdout)
as CSV or JSON and a short summary is printed to stdout. Exit codes: 0 on
success, 2 for malformed arguments, 3 for precondition violations, 4 for I/O
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ccsolver, core, jacobian, qsmaps

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_IO = 0, 2, 3, 4


class PreconditionError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    region: ccsolver.Rect
    samples: int | None
    seed: int
    resolution: int
    norm: qsmaps.Norm
    output_format: str
    output_path: Path | None


def _coords(text: str, n: int, what: str) -> tuple[float, ...]:
    parts = text.split(",")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be {n} comma-separated reals, got {text!r}")
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"{what} must be {n} comma-separated finite reals, got {text!r}")
    return vals


def point_arg(text: str) -> core.GrushinPoint:
    return core.GrushinPoint(*_coords(text, 2, "point"))


def region_arg(values: list[str]) -> tuple[float, ...]:
    text = ",".join(values)
    return _coords(text, 4, "region")


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    return v


def render(columns: list[str], rows: list[list], summary: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        payload = {
            "columns": columns,
            "rows": [[_jsonable(v) for v in row] for row in rows],
            "summary": {k: _jsonable(v) for k, v in summary.items()},
        }
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    if summary:
        flat = ["summary"]
        for k, v in summary.items():
            flat += [k, fmt(v)]
        w.writerow(flat)
    return buf.getvalue()


def write_atomic(outputs: dict[Path, str]) -> None:
    """Write every file to a temporary sibling first, then rename them all."""
    staged = []
    try:
        for path, text in outputs.items():
            fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.", suffix=".tmp")
            staged.append((tmp, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        for tmp, path in staged:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise


def emit(cfg: RunConfig, text: str, extra: dict[Path, str] | None = None) -> None:
    if cfg.output_path is None:
        sys.stdout.write(text)
        for body in (extra or {}).values():
            sys.stdout.write(body)
        return
    write_atomic({cfg.output_path: text, **(extra or {})})


def _config(args) -> RunConfig:
    try:
        alpha = core.MetricParams(args.alpha).alpha
        region = ccsolver.Rect(*args.region)
    except ValueError as exc:
        raise PreconditionError(str(exc))
    if args.samples is not None and args.samples < 1:
        raise PreconditionError(f"--samples must be at least 1, got {args.samples}")
    if args.resolution < 8:
        raise PreconditionError(f"--resolution must be at least 8, got {args.resolution}")
    return RunConfig(
        alpha=alpha,
        region=region,
        samples=args.samples,
        seed=args.seed,
        resolution=args.resolution,
        norm=qsmaps.Norm(args.norm),
        output_format=args.format,
        output_path=Path(args.out) if args.out else None,
    )


def cmd_quasidistance(cfg: RunConfig, args) -> None:
    value, branch = core.quasidistance_branch(args.z1, args.z2, cfg.alpha)
    print(f"{fmt(value)}\tbranch={branch}")


def cmd_ccdist(cfg: RunConfig, args) -> None:
    for z in (args.z1, args.z2):
        if not cfg.region.contains(z):
            raise PreconditionError(f"point ({z.x}, {z.y}) lies outside region {cfg.region.as_tuple()}")
    sol = ccsolver.staircase_distance(args.z1, args.z2, cfg.alpha)
    grid = ccsolver.grid_cc_distance(args.z1, args.z2, cfg.alpha, cfg.resolution, cfg.region)
    ratio = sol.length / grid if grid > 0 else float("nan")
    print(f"staircase\t{sol.length:.6f}")
    print(f"grid\t{grid:.6f}")
    print(f"ratio\t{ratio:.6f}")
    print(f"branch\t{sol.branch.value}")
    print(f"pivot\t{sol.pivot_abscissa:.6f}")


COMPARE_COLUMNS = ["sample_id", "x1", "y1", "x2", "y2", "quasidistance", "staircase", "grid", "ratio"]


def cmd_compare(cfg: RunConfig, args) -> None:
    n = cfg.samples if cfg.samples is not None else 10_000
    rep = ccsolver.comparability_scan(cfg.region, cfg.alpha, n, cfg.seed, cfg.resolution)
    t = rep.table
    rows = [[t[c][k] for c in COMPARE_COLUMNS] for k in range(n)]
    summary = {"ratio_min": rep.ratio_min, "ratio_max": rep.ratio_max, "C": rep.constant}
    emit(cfg, render(COMPARE_COLUMNS, rows, summary, cfg.output_format))
    print(f"ratio_min={rep.ratio_min:.6f} ratio_max={rep.ratio_max:.6f} C={rep.constant:.6f} samples={n}")


SANDWICH_COLUMNS = ["sample_id", "x1", "y1", "x2", "y2", "case_z", "case_zp", "lower_ratio", "upper_ratio", "passed"]
ETA_COLUMNS = ["bin", "t_lo", "t_hi", "t_rep", "count", "rho_max", "envelope"]


def cmd_qs(cfg: RunConfig, args) -> None:
    n = cfg.samples if cfg.samples is not None else 100_000
    alpha = cfg.alpha
    lower = args.lower if args.lower is not None else 1.0 / args.c_s
    rng = np.random.default_rng(cfg.seed)
    pts = ccsolver.sample_pairs(
        cfg.region, n, rng,
        lambda p: core.quasidistance_xy(p[:, 0], p[:, 1], p[:, 2], p[:, 3], alpha) < ccsolver.DEGENERATE,
    )
    x1, y1, x2, y2 = pts.T
    ra, rb = qsmaps.sandwich_ratios(x1, y1, x2, y2, alpha, cfg.norm)
    lo, hi = np.minimum(ra, rb), np.maximum(ra, rb)
    passed = (lo >= lower) & (hi <= args.c_s)
    case_a, _, _ = qsmaps.classify_xy(x1, y1, x2, y2, alpha)
    case_b, _, _ = qsmaps.classify_xy(x2, y2, x1, y1, alpha)
    labels = [c.value for c in qsmaps.CaseLabel]
    rows = [
        [k, x1[k], y1[k], x2[k], y2[k], labels[case_a[k]], labels[case_b[k]], lo[k], hi[k], passed[k]]
        for k in range(n)
    ]
    violations = int(n - passed.sum())
    summary = {
        "worst_lower": float(lo.min()),
        "worst_upper": float(hi.max()),
        "violations": violations,
        "c_s": args.c_s,
        "lower": lower,
    }

    env = qsmaps.eta_estimate(
        cfg.region, alpha, args.triples, cfg.seed, args.bins, cfg.norm, identity=args.identity_hook
    )
    eta_rows = [
        [k, env.t_lo[k], env.t_hi[k], env.t_rep[k], env.count[k], env.rho_max[k], env.envelope[k]]
        for k in range(len(env.count))
    ]
    eta_summary = {"weak_constant": env.weak_constant, "envelope_at_1": env.at(1.0), "triples": env.n_triples}
    eta_text = render(ETA_COLUMNS, eta_rows, eta_summary, cfg.output_format)
    extra = {}
    if cfg.output_path is not None:
        eta_path = Path(args.eta_out) if args.eta_out else cfg.output_path.with_name(
            cfg.output_path.stem + ".eta" + cfg.output_path.suffix
        )
        extra[eta_path] = eta_text
    else:
        extra[Path("-")] = eta_text
    emit(cfg, render(SANDWICH_COLUMNS, rows, summary, cfg.output_format), extra)
    print(
        f"worst_lower={summary['worst_lower']:.6f} worst_upper={summary['worst_upper']:.6f} "
        f"violations={violations} weak_constant={env.weak_constant:.6f} envelope_at_1={env.at(1.0):.6f}"
    )


DENSITY_COLUMNS = ["u", "euclidean_factor", "grushin_density", "total", "area_distortion"]


def cmd_jacobian(cfg: RunConfig, args) -> None:
    w = jacobian.alpha_for_beta(args.beta)
    print(f"regime\t{w.regime.value}")
    print(f"derived_alpha\t{'absent' if w.derived_alpha is None else format(w.derived_alpha, '.6f')}")
    if w.derived_alpha is not None:
        us = np.logspace(math.log10(args.u_min), math.log10(args.u_max), args.points)
        rows = []
        for u in us:
            d = jacobian.jacobian_density(float(u), args.beta)
            rows.append([u, d.euclidean_factor, d.grushin_density, d.total, jacobian.area_distortion(float(u), args.beta, min(1e-4, 1e-3 * u))])
        slope = jacobian.loglog_slope(float(us[0]), float(us[-1]), args.beta)
        emit(cfg, render(DENSITY_COLUMNS, rows, {"slope": slope}, cfg.output_format))
        print(f"slope\t{slope:.6f}")
    t = 0.0 - args.beta
    acl = jacobian.acl_integrability(t)
    print(f"acl_t\t{fmt(t)}")
    print(f"acl\t{'integrable' if acl.integrable else 'obstructed'}")


def cmd_acl(cfg: RunConfig, args) -> None:
    rep = jacobian.acl_integrability(args.t)
    rows = [[d, v] for d, v in rep.partial]
    summary = {"t": rep.t, "integrable": rep.integrable, "integral": rep.integral if rep.integral is not None else float("inf")}
    emit(cfg, render(["delta", "integral_delta_to_1"], rows, summary, cfg.output_format))
    verdict = f"integral={fmt(rep.integral)}" if rep.integrable else "integral=inf"
    print(f"integrable={'true' if rep.integrable else 'false'} {verdict}")


def cmd_semmes(cfg: RunConfig, args) -> None:
    n = cfg.samples if cfg.samples is not None else 200_000
    try:
        est = jacobian.semmes_quasidistance(args.z1, args.z2, args.beta, n, cfg.seed)
    except jacobian.NonIntegrableWeight as exc:
        raise PreconditionError(str(exc))
    print(f"delta\t{fmt(est.value)}")
    print(f"stderr\t{fmt(est.stderr)}")
    print(f"rel_stderr\t{fmt(est.rel_stderr)}")


def _global_flags() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--alpha", type=float, default=2.0, help="Grushin exponent alpha > 0 (default 2)")
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--samples", type=int, default=None, help="sample count (per-command default)")
    g.add_argument("--resolution", type=int, default=ccsolver.DEFAULT_RESOLUTION)
    g.add_argument(
        "--region", nargs="+", default=["-2", "-2", "2", "2"], metavar="R",
        help="xmin ymin xmax ymax, as four values or one comma list (default -2 -2 2 2)",
    )
    g.add_argument("--norm", choices=["linf", "euclid"], default="linf")
    g.add_argument("--format", choices=["csv", "json"], default="csv")
    g.add_argument("--out", default=None, help="output file (default: stdout)")
    return g


def build_parser() -> argparse.ArgumentParser:
    g = _global_flags()
    parser = argparse.ArgumentParser(
        prog="grushin",
        description="Distances, flattening maps and Jacobian weights on the Grushin plane.",
        epilog="Negative coordinates need the '=' form, e.g. --z1=-1,0.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, epilog=None):
        p = sub.add_parser(name, parents=[g], help=help_text, description=help_text, epilog=epilog)
        p.set_defaults(func=func)
        return p

    for name, func, help_text in (
        ("quasidistance", cmd_quasidistance, "quasidistance between two points and the operand that won"),
        ("ccdist", cmd_ccdist, "staircase and lattice estimates of the Carnot-Caratheodory distance"),
    ):
        p = add(name, func, help_text)
        p.add_argument("--z1", type=point_arg, required=True, help="x,y")
        p.add_argument("--z2", type=point_arg, required=True, help="x,y")

    add(
        "compare", cmd_compare,
        "scan random pairs for quasidistance / CC-distance ratios",
        epilog="CSV columns: " + ",".join(COMPARE_COLUMNS) + "; final row: summary,ratio_min,..,ratio_max,..,C,..",
    )

    p = add(
        "qs", cmd_qs,
        "sandwich check of the flattening map and its binned quasisymmetry envelope",
        epilog="CSV columns: " + ",".join(SANDWICH_COLUMNS)
        + ". The envelope table (" + ",".join(ETA_COLUMNS) + ") goes to --eta-out,"
        " default <out stem>.eta<suffix>.",
    )
    p.add_argument("--c-s", type=float, default=20.0, help="upper sandwich constant (default 20)")
    p.add_argument("--lower", type=float, default=None, help="lower sandwich constant (default 1/c_s)")
    p.add_argument("--triples", type=int, default=1_000_000)
    p.add_argument("--bins", type=int, default=32)
    p.add_argument("--identity-hook", action="store_true", help="replace the map by the identity")
    p.add_argument("--eta-out", default=None)

    p = add(
        "jacobian", cmd_jacobian,
        "regime, derived alpha, density table and ACL verdict for the weight |x|^beta",
        epilog="CSV columns: " + ",".join(DENSITY_COLUMNS),
    )
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--u-min", type=float, default=1e-3)
    p.add_argument("--u-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=9)

    p = add("acl", cmd_acl, "local integrability of |x|^(-t/2) on horizontal lines",
            epilog="CSV columns: delta,integral_delta_to_1")
    p.add_argument("--t", type=float, required=True)

    p = add("semmes", cmd_semmes, "Semmes ball-measure quasidistance for the weight |x|^beta")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--z1", type=point_arg, required=True, help="x,y")
    p.add_argument("--z2", type=point_arg, required=True, help="x,y")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.region = region_arg(args.region)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    try:
        cfg = _config(args)
        args.func(cfg, args)
    except PreconditionError as exc:
        print(f"grushin: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"grushin: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"grushin: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
