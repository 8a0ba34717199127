"""Command-line front end: single-stage subcommands plus experiment sweeps
that emit figure-ready CSV datasets (load statistics vs alpha, throughput
and delivery time vs generation rate per topology)."""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .graphs import (
    GenParams,
    Graph,
    all_pairs_hop_distances,
    characteristic_path_length,
    generate_static_model,
    giant_component,
    read_edge_list,
    write_edge_list,
)
from .load import compute_load, load_stats, write_load_csv
from .sim import SimConfig, run as run_sim
from .traffic import (
    ErramilliParams,
    ErramilliSource,
    calibrate_d,
    default_block_sizes,
    estimate_rate,
    hurst_aggregated_variance,
    write_bit_trace,
)

# Fixed seed for the d-calibration objective so that a plan is a pure
# function of its own seed list.
_CALIBRATION_SEED = 1_234_567

FIG12_COLUMNS = ["alpha", "gamma", "seed", "n_giant", "cpl", "load_mean", "load_nstd"]
FIG34_COLUMNS = [
    "alpha", "gamma", "lambda", "seed", "n_giant", "cpl", "load_mean", "load_nstd",
    "generated", "delivered", "mean_delivery_time", "in_flight", "max_queue",
]
RUN_COLUMNS = [
    "alpha", "gamma", "lambda", "seed",
    "generated", "delivered", "mean_delivery_time", "in_flight", "max_queue",
]


class ParseError(ValueError):
    """Malformed config line; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ValidationError(ValueError):
    """A plan field is out of range or missing."""


@dataclass
class ExperimentPlan:
    n_vertices: int = 500
    avg_degree: float = 3.0
    alphas: list[float] = field(default_factory=lambda: [0.0, 0.5, 1.0])
    lambdas: list[float] = field(default_factory=lambda: [0.005, 0.01, 0.02, 0.05, 0.1])
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    rho: float = 0.16
    m1: float = 2.0
    m2: float = 2.0
    warmup_steps: int = 1000
    measure_steps: int = 10_000
    calib_tol: float = 0.01
    out: str | None = None

    def validate(self) -> None:
        if self.n_vertices < 2:
            raise ValidationError("n: need at least 2 vertices")
        n_edges = int(self.avg_degree * self.n_vertices // 2)
        if n_edges < 1:
            raise ValidationError("avg_degree: resolves to zero edges")
        if n_edges > self.n_vertices * (self.n_vertices - 1) // 2:
            raise ValidationError("avg_degree: exceeds the simple-graph maximum")
        if not self.alphas:
            raise ValidationError("alphas: need at least one value")
        for a in self.alphas:
            if not 0.0 <= a <= 1.0:
                raise ValidationError(f"alphas: {a} outside [0, 1]")
        if not self.lambdas:
            raise ValidationError("lambdas: need at least one value")
        for lam in self.lambdas:
            if not 0.0 < lam < 1.0:
                raise ValidationError(f"lambdas: {lam} outside (0, 1)")
        if not self.seeds:
            raise ValidationError("seeds: need at least one seed")
        if not 0.0 < self.rho <= 1.0:
            raise ValidationError(f"rho: {self.rho} outside (0, 1]")
        for name, m in (("m1", self.m1), ("m2", self.m2)):
            if not 1.5 <= m <= 2.0:
                raise ValidationError(f"{name}: {m} outside [1.5, 2.0]")
        if self.warmup_steps < 0:
            raise ValidationError("warmup: must be >= 0")
        if self.measure_steps < 1:
            raise ValidationError("steps: must be >= 1")
        if not 0.0 < self.calib_tol < 1.0:
            raise ValidationError("calib_tol: must lie in (0, 1)")


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


# config key -> (plan attribute, parser)
_PLAN_KEYS = {
    "n": ("n_vertices", int),
    "avg_degree": ("avg_degree", float),
    "alphas": ("alphas", _parse_float_list),
    "lambdas": ("lambdas", _parse_float_list),
    "seeds": ("seeds", _parse_int_list),
    "rho": ("rho", float),
    "m1": ("m1", float),
    "m2": ("m2", float),
    "warmup": ("warmup_steps", int),
    "steps": ("measure_steps", int),
    "calib_tol": ("calib_tol", float),
    "out": ("out", str),
}


def parse_plan(text: str, overrides: dict[str, str] | None = None) -> ExperimentPlan:
    """Build a plan from `key = value` config text, then apply flag overrides.

    Unknown keys and malformed lines raise ParseError with the line number;
    out-of-range values raise ValidationError naming the field.
    """
    kwargs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _PLAN_KEYS:
            raise ParseError(lineno, f"unknown key {key!r}")
        attr, parse = _PLAN_KEYS[key]
        try:
            kwargs[attr] = parse(value)
        except ValueError:
            raise ParseError(lineno, f"bad value for {key!r}: {value!r}") from None
    for key, value in (overrides or {}).items():
        attr, parse = _PLAN_KEYS[key]
        try:
            kwargs[attr] = parse(value)
        except ValueError:
            raise ValidationError(f"{key}: bad value {value!r}") from None
    plan = ExperimentPlan(**kwargs)
    plan.validate()
    return plan


def gamma_of_alpha(alpha: float) -> float:
    """Degree exponent 1 + 1/alpha; +inf marks the purely random case."""
    return 1.0 + 1.0 / alpha if alpha > 0 else float("inf")


def _build_topology(plan: ExperimentPlan, alpha: float, seed: int):
    """Generate, reduce to the giant component, and precompute per-graph data."""
    params = GenParams.from_avg_degree(plan.n_vertices, plan.avg_degree, alpha, seed)
    g, _ = giant_component(generate_static_model(params))
    dmat = all_pairs_hop_distances(g)
    cpl = characteristic_path_length(dmat)
    stats = load_stats(compute_load(g))
    return g, dmat, cpl, stats


def run_fig12_sweep(plan: ExperimentPlan, progress=None) -> tuple[list[dict], list[dict]]:
    """Load statistics against alpha: one row per (alpha, seed), plus
    seed-averaged rows."""
    rows = []
    for alpha in plan.alphas:
        for seed in plan.seeds:
            if progress:
                progress(f"fig12 alpha={alpha} seed={seed}")
            g, _, cpl, stats = _build_topology(plan, alpha, seed)
            rows.append({
                "alpha": alpha,
                "gamma": gamma_of_alpha(alpha),
                "seed": seed,
                "n_giant": g.n_vertices,
                "cpl": cpl,
                "load_mean": stats.mean,
                "load_nstd": stats.normalized_std,
            })
    avg = average_records(rows, ["alpha", "gamma"], ["n_giant", "cpl", "load_mean", "load_nstd"])
    return rows, avg


def run_fig34_sweep(
    plan: ExperimentPlan, progress=None
) -> tuple[list[dict], list[dict], list[dict]]:
    """Throughput and delivery time against the generation rate, per topology.

    One simulation per (alpha, lambda, seed); a failing cell is recorded and
    skipped so the rest of the sweep survives. Returns (per-seed rows,
    seed-averaged rows, failures).
    """
    calib_cache: dict[float, float] = {}

    def d_for(lam: float) -> float:
        if lam not in calib_cache:
            calib_cache[lam] = calibrate_d(
                plan.m1, plan.m2, lam, tol=plan.calib_tol, seed=_CALIBRATION_SEED
            )
        return calib_cache[lam]

    rows = []
    failures = []
    for alpha in plan.alphas:
        for seed in plan.seeds:
            if progress:
                progress(f"fig34 alpha={alpha} seed={seed}")
            try:
                g, dmat, cpl, stats = _build_topology(plan, alpha, seed)
            except Exception as exc:  # noqa: BLE001 - cell isolation by contract
                for lam in plan.lambdas:
                    failures.append(
                        {"alpha": alpha, "lambda": lam, "seed": seed, "error": repr(exc)}
                    )
                continue
            for lam in plan.lambdas:
                try:
                    config = SimConfig(
                        graph=g,
                        rho=plan.rho,
                        traffic=ErramilliParams(plan.m1, plan.m2, d_for(lam)),
                        warmup_steps=plan.warmup_steps,
                        measure_steps=plan.measure_steps,
                        seed=seed,
                    )
                    metrics = run_sim(config, dmat=dmat)
                except Exception as exc:  # noqa: BLE001
                    failures.append(
                        {"alpha": alpha, "lambda": lam, "seed": seed, "error": repr(exc)}
                    )
                    continue
                rows.append({
                    "alpha": alpha,
                    "gamma": gamma_of_alpha(alpha),
                    "lambda": lam,
                    "seed": seed,
                    "n_giant": g.n_vertices,
                    "cpl": cpl,
                    "load_mean": stats.mean,
                    "load_nstd": stats.normalized_std,
                    "generated": metrics.generated,
                    "delivered": metrics.delivered,
                    "mean_delivery_time": metrics.mean_delivery_time,
                    "in_flight": metrics.in_flight_at_end,
                    "max_queue": metrics.max_queue,
                })
    metric_cols = [c for c in FIG34_COLUMNS if c not in ("alpha", "gamma", "lambda", "seed")]
    avg = average_records(rows, ["alpha", "gamma", "lambda"], metric_cols)
    return rows, avg, failures


def average_records(
    rows: list[dict], group_cols: list[str], metric_cols: list[str]
) -> list[dict]:
    """Collapse rows sharing `group_cols` into mean/std (sample) columns,
    preserving first-seen group order."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[c] for c in group_cols), []).append(row)
    out = []
    for key, members in groups.items():
        rec = dict(zip(group_cols, key))
        rec["n_seeds"] = len(members)
        for col in metric_cols:
            vals = np.asarray([float(m[col]) for m in members])
            rec[f"{col}_mean"] = float(vals.mean())
            rec[f"{col}_std"] = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        out.append(rec)
    return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(records: list[dict], path: str, columns: list[str]) -> None:
    """Header plus one row per record; floats via repr so output is
    byte-stable and round-trips exactly."""
    if not records:
        raise ValueError("no records to write")
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(rec[c]) for c in columns) for rec in records)
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def read_csv(path: str) -> list[dict]:
    """Parse an emit_csv file back into dicts (numbers as floats)."""
    with open(path) as f:
        lines = [line.rstrip("\n") for line in f if line.strip()]
    header = lines[0].split(",")
    out = []
    for line in lines[1:]:
        rec = {}
        for key, tok in zip(header, line.split(",")):
            try:
                rec[key] = float(tok)
            except ValueError:
                rec[key] = tok
        out.append(rec)
    return out


def _avg_path(path: str) -> str:
    return path[:-4] + "_avg.csv" if path.endswith(".csv") else path + "_avg"


# ---------------------------------------------------------------------------
# subcommands


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); route to exit code 1
        raise ValidationError(message)


def _cmd_gen(args) -> int:
    params = GenParams.from_avg_degree(args.n, args.avg_degree, args.alpha, args.seed)
    g = generate_static_model(params)
    if args.giant:
        g, _ = giant_component(g)
    write_edge_list(g, args.out, alpha=args.alpha, seed=args.seed)
    print(f"wrote {args.out}: n={g.n_vertices} m={g.n_edges}")
    return 0


def _cmd_load(args) -> int:
    g, _ = read_edge_list(args.edges)
    if args.giant:
        g, _ = giant_component(g)
    values = compute_load(g, include_endpoints=args.include_endpoints)
    write_load_csv(values, args.out)
    stats = load_stats(values)
    print(
        f"wrote {args.out}: mean={stats.mean!r} normalized_std={stats.normalized_std!r}"
    )
    return 0


def _cmd_traffic(args) -> int:
    if args.d is None and args.target_lambda is None:
        raise ValidationError("need --d or --target-lambda")
    if args.d is not None and args.target_lambda is not None:
        raise ValidationError("--d and --target-lambda are mutually exclusive")
    if args.target_lambda is not None:
        d = calibrate_d(
            args.m1, args.m2, args.target_lambda, tol=args.tol, seed=_CALIBRATION_SEED
        )
        print(f"d={d!r}")
    else:
        d = args.d
    params = ErramilliParams(args.m1, args.m2, d)
    if args.estimate_rate:
        rate = estimate_rate(params, seed=args.seed)
        print(f"rate={rate!r}")
    if args.bits:
        src = ErramilliSource(params, seed=args.seed)
        bits = src.bits(args.bits)
        if args.out:
            write_bit_trace(bits, args.out, fmt=args.format)
            print(f"wrote {args.out}: {args.bits} bits ({args.format})")
        if args.hurst:
            max_block = max(1000, args.bits // 100)
            sizes = default_block_sizes(max(10, max_block // 100), max_block)
            h = hurst_aggregated_variance(bits, sizes)
            print(f"hurst={h!r}")
    elif args.hurst:
        raise ValidationError("--hurst requires --bits")
    return 0


def _make_run_config(args):
    """Shared topology + traffic setup for the `run` subcommand."""
    if args.edges:
        g, meta = read_edge_list(args.edges)
        alpha = meta.get("alpha", float("nan"))
    else:
        if args.alpha is None:
            raise ValidationError("need --alpha when generating (or pass --edges)")
        alpha = args.alpha
        params = GenParams.from_avg_degree(args.n, args.avg_degree, alpha, args.seed)
        g = generate_static_model(params)
    g, _ = giant_component(g)
    if args.d is None and args.target_lambda is None:
        raise ValidationError("need --d or --target-lambda")
    if args.target_lambda is not None:
        d = calibrate_d(
            args.m1, args.m2, args.target_lambda, tol=args.tol, seed=_CALIBRATION_SEED
        )
        lam = args.target_lambda
    else:
        d = args.d
        lam = float("nan")
    config = SimConfig(
        graph=g,
        rho=args.rho,
        traffic=ErramilliParams(args.m1, args.m2, d),
        warmup_steps=args.warmup,
        measure_steps=args.steps,
        seed=args.seed,
    )
    return config, alpha, lam


def _cmd_run(args) -> int:
    config, alpha, lam = _make_run_config(args)
    metrics = run_sim(config)
    gamma = gamma_of_alpha(alpha) if not math.isnan(alpha) else float("nan")
    row = {
        "alpha": alpha,
        "gamma": gamma,
        "lambda": lam,
        "seed": args.seed,
        "generated": metrics.generated,
        "delivered": metrics.delivered,
        "mean_delivery_time": metrics.mean_delivery_time,
        "in_flight": metrics.in_flight_at_end,
        "max_queue": metrics.max_queue,
    }
    text = ",".join(RUN_COLUMNS) + "\n" + ",".join(_fmt(row[c]) for c in RUN_COLUMNS)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    if args.queue_series:
        with open(args.queue_series, "w") as f:
            f.write("step,total_queued\n")
            f.writelines(
                f"{i},{q}\n" for i, q in enumerate(metrics.queue_length_timeseries)
            )
    return 0


def _cmd_sweep(args) -> int:
    text = ""
    if args.config:
        with open(args.config) as f:
            text = f.read()
    overrides = {
        key: getattr(args, dest)
        for key, dest in [
            ("n", "n"), ("avg_degree", "avg_degree"), ("alphas", "alphas"),
            ("lambdas", "lambdas"), ("seeds", "seeds"), ("rho", "rho"),
            ("m1", "m1"), ("m2", "m2"), ("warmup", "warmup"), ("steps", "steps"),
            ("out", "out"),
        ]
        if getattr(args, dest) is not None
    }
    plan = parse_plan(text, overrides)
    if not plan.out:
        raise ValidationError("out: no output path (use --out or config)")

    def progress(msg: str) -> None:
        print(msg, file=sys.stderr)

    if args.kind == "fig12":
        rows, avg = run_fig12_sweep(plan, progress=progress)
        failures = []
        columns = FIG12_COLUMNS
    else:
        rows, avg, failures = run_fig34_sweep(plan, progress=progress)
        columns = FIG34_COLUMNS
    emit_csv(rows, plan.out, columns)
    avg_columns = list(avg[0].keys()) if avg else []
    if avg:
        emit_csv(avg, _avg_path(plan.out), avg_columns)
    for failure in failures:
        print(f"failed cell: {failure}", file=sys.stderr)
    print(
        f"wrote {plan.out} ({len(rows)} rows) and {_avg_path(plan.out)} "
        f"({len(avg)} rows); {len(failures)} failed cells"
    )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="netqsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph and export its edge list")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--avg-degree", type=float, default=3.0)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--giant", action="store_true", help="export only the giant component")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("load", help="per-vertex load CSV from an edge list")
    p.add_argument("--edges", required=True)
    p.add_argument("--giant", action="store_true")
    p.add_argument("--include-endpoints", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_load)

    p = sub.add_parser("traffic", help="bit traces, rate estimation, calibration")
    p.add_argument("--m1", type=float, default=2.0)
    p.add_argument("--m2", type=float, default=2.0)
    p.add_argument("--d", type=float)
    p.add_argument("--target-lambda", type=float)
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bits", type=int)
    p.add_argument("--format", choices=["raw", "rle"], default="raw")
    p.add_argument("--estimate-rate", action="store_true")
    p.add_argument("--hurst", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_traffic)

    p = sub.add_parser("run", help="single simulation, metrics row to stdout or file")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--avg-degree", type=float, default=3.0)
    p.add_argument("--alpha", type=float)
    p.add_argument("--edges", help="edge-list path (instead of generating)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float, default=0.16)
    p.add_argument("--m1", type=float, default=2.0)
    p.add_argument("--m2", type=float, default=2.0)
    p.add_argument("--d", type=float)
    p.add_argument("--target-lambda", type=float)
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--warmup", type=int, default=1000)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--queue-series", help="write step,total_queued CSV here")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="figure-dataset sweeps over (alpha, lambda, seed)")
    p.add_argument("--kind", choices=["fig12", "fig34"], required=True)
    p.add_argument("--config", help="key = value plan file")
    p.add_argument("--n")
    p.add_argument("--avg-degree", dest="avg_degree")
    p.add_argument("--alphas")
    p.add_argument("--lambdas")
    p.add_argument("--seeds")
    p.add_argument("--rho")
    p.add_argument("--m1")
    p.add_argument("--m2")
    p.add_argument("--warmup")
    p.add_argument("--steps")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # -h/--help
        return int(exc.code or 0)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failure exit code
        print(f"runtime error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
