"""Command-line entry point.

Subcommands: vhat, region, check, simulate, delay-bound, fluid-boundary,
fairness, oracle-check.  Every run prints its fully resolved configuration
(defaults included) to stderr, and every output embeds the configuration
hash and tool version, so any artifact can be regenerated byte-for-byte.
Exit codes: 0 success, 2 bad input or validation failure, 1 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .alpha_sets import build_vhat, wn_count
from .capacity_region import (
    brute_force_support,
    build_region,
    membership_margin,
    onoff_support,
    support_function,
)
from .channel_models import (
    ContinuousChannelModel,
    DiscreteChannelModel,
    ValidationError,
    load_model,
)
from .fairness_opt import UtilitySpec, solve_fairness
from .fluid_region import boundary_trace
from .mqms_sim import ArrivalModel, arrivals_from_descriptor, delay_bound, run as run_sim


def _round12(obj):
    """Normalize floats to 12 significant digits so output bytes are stable."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_round12(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _announce(cfg: dict) -> str:
    print(f"config: {json.dumps(cfg, sort_keys=True)}", file=sys.stderr)
    return _config_hash(cfg)


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(_round12(payload), indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        print(f"wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _emit_csv(header: list[str], rows, out: str | None, meta: str) -> None:
    lines = [f"# {meta}", ",".join(header)]
    for row in rows:
        cells = []
        for x in row:
            if isinstance(x, float):
                cells.append(f"{x:.12g}")
            else:
                cells.append(str(x))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        print(f"wrote {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _parse_rates(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise ValidationError(f"could not parse rate list {text!r}") from None


def _load_arrivals(path: str) -> ArrivalModel:
    with open(path) as fh:
        return arrivals_from_descriptor(json.load(fh))


def _default_threads() -> int:
    return int(os.environ.get("MQMS_THREADS", "1"))


# -- subcommands -----------------------------------------------------------


def _cmd_vhat(args) -> int:
    cfg = {"subcommand": "vhat", "N": args.N, "M": args.M, "cap": args.cap, "version": __version__}
    h = _announce(cfg)
    directions = build_vhat(args.M, args.N, cap=args.cap)
    payload = {
        "N": args.N,
        "M": args.M,
        "vhat": [list(a) for a in directions],
        "vhat_size": len(directions),
        "wn_minus_zero": wn_count(args.M, args.N) - 1,
        "config_hash": h,
        "version": __version__,
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_region(args) -> int:
    cfg = {
        "subcommand": "region", "model": args.model, "format": args.format,
        "method": args.method, "version": __version__,
    }
    h = _announce(cfg)
    model = load_model(args.model)
    if isinstance(model, ContinuousChannelModel):
        raise ValidationError("region requires a discrete model; use fluid-boundary instead")
    region = build_region(model, method=args.method)
    if args.format == "csv":
        header = [f"alpha_{n+1}" for n in range(region.N)] + ["beta"]
        rows = [list(alpha) + [beta] for alpha, beta in region.inequalities]
        _emit_csv(header, rows, args.out, f"config_hash={h} version={__version__}")
    else:
        payload = region.to_dict()
        payload.update({"config_hash": h, "version": __version__})
        _emit_json(payload, args.out)
    return 0


def _cmd_check(args) -> int:
    cfg = {
        "subcommand": "check", "model": args.model, "lambda": args.rates,
        "version": __version__,
    }
    h = _announce(cfg)
    model = load_model(args.model)
    rates = _parse_rates(args.rates)
    region = build_region(model)
    delta = membership_margin(region, rates)
    payload = {
        "lambda": rates,
        "delta": delta,
        "verdict": region.verdict(rates),
        "config_hash": h,
        "version": __version__,
    }
    _emit_json(payload, args.out)
    return 0


def _verdict_to_stability(verdict: str) -> str:
    return {"interior": "stable", "boundary": "boundary", "outside": "unstable"}[verdict]


def _cmd_simulate(args) -> int:
    cfg = {
        "subcommand": "simulate", "model": args.model, "arrivals": args.arrivals,
        "policy": args.policy, "slots": args.slots, "seed": args.seed,
        "reps": args.reps, "tie_rule": args.tie_rule, "threads": args.threads,
        "version": __version__,
    }
    h = _announce(cfg)
    model = load_model(args.model)
    arrivals = _load_arrivals(args.arrivals)
    result = run_sim(
        model, arrivals, policy=args.policy, T=args.slots, seed=args.seed,
        replications=args.reps, tie_rule=args.tie_rule, threads=args.threads,
        record_trace=args.trace is not None,
    )
    agg = result.aggregate()
    region = build_region(model)
    delta = membership_margin(region, arrivals.mean_rates())
    payload = {
        "avg_aggregate_occupancy": agg["avg_aggregate_occupancy"],
        "per_queue_avgs": agg["per_queue_avgs"],
        "throughput": agg["throughput"],
        "delta": delta,
        "verdict": _verdict_to_stability(region.verdict(arrivals.mean_rates())),
        "replications": [
            {
                "replication": s.replication,
                "avg_aggregate_occupancy": s.avg_aggregate_occupancy,
                "per_queue_avgs": list(s.per_queue_avg),
                "throughput": list(s.throughput),
                "final_queue": list(s.final_queue),
            }
            for s in result.replications
        ],
        "config_hash": h,
        "version": __version__,
    }
    if delta > 0:
        payload["bound"] = delay_bound(model.N, arrivals.a_max_sq, model.M, model.K, delta)
    if args.trace:
        N = model.N
        header = (
            ["t"] + [f"X_{n+1}" for n in range(N)]
            + [f"served_{n+1}" for n in range(N)]
            + [f"arrived_{n+1}" for n in range(N)]
        )
        rows = [[int(x) for x in row] for row in result.trace]
        _emit_csv(header, rows, args.trace, f"config_hash={h} version={__version__}")
    _emit_json(payload, args.out)
    return 0


def _cmd_delay_bound(args) -> int:
    cfg = {
        "subcommand": "delay-bound", "model": args.model, "arrivals": args.arrivals,
        "delta": args.delta, "version": __version__,
    }
    h = _announce(cfg)
    model = load_model(args.model)
    arrivals = _load_arrivals(args.arrivals)
    if args.delta is not None:
        delta = args.delta
    else:
        region = build_region(model)
        delta = membership_margin(region, arrivals.mean_rates())
    bound = delay_bound(model.N, arrivals.a_max_sq, model.M, model.K, delta)
    payload = {
        "N": model.N, "M": model.M, "K": model.K,
        "a_max_sq": arrivals.a_max_sq, "delta": delta, "bound": bound,
        "config_hash": h, "version": __version__,
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_fluid_boundary(args) -> int:
    cfg = {
        "subcommand": "fluid-boundary", "model": args.model,
        "directions": args.directions, "samples": args.samples, "seed": args.seed,
        "version": __version__,
    }
    h = _announce(cfg)
    model = load_model(args.model)
    if not isinstance(model, ContinuousChannelModel):
        raise ValidationError("fluid-boundary requires a continuous model")
    curve = boundary_trace(model, directions=args.directions, samples=args.samples, seed=args.seed)
    rows = [
        [float(l1), float(l2), float(se)]
        for l1, l2, se in zip(curve.lambda1, curve.lambda2, curve.stderr)
    ]
    _emit_csv(["lambda1", "lambda2", "stderr"], rows, args.out, f"config_hash={h} version={__version__}")
    return 0


def _cmd_fairness(args) -> int:
    cfg = {
        "subcommand": "fairness", "model": args.model, "utility": args.utility,
        "caps": args.caps, "weights": args.weights, "epsilon": args.epsilon,
        "fairness_alpha": args.fairness_alpha, "tol": args.tol,
        "max_iters": args.max_iters, "line_search": args.line_search,
        "version": __version__,
    }
    h = _announce(cfg)
    model = load_model(args.model)
    caps = _parse_rates(args.caps) if args.caps else None
    if args.utility == "linear":
        weights = _parse_rates(args.weights) if args.weights else [1.0] * model.N
        spec = UtilitySpec.weighted_linear(weights, caps=caps)
    elif args.utility == "log":
        spec = UtilitySpec.log_shifted(model.N, epsilon=args.epsilon, caps=caps)
    elif args.utility == "alpha_fair":
        spec = UtilitySpec.alpha_fair(model.N, args.fairness_alpha, caps=caps)
    else:
        raise ValidationError(f"unknown utility {args.utility!r}")
    sol = solve_fairness(
        model, spec, tol=args.tol, max_iters=args.max_iters,
        step_rule="line_search" if args.line_search else "open_loop",
    )
    payload = {
        "r_star": sol.r_star.tolist(),
        "objective": sol.objective,
        "gap": sol.gap,
        "iterations": sol.iterations,
        "binding_constraints": [list(a) for a in sol.binding],
        "config_hash": h,
        "version": __version__,
    }
    _emit_json(payload, args.out)
    return 0


def oracle_check(model: DiscreteChannelModel, state_cap: int = 4096) -> dict:
    """Cross-check the support function against its independent oracles.

    Compares the fast path with the literal all-allocations enumeration on
    every canonical direction, and for ON-OFF models also with the subset
    closed form.  Returns the per-direction deviations and the maximum.
    """
    directions = build_vhat(model.M, model.N)
    deviations = []
    for alpha in directions:
        fast = support_function(model, alpha)
        slow = brute_force_support(model, alpha, state_cap=state_cap, alloc_cap=state_cap)
        deviations.append(abs(fast - slow))
    report = {
        "directions_checked": len(directions),
        "max_abs_deviation": max(deviations),
        "ok": max(deviations) <= 1e-9,
    }
    if model.kind == "bernoulli":
        p = np.array(model.p)
        onoff_dev = 0.0
        for mask in range(1, 2**model.N):
            alpha = [(mask >> n) & 1 for n in range(model.N)]
            Q = [n for n in range(model.N) if alpha[n]]
            onoff_dev = max(onoff_dev, abs(support_function(model, alpha) - onoff_support(p, Q)))
        report["onoff_max_deviation"] = onoff_dev
        report["ok"] = report["ok"] and onoff_dev <= 1e-9
    return report


def _cmd_oracle_check(args) -> int:
    cfg = {
        "subcommand": "oracle-check", "model": args.model, "state_cap": args.state_cap,
        "version": __version__,
    }
    h = _announce(cfg)
    model = load_model(args.model)
    report = oracle_check(model, state_cap=args.state_cap)
    n = report["directions_checked"]
    status = "==" if report["ok"] else "!="
    print(f"support_function {status} brute_force on {n}/{n} directions")
    report.update({"config_hash": h, "version": __version__})
    _emit_json(report, args.out)
    return 0 if report["ok"] else 1


# -- parser ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mqms",
        description="Stability regions, max-weight simulation, fluid boundaries, "
                    "and fair rate allocation for multi-queue multi-server systems.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("vhat", help="enumerate the canonical inequality directions")
    p.add_argument("--N", type=int, required=True, help="number of queues")
    p.add_argument("--M", type=int, required=True, help="maximum link capacity")
    p.add_argument("--cap", type=int, default=10_000_000, help="enumeration size cap")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_vhat)

    p = sub.add_parser("region", help="compute the stability-region inequalities")
    p.add_argument("--model", required=True, help="model descriptor JSON")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--method", choices=["auto", "vhat", "onoff"], default="auto")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=_cmd_region)

    p = sub.add_parser("check", help="membership margin and verdict for a rate point")
    p.add_argument("--model", required=True)
    p.add_argument("--lambda", dest="rates", required=True, help="comma-separated rates")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("simulate", help="slot-by-slot scheduling simulation")
    p.add_argument("--model", required=True)
    p.add_argument("--arrivals", required=True, help="arrival descriptor JSON")
    p.add_argument("--policy", choices=["mw", "as_lcq"], default="mw")
    p.add_argument("--slots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--tie-rule", choices=["lowest_index", "highest_index"], default="lowest_index")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--trace", help="write replication 0's trace CSV here")
    p.add_argument("--out", help="summary JSON path (default stdout)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("delay-bound", help="occupancy bound for an interior rate vector")
    p.add_argument("--model", required=True)
    p.add_argument("--arrivals", required=True)
    p.add_argument("--delta", type=float, default=None, help="override the computed margin")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_delay_bound)

    p = sub.add_parser("fluid-boundary", help="trace the two-queue fluid stability boundary")
    p.add_argument("--model", required=True)
    p.add_argument("--directions", type=int, default=181)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="curve CSV path (default stdout)")
    p.set_defaults(func=_cmd_fluid_boundary)

    p = sub.add_parser("fairness", help="utility-fair rate allocation over the region")
    p.add_argument("--model", required=True)
    p.add_argument("--utility", choices=["log", "linear", "alpha_fair"], default="log")
    p.add_argument("--caps", help="comma-separated per-queue caps")
    p.add_argument("--weights", help="comma-separated weights (linear utility)")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--fairness-alpha", type=float, default=2.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--line-search", action="store_true", help="exact line search instead of 2/(k+2)")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_fairness)

    p = sub.add_parser("oracle-check", help="cross-check support values against brute force")
    p.add_argument("--model", required=True)
    p.add_argument("--state-cap", type=int, default=4096)
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
