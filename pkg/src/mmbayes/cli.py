"""Batch command-line entry point.

Subcommands: elicit, posterior, classify, gibbs, simulate, serve. Every
randomized command requires an explicit --seed; identical invocations
produce identical stdout and artifacts. Exit codes: 0 success, 1 data
error (single machine-parseable line on stderr), 2 usage error.

Human-readable numbers print at 6 significant digits; --json switches to
full-precision JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classifier import COLOURS, default_profiles, load_profiles, parse_lot_code
from .conjugate import density_grid, summarize_beta, update_beta_binomial
from .distributions import BetaParams, CountVector, DirichletParams
from .elicitation import NonConvergentFit, fit_beta_from_mean_ess, fit_beta_from_quantiles
from .hierarchical import (
    BagTally,
    ChainConfig,
    ChainOutput,
    HierarchicalPriors,
    diagnostics,
    exact_posterior,
    run_chain,
    simulate_bags,
    summarize_chain,
)
from .plotting import write_plot
from .rng import RngState
from .session import parse_tally_csv


class DataError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _parse_floats(text: str, name: str, expected: int | None = None) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise DataError(f"{name} must be comma-separated numbers, got {text!r}")
    if expected is not None and len(values) != expected:
        raise DataError(f"{name} needs exactly {expected} values, got {len(values)}")
    return values


def _read_csv_rows(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}")
    try:
        return parse_tally_csv(text)
    except ValueError as exc:
        raise DataError(str(exc))


def _rows_to_blue_total(rows) -> tuple[int, int]:
    blue = sum(counts["blue"] for _, counts in rows)
    total = sum(sum(counts.values()) for _, counts in rows)
    return blue, total


def _rows_to_bags(rows) -> list[BagTally]:
    bags = []
    for bag_id, counts in rows:
        if set(counts) != set(COLOURS):
            raise DataError(
                f"bag {bag_id!r} lacks full six-colour counts; the mixture "
                "model needs the six-colour CSV format")
        bags.append(BagTally(
            bag_id=bag_id,
            counts=CountVector(np.array([counts[c] for c in COLOURS]))))
    return bags


def _emit(args, human_lines: list[str], payload: dict) -> None:
    if args.json:
        print(json.dumps(_de_nan(payload), indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def _de_nan(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) else obj
    if isinstance(obj, dict):
        return {k: _de_nan(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_de_nan(v) for v in obj]
    return obj


def _maybe_plot(args, grid, mean=None, title=None) -> list[str]:
    if not getattr(args, "plot", None):
        return []
    artifact = write_plot(grid, args.plot, mean=mean, title=title)
    return [f"wrote {artifact.format} plot to {artifact.path}"]


def cmd_elicit(args) -> None:
    if args.quantiles is not None:
        q1, t1, q2, t2 = _parse_floats(args.quantiles, "--quantiles", 4)
        try:
            params = fit_beta_from_quantiles([(q1, t1), (q2, t2)])
        except NonConvergentFit as exc:
            raise DataError(
                f"no beta matches those quantiles (best residual {exc.residual:.3g})")
        except ValueError as exc:
            raise DataError(str(exc))
    else:
        try:
            params = fit_beta_from_mean_ess(args.mean, args.ess)
        except ValueError as exc:
            raise DataError(str(exc))
    grid = density_grid(params, args.grid)
    human = [f"prior  Beta({_fmt(params.alpha)}, {_fmt(params.beta)})",
             f"mean   {_fmt(params.alpha / (params.alpha + params.beta))}",
             f"ess    {_fmt(params.alpha + params.beta)}"]
    human += _maybe_plot(args, grid, mean=params.alpha / (params.alpha + params.beta))
    _emit(args, human, {"alpha": params.alpha, "beta": params.beta})


def cmd_posterior(args) -> None:
    a, b = _parse_floats(args.prior, "--prior", 2)
    try:
        prior = BetaParams(a, b)
    except ValueError as exc:
        raise DataError(str(exc))
    if args.csv:
        blue, total = _rows_to_blue_total(_read_csv_rows(args.csv))
    else:
        blue, total = args.y, args.n
    try:
        data = CountVector.from_successes(blue, total)
    except ValueError as exc:
        raise DataError(str(exc))
    posterior = update_beta_binomial(prior, data)
    summary = summarize_beta(posterior.params, args.level)
    grid = density_grid(posterior.params, args.grid)
    human = [
        f"prior      Beta({_fmt(prior.alpha)}, {_fmt(prior.beta)})",
        f"data       y={blue} n={total}",
        f"posterior  Beta({_fmt(posterior.params.alpha)}, {_fmt(posterior.params.beta)})",
        f"mean       {_fmt(summary.mean)}",
        f"mode       {_fmt(summary.mode) if summary.mode is not None else 'undefined'}",
        f"variance   {_fmt(summary.variance)}",
        f"{args.level:.0%} interval [{_fmt(summary.interval[0])}, {_fmt(summary.interval[1])}]",
    ]
    human += _maybe_plot(args, grid, mean=summary.mean)
    _emit(args, human, {
        "prior": {"alpha": prior.alpha, "beta": prior.beta},
        "data": {"y": blue, "n": total},
        "posterior": {"alpha": posterior.params.alpha, "beta": posterior.params.beta},
        "summary": {
            "mean": summary.mean, "mode": summary.mode,
            "variance": summary.variance,
            "interval": list(summary.interval), "level": summary.level,
        },
    })


def cmd_classify(args) -> None:
    profiles = load_profiles(args.profiles) if args.profiles else default_profiles()
    rows = _read_csv_rows(args.csv)
    from .classifier import classify_blue, classify_full

    if args.full:
        bags = _rows_to_bags(rows)
        pooled = CountVector(np.sum([b.counts.counts for b in bags], axis=0))
        result = classify_full(pooled, profiles)
        mode = "six-colour"
    else:
        blue, total = _rows_to_blue_total(rows)
        result = classify_blue(CountVector.from_successes(blue, total), profiles)
        mode = "blue-only"
    human = [f"factory posterior ({mode}):"]
    for profile, prob in zip(profiles, result.probs):
        human.append(f"  {profile.name:<12} P={_fmt(float(prob))}  (lot {profile.lot_code})")
    human.append(
        f"log Bayes factor ({profiles[0].name} vs {profiles[1].name}): "
        f"{_fmt(result.log_bayes_factor)}")
    lots = []
    for text in args.lot or []:
        parsed = parse_lot_code(text, profiles)
        lots.append({"text": text, "factory": parsed.factory, "reason": parsed.reason})
        verdict = parsed.factory or f"unknown ({parsed.reason})"
        human.append(f"lot {text!r} -> {verdict}")
    _emit(args, human, {
        "mode": mode,
        "factories": [
            {"name": p.name, "lot_code": p.lot_code, "probability": float(prob)}
            for p, prob in zip(profiles, result.probs)],
        "log_bayes_factor": result.log_bayes_factor,
        "lot_codes": lots,
    })


def _summary_payload(summary) -> dict:
    return {
        "assignment_probs": summary.assignment_probs.tolist(),
        "theta_mean": summary.theta_mean.tolist(),
        "beta_means": summary.beta_means.tolist(),
    }


def cmd_gibbs(args) -> None:
    bags = _rows_to_bags(_read_csv_rows(args.csv))
    alpha = _parse_floats(args.alpha, "--alpha")
    eta = _parse_floats(args.eta, "--eta", len(COLOURS))
    try:
        priors = HierarchicalPriors(
            alpha=DirichletParams(np.array(alpha)),
            eta=DirichletParams(np.array(eta)))
    except ValueError as exc:
        raise DataError(str(exc))
    seeds = [int(s) for s in
             np.random.SeedSequence(args.seed).generate_state(args.chains)]
    configs = [ChainConfig(seed=s, iterations=args.iters,
                           burn_in=args.burn, thin=args.thin) for s in seeds]
    try:
        if args.chains > 1:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=args.chains) as pool:
                chains = list(pool.map(
                    lambda cfg: run_chain(bags, priors, cfg), configs))
        else:
            chains = [run_chain(bags, priors, configs[0])]
    except ValueError as exc:
        raise DataError(str(exc))
    merged = ChainOutput(
        states=[s for c in chains for s in c.states],
        seed=args.seed, burn_in=args.burn, thin=args.thin,
        total_iterations=args.iters * args.chains)
    summary = summarize_chain(merged)
    payload = {
        "bags": [b.bag_id for b in bags],
        "chains": args.chains,
        "seed": args.seed,
        "summary": _summary_payload(summary),
        "diagnostics": [
            {name: {"ess": d.effective_sample_size, "split_r_hat": d.split_r_hat}
             for name, d in diagnostics(chain).items()}
            for chain in chains],
    }
    if args.exact_check:
        try:
            exact = exact_posterior(bags, priors)
        except ValueError as exc:
            raise DataError(str(exc))
        gap = max(
            float(np.max(np.abs(summary.assignment_probs - exact.assignment_probs)))
            if len(bags) else 0.0,
            float(np.max(np.abs(summary.beta_means - exact.beta_means))))
        payload["exact_check"] = {
            "max_abs_discrepancy": gap,
            "exact": _summary_payload(exact),
        }
    print(json.dumps(_de_nan(payload), indent=2, sort_keys=True))
    if args.exact_check:
        print(f"exact-check max abs discrepancy: {payload['exact_check']['max_abs_discrepancy']:.6g}",
              file=sys.stderr)


def cmd_simulate(args) -> None:
    theta = _parse_floats(args.theta, "--theta")
    profiles = load_profiles(args.beta_file) if args.beta_file else default_profiles()
    if len(theta) != len(profiles):
        raise DataError(
            f"--theta has {len(theta)} weights but the profile file defines "
            f"{len(profiles)} factories")
    beta = np.stack([p.colour_proportions for p in profiles])
    rng = RngState(args.seed)
    try:
        bags, true_z = simulate_bags(theta, beta, [args.bag_size] * args.bags, rng)
    except ValueError as exc:
        raise DataError(str(exc))
    lines = [",".join(["bag_id", *COLOURS])]
    for bag in bags:
        lines.append(",".join([bag.bag_id, *map(str, bag.counts.counts.tolist())]))
    out = Path(args.out)
    with out.open("w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    truth = {
        "seed": args.seed,
        "theta": theta,
        "beta": beta.tolist(),
        "factories": [p.name for p in profiles],
        "z": true_z.tolist(),
        "bag_ids": [b.bag_id for b in bags],
    }
    truth_path = out.with_suffix(".truth.json")
    truth_path.write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(bags)} bags to {out} (truth sidecar: {truth_path})")


def cmd_serve(args) -> None:
    import uvicorn

    from .service import create_app

    host, _, port = args.addr.rpartition(":")
    if not host or not port.isdigit():
        raise DataError(f"--addr must look like HOST:PORT, got {args.addr!r}")
    app = create_app(
        args.data_dir,
        fsync=not args.no_fsync,
        profiles_path=args.profiles,
        ui_dir=args.ui_dir)
    uvicorn.run(app, host=host, port=int(port), log_level="info")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmbayes",
        description="Bayesian inference for candy colour counts.")
    parser.add_argument("--version", action="version", version=f"mmbayes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("elicit", help="fit a beta prior from beliefs")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--mean", type=float, help="prior mean in (0,1)")
    group.add_argument("--quantiles", help="q1,theta1,q2,theta2 CDF constraints")
    p.add_argument("--ess", type=float, help="prior pseudo-count (with --mean)")
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--plot", help="write .svg or .csv density plot")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_elicit)

    p = sub.add_parser("posterior", help="conjugate beta-binomial update")
    p.add_argument("--prior", required=True, help="alpha,beta")
    p.add_argument("--csv", help="tally CSV (full or blue-only format)")
    p.add_argument("--y", type=int, help="blue count (with --n)")
    p.add_argument("--n", type=int, help="total count (with --y)")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--plot", help="write .svg or .csv density plot")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_posterior)

    p = sub.add_parser("classify", help="which factory produced these counts?")
    p.add_argument("--csv", required=True)
    p.add_argument("--profiles", help="factory profile config JSON")
    p.add_argument("--full", action="store_true", help="use all six colours")
    p.add_argument("--lot", action="append", help="lot-code text to verify (repeatable)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gibbs", help="hierarchical mixture inference")
    p.add_argument("--csv", required=True, help="six-colour tally CSV")
    p.add_argument("--alpha", default="1,1", help="factory prior concentrations")
    p.add_argument("--eta", default="1,1,1,1,1,1", help="colour prior concentrations")
    p.add_argument("--iters", type=int, default=10_000)
    p.add_argument("--burn", type=int, default=2_000)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--exact-check", action="store_true",
                   help="compare against exact enumeration (B <= 12)")
    p.set_defaults(func=cmd_gibbs)

    p = sub.add_parser("simulate", help="draw synthetic bags from known truth")
    p.add_argument("--theta", required=True, help="mixture weights, e.g. 0.6,0.4")
    p.add_argument("--beta-file", help="factory profile config JSON (default: shipped)")
    p.add_argument("--bags", type=int, required=True)
    p.add_argument("--bag-size", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the classroom session service")
    p.add_argument("--addr", default="127.0.0.1:8000")
    p.add_argument("--data-dir", default="./mmbayes-sessions")
    p.add_argument("--profiles", help="factory profile config JSON")
    p.add_argument("--ui-dir", help="static assets for the companion UI")
    p.add_argument("--no-fsync", action="store_true")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "elicit" and args.mean is not None and args.ess is None:
        parser.error("--mean requires --ess")
    if args.command == "posterior":
        has_counts = args.y is not None and args.n is not None
        if bool(args.csv) == has_counts:
            parser.error("give exactly one data source: --csv or both --y and --n")
    try:
        args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
