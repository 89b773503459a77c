"""Command-line front end.

Subcommands: bias-sweep, schedule, model-problem, figure1, minimize.
Exit codes: 0 success, 2 configuration error, 3 divergence.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import harness
from .core import load_dataset_csv
from .harness import ConfigError, DivergenceError, ExperimentConfig
from .objectives import LogRegObjective, logreg_constants
from .optimizers import InverseDecay, OptimizerKind

OBJECTIVES = ("gaussian", "simdata", "logreg")
OPTIMIZERS = ("sgd", "hb", "nag", "strang")


def _common_flags(sub):
    sub.add_argument("--objective", choices=OBJECTIVES, default="gaussian")
    sub.add_argument("--data", help="dataset CSV for --objective logreg")
    sub.add_argument("--optimizer", choices=OPTIMIZERS, default="sgd")
    sub.add_argument("--strategy", choices=("rm", "rr", "sms", "ig", "so"), default="rm")
    sub.add_argument("--n", type=int, default=1, help="batch size")
    sub.add_argument("--gamma", type=float, help="friction (default sqrt of curvature scale)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--reps", type=int, help="realizations (default 100)")
    sub.add_argument("--hgrid", help="comma-separated stepsizes")
    sub.add_argument("--delta", type=float, default=1.0 / 3.0, help="decay rate of the schedule")
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--out", help="output CSV path")


def _build_objective(args):
    if args.objective == "simdata":
        return harness.make_simdata_objective()
    if args.objective == "gaussian":
        # unit-curvature ramp with 8 batches per epoch
        return harness.ramp_gaussian_objective(8 * args.n)
    if args.data is None:
        raise ConfigError("--objective logreg needs --data")
    dataset = load_dataset_csv(args.data)
    _, lam = logreg_constants(dataset)
    return LogRegObjective(dataset, lam)


def _build_kind(args, obj) -> OptimizerKind:
    if args.optimizer == "sgd":
        return OptimizerKind("sgd")
    gamma = args.gamma
    if gamma is None:
        gamma = math.sqrt(harness.curvature_scale(obj))
    return OptimizerKind(args.optimizer, gamma)


def _parse_hgrid(text):
    if text is None:
        return None
    try:
        grid = np.array([float(tok) for tok in text.split(",") if tok.strip()])
    except ValueError as exc:
        raise ConfigError(f"bad --hgrid: {exc}") from exc
    if grid.size == 0:
        raise ConfigError("bad --hgrid: no values")
    return grid


def _print_sweep(result):
    for row in result.rows:
        flag = "  DIVERGED" if row.diverged else ""
        print(f"h={row.h:<12.6g} rmse={row.rmse:<12.6g} stderr={row.stderr:<12.6g}{flag}")
    print(f"fitted slope: {result.fitted_slope:.4f}")


def cmd_bias_sweep(args) -> int:
    obj = _build_objective(args)
    kind = _build_kind(args, obj)
    config = ExperimentConfig(
        obj,
        kind,
        args.strategy,
        n=args.n,
        seed=args.seed,
        realizations=args.reps if args.reps is not None else 100,
        h_grid=_parse_hgrid(args.hgrid),
        epochs=args.epochs,
    )
    result = harness.bias_sweep(config)
    if args.out:
        harness.write_csv(result, args.out)
    _print_sweep(result)
    return 3 if any(r.diverged for r in result.rows) else 0


def cmd_schedule(args) -> int:
    obj = _build_objective(args)
    kind = _build_kind(args, obj)
    R = math.ceil(obj.N / args.n)
    L_total, _ = harness.convexity_constants(obj)
    config = ExperimentConfig(
        obj,
        kind,
        args.strategy,
        n=args.n,
        seed=args.seed,
        realizations=args.reps if args.reps is not None else 100,
        schedule=InverseDecay(L_total, args.delta, R),
        epochs=args.epochs,
    )
    result = harness.schedule_run(config)
    if args.out:
        harness.write_csv(result, args.out)
    last = result.rows[-1]
    print(f"epochs={last.epochs} final rmse={last.rmse:.6g}")
    return 0


def cmd_model_problem(args) -> int:
    reps = args.reps if args.reps is not None else 100_000
    gamma = args.gamma if args.gamma is not None else 1.0
    rows = harness.model_problem_table(reps=reps, seed=args.seed, gamma=gamma)
    lines = [
        f"{'dynamics':<10}{'strategy':<10}{'R':<4}{'analytic':<14}{'mc':<14}{'se':<12}{'z':<8}"
    ]
    for r in rows:
        lines.append(
            f"{r['dynamics']:<10}{r['strategy']:<10}{r['R']:<4}"
            f"{r['analytic']:<14.6e}{r['mc']:<14.6e}{r['se']:<12.3e}{r['zscore']:<8.2f}"
        )
    text = "\n".join(lines)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    worst = max(abs(r["zscore"]) for r in rows)
    print(f"max |z| = {worst:.2f}")
    return 0


def cmd_figure1(args) -> int:
    result = harness.figure1_experiment(
        strategy=args.strategy,
        constant_sigma=args.constant_sigma,
        realizations=args.reps if args.reps is not None else 100,
        seed=args.seed,
        h_grid=_parse_hgrid(args.hgrid),
    )
    if args.out:
        harness.write_csv(result, args.out)
    _print_sweep(result)
    return 3 if any(r.diverged for r in result.rows) else 0


def cmd_minimize(args) -> int:
    obj = _build_objective(args)
    x_star, f_star = harness.compute_minimizer(obj)
    gnorm = float(np.linalg.norm(obj.full_gradient(x_star)))
    print("x_star:", " ".join(repr(float(v)) for v in x_star))
    print(f"f_star: {f_star!r}")
    print(f"gradient norm: {gnorm:.3e}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgsplit",
        description="Minibatch-splitting experiments: bias sweeps, schedules, model problem.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sweep = subs.add_parser("bias-sweep", help="RMSE-vs-stepsize sweep at a fixed start")
    _common_flags(sweep)
    sweep.set_defaults(func=cmd_bias_sweep)

    sched = subs.add_parser("schedule", help="decaying-stepsize run, per-epoch RMSE")
    _common_flags(sched)
    sched.set_defaults(func=cmd_schedule)

    model = subs.add_parser("model-problem", help="closed forms vs Monte-Carlo table")
    _common_flags(model)
    model.set_defaults(func=cmd_model_problem)

    fig1 = subs.add_parser("figure1", help="heteroscedastic Euler experiment")
    _common_flags(fig1)
    fig1.add_argument("--constant-sigma", action="store_true")
    fig1.set_defaults(func=cmd_figure1, strategy="sms")

    mini = subs.add_parser("minimize", help="full-gradient minimizer of the objective")
    _common_flags(mini)
    mini.set_defaults(func=cmd_minimize)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
