"""Command-line front end.

Subcommands map onto the library's main operations:

* ``gen``      scenario from a config file -> scenario.csv
* ``approx``   reference-vs-series cdf comparison for one sensor -> cdf_compare.csv
* ``sweep``    approximation-error / allocation sweeps -> <experiment>.csv
* ``allocate`` greedy or random coloring -> allocation.csv (+ trace.csv)
* ``report``   per-sensor outage for an allocation -> outage.csv

Shared flags: ``--config`` (key=value file; library defaults when omitted),
``--seed`` (overrides the config seed and derives all other randomness),
``--out`` (output directory), ``--mode``, ``--method``.  Exit codes: 0 on
success, 1 on runtime failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import access, allocation, experiments, outage
from .scenario import (
    ScenarioConfig,
    config_summary,
    generate_scenario,
    load_scenario_config,
    write_scenario_csv,
)

__all__ = ["build_parser", "main", "entry"]


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="scenario config file")
    parser.add_argument(
        "--seed", type=int, default=None, help="override the scenario seed"
    )
    parser.add_argument(
        "--out", metavar="DIR", default=".", help="output directory (default: .)"
    )
    parser.add_argument(
        "--mode", choices=access.MODES, default="single", help="resource mode"
    )
    parser.add_argument(
        "--method",
        default="cf",
        help="outage evaluator: gc0..gc5, gc (=gc5), cf, or mc",
    )
    parser.add_argument(
        "--grid-points",
        type=int,
        default=1 << 12,
        help="frequency-grid size for cf evaluations (power of two)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmtc-outage",
        description="Interference statistics, outage, and beam resource allocation",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a scenario CSV")
    _add_shared(gen)

    approx = commands.add_parser(
        "approx", help="compare series orders against the reference law"
    )
    _add_shared(approx)
    approx.add_argument(
        "--sensor", type=int, default=0, help="sensor id to analyze (default 0)"
    )

    sweep = commands.add_parser("sweep", help="run a sweep experiment")
    _add_shared(sweep)
    sweep.add_argument(
        "experiment",
        choices=[e for e in experiments.EXPERIMENTS if e != "cdf_compare"],
        help="experiment to run",
    )
    sweep.add_argument(
        "--values",
        default="",
        help="comma-separated sweep values (sensor counts or activities)",
    )
    sweep.add_argument(
        "--orders",
        default="0,1,2,3,4,5",
        help="comma-separated series orders for error sweeps",
    )
    sweep.add_argument("--reps", type=int, default=1, help="repetitions per point")
    sweep.add_argument(
        "--cdf-points", type=int, default=201, help="grid size for outage_cdf"
    )

    alloc = commands.add_parser("allocate", help="color the interference graph")
    _add_shared(alloc)
    alloc.add_argument(
        "--strategy", choices=("greedy", "random"), default="greedy"
    )
    alloc.add_argument("--max-iterations", type=int, default=10)
    alloc.add_argument("--improvement-threshold", type=float, default=1e-4)
    alloc.add_argument("--color-bound", type=int, default=None)

    report = commands.add_parser("report", help="per-sensor outage report")
    _add_shared(report)
    report.add_argument(
        "--strategy", choices=("greedy", "random"), default="greedy"
    )
    report.add_argument(
        "--allocation",
        metavar="PATH",
        default=None,
        help="report an allocation CSV instead of recomputing one",
    )
    report.add_argument(
        "--draws", type=int, default=100_000, help="draws for --method mc"
    )
    return parser


def _load_config(args) -> ScenarioConfig:
    config = load_scenario_config(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    return config


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _method_for(args) -> outage.OutageMethod:
    method = outage.parse_method(args.method)
    if isinstance(method, outage.CharFnMethod):
        return outage.CharFnMethod(args.grid_points)
    if isinstance(method, outage.MonteCarloMethod):
        draws = getattr(args, "draws", method.draws)
        return outage.MonteCarloMethod(draws=draws, seed=args.seed or 0)
    return method


def _parse_values(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _cmd_gen(args) -> int:
    config = _load_config(args)
    scenario = generate_scenario(config)
    write_scenario_csv(scenario, _out_dir(args) / "scenario.csv")
    return 0


def _cmd_approx(args) -> int:
    config = _load_config(args)
    spec = experiments.ExperimentSpec(
        experiment="cdf_compare",
        config=config,
        seed=config.seed,
        sensor=args.sensor,
        grid_points=args.grid_points,
    )
    result = experiments.run_experiment(spec)
    experiments.write_experiment_csv(result, _out_dir(args) / "cdf_compare.csv")
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    orders = tuple(int(v) for v in args.orders.split(",") if v.strip())
    spec = experiments.ExperimentSpec(
        experiment=args.experiment,
        config=config,
        seed=config.seed,
        mode=args.mode,
        method=args.method,
        sweep=_parse_values(args.values),
        orders=orders,
        reps=args.reps,
        grid_points=args.grid_points,
        cdf_points=args.cdf_points,
    )
    result = experiments.run_experiment(spec)
    experiments.write_experiment_csv(result, _out_dir(args) / f"{args.experiment}.csv")
    return 0


def _cmd_allocate(args) -> int:
    config = _load_config(args)
    scenario = generate_scenario(config)
    out = _out_dir(args)
    if args.strategy == "random":
        alloc = allocation.random_allocate(
            scenario, args.mode, config.seed, color_bound=args.color_bound
        )
    else:
        result = allocation.greedy_allocate(
            scenario,
            args.mode,
            allocation.GreedyConfig(
                max_iterations=args.max_iterations,
                improvement_threshold=args.improvement_threshold,
                color_bound=args.color_bound,
                init_seed=config.seed,
            ),
        )
        alloc = result.allocation
        allocation.write_trace_csv(result, out / "trace.csv")
    access.write_allocation_csv(alloc, out / "allocation.csv")
    return 0


def _cmd_report(args) -> int:
    config = _load_config(args)
    scenario = generate_scenario(config)
    if args.allocation is not None:
        alloc = access.read_allocation_csv(args.allocation)
        if alloc.num_tuples != scenario.num_tuples:
            raise ValueError(
                f"allocation covers {alloc.num_tuples} tuples but the scenario "
                f"has {scenario.num_tuples}"
            )
    elif args.strategy == "random":
        alloc = allocation.random_allocate(scenario, args.mode, config.seed)
    else:
        alloc = allocation.greedy_allocate(
            scenario, args.mode, allocation.GreedyConfig(init_seed=config.seed)
        ).allocation
    report = outage.average_outage(alloc, scenario, _method_for(args))
    outage.write_outage_csv(
        report,
        _out_dir(args) / "outage.csv",
        note=f"grid_points={args.grid_points} config: {config_summary(config)}",
    )
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "approx": _cmd_approx,
    "sweep": _cmd_sweep,
    "allocate": _cmd_allocate,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except OSError as exc:
        name = exc.filename if exc.filename else ""
        print(f"error: {name}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
