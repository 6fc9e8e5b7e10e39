"""Reproducible experiment runners behind the command-line interface.

Each experiment maps a spec (scenario config + sweep/seed knobs) to a flat
CSV: a comment line recording the full spec, a column-header row, then data
rows.  Re-running the same spec reproduces the file byte for byte — every
random draw derives from ``SeedSequence([seed, point, rep])``.

Approximation-error experiments score the series against the numerically
inverted reference law by Jensen-Shannon divergence averaged over sensors,
under the complete-reuse allocation (every tuple on resource 1, single
mode), which is the densest interference the scenario can produce.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import access, allocation, outage
from .scenario import ScenarioConfig, config_summary, generate_scenario
from .stats_core import build_model, gram_charlier, jsd

__all__ = [
    "EXPERIMENTS",
    "ExperimentSpec",
    "ExperimentResult",
    "empirical_cdf",
    "full_reuse_allocation",
    "run_experiment",
    "write_experiment_csv",
]

EXPERIMENTS = (
    "cdf_compare",
    "error_vs_m",
    "error_vs_p",
    "outage_vs_m",
    "outage_vs_p",
    "outage_cdf",
)

_SWEEPING = {"error_vs_m", "error_vs_p", "outage_vs_m", "outage_vs_p"}


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce one experiment run."""

    experiment: str
    config: ScenarioConfig
    seed: int = 0
    mode: str = "single"
    method: str = "gc5"  # outage evaluator for the allocation sweeps
    sensor: int = 0  # cdf_compare target
    sweep: tuple[float, ...] = ()
    orders: tuple[int, ...] = (0, 1, 2, 3, 4, 5)
    reps: int = 1
    grid_points: int = 1 << 12
    cdf_points: int = 201  # outage_cdf resolution on [0, 1]

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; expected one of "
                f"{', '.join(EXPERIMENTS)}"
            )
        if self.mode not in access.MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        outage.parse_method(self.method)  # fail fast on typos
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.sensor < 0:
            raise ValueError("sensor must be >= 0")
        q = self.grid_points
        if q < 64 or q & (q - 1):
            raise ValueError(f"grid_points must be a power of two >= 64, got {q}")
        if not self.orders or any(not 0 <= k <= 5 for k in self.orders):
            raise ValueError("orders must be a nonempty subset of 0..5")
        if self.cdf_points < 2:
            raise ValueError("cdf_points must be >= 2")
        if self.experiment in _SWEEPING and not self.sweep:
            raise ValueError(f"{self.experiment} needs a nonempty sweep")

    def summary(self) -> str:
        sweep = ";".join(repr(float(v)) for v in self.sweep)
        orders = ";".join(str(k) for k in self.orders)
        return (
            f"# {self.experiment} seed={self.seed} mode={self.mode} "
            f"method={self.method} sensor={self.sensor} reps={self.reps} "
            f"grid_points={self.grid_points} cdf_points={self.cdf_points} "
            f"sweep=[{sweep}] orders=[{orders}] "
            f"config: {config_summary(self.config)}"
        )


@dataclass(frozen=True)
class ExperimentResult:
    spec_line: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


def _derived_entropy(seed: int, point: int, rep: int) -> tuple[int, int]:
    state = np.random.SeedSequence([seed, point, rep]).generate_state(2)
    return int(state[0]), int(state[1])


def full_reuse_allocation(scenario) -> access.ResourceAllocation:
    """Every tuple transmitting on resource 1 (single mode): complete reuse."""
    colors = np.ones((scenario.num_cns, scenario.num_beams), dtype=np.int64)
    return access.ResourceAllocation("single", colors, scenario.config.num_resources)


def empirical_cdf(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Fraction of values <= each grid point."""
    ordered = np.sort(np.asarray(values, dtype=float))
    return np.searchsorted(ordered, np.asarray(grid), side="right") / ordered.size


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_experiment_csv(result: ExperimentResult, path: str | Path) -> None:
    lines = [result.spec_line, ",".join(result.columns)]
    for row in result.rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


# ---------------------------------------------------------------------------
# individual experiments


def _cdf_compare(spec: ExperimentSpec) -> ExperimentResult:
    scenario_seed, _ = _derived_entropy(spec.seed, 0, 0)
    scenario = generate_scenario(replace(spec.config, seed=scenario_seed))
    if not 0 <= spec.sensor < scenario.num_sensors:
        raise ValueError(
            f"sensor {spec.sensor} out of range for {scenario.num_sensors} sensors"
        )
    alloc = full_reuse_allocation(scenario)
    weights, probs = outage.interference_terms(alloc, scenario, spec.sensor, 1)
    reference = outage.pooled_cf_densities(
        alloc, scenario, spec.grid_points, sensors=np.array([spec.sensor])
    )[(spec.sensor, 1)]
    model = build_model(list(zip(weights, probs)))
    width = (reference.upper - reference.lower) / reference.num_bins
    gamma = reference.grid + width  # cdf evaluated at right bin edges
    curves = [np.cumsum(reference.masses)]
    for order in range(6):
        approx = gram_charlier(model, order)
        binned = approx.discretize(reference.lower, reference.upper, reference.num_bins)
        curves.append(np.cumsum(binned.masses))
    columns = ("gamma", "cdf_ref") + tuple(f"cdf_gc{k}" for k in range(6))
    rows = tuple(
        (float(gamma[q]),) + tuple(float(c[q]) for c in curves)
        for q in range(gamma.size)
    )
    return ExperimentResult(spec.summary(), columns, rows)


def _series_divergence(scenario, alloc, orders, grid_points) -> dict[int, float]:
    """Mean-over-sensors JSD between the gridded reference law and each
    series order, all on the destination-shared reference grid."""
    dists = outage.pooled_cf_densities(alloc, scenario, grid_points)
    sums = {order: 0.0 for order in orders}
    for i in range(scenario.num_sensors):
        reference = dists[(i, 1)]
        weights, probs = outage.interference_terms(alloc, scenario, i, 1)
        model = build_model(list(zip(weights, probs)))
        for order in orders:
            binned = gram_charlier(model, order).discretize(
                reference.lower, reference.upper, reference.num_bins
            )
            sums[order] += jsd(reference, binned)
    return {order: total / scenario.num_sensors for order, total in sums.items()}


def _error_sweep(spec: ExperimentSpec, vary: str) -> ExperimentResult:
    rows = []
    for point, value in enumerate(spec.sweep):
        totals = {order: 0.0 for order in spec.orders}
        for rep in range(spec.reps):
            scenario_seed, _ = _derived_entropy(spec.seed, point, rep)
            if vary == "num_sensors":
                cfg = replace(spec.config, num_sensors=int(value), seed=scenario_seed)
            else:
                cfg = replace(spec.config, activity=float(value), seed=scenario_seed)
            scenario = generate_scenario(cfg)
            eps = _series_divergence(
                scenario, full_reuse_allocation(scenario), spec.orders, spec.grid_points
            )
            for order in spec.orders:
                totals[order] += eps[order]
        for order in spec.orders:
            sweep_value = int(value) if vary == "num_sensors" else float(value)
            rows.append((sweep_value, order, totals[order] / spec.reps))
    return ExperimentResult(
        spec.summary(), ("sweep_value", "order", "epsilon"), tuple(rows)
    )


def _outage_report(spec: ExperimentSpec, alloc, scenario) -> np.ndarray:
    method = outage.parse_method(spec.method)
    if isinstance(method, outage.CharFnMethod):
        method = outage.CharFnMethod(spec.grid_points)
    return outage.average_outage(alloc, scenario, method).per_sensor


def _allocations_for(spec: ExperimentSpec, cfg: ScenarioConfig, point: int, rep: int):
    scenario_seed, alloc_seed = _derived_entropy(spec.seed, point, rep)
    scenario = generate_scenario(replace(cfg, seed=scenario_seed))
    engine = outage.GcOutageEngine(scenario)
    greedy = allocation.greedy_allocate(
        scenario,
        spec.mode,
        allocation.GreedyConfig(init_seed=alloc_seed),
        engine=engine,
    ).allocation
    baseline = allocation.random_allocate(scenario, spec.mode, alloc_seed)
    return scenario, greedy, baseline


def _outage_sweep(spec: ExperimentSpec, vary: str) -> ExperimentResult:
    rows = []
    for point, value in enumerate(spec.sweep):
        if vary == "num_sensors":
            cfg = replace(spec.config, num_sensors=int(value))
        else:
            cfg = replace(spec.config, activity=float(value))
        averages = {"greedy": 0.0, "random": 0.0}
        for rep in range(spec.reps):
            scenario, greedy, baseline = _allocations_for(spec, cfg, point, rep)
            averages["greedy"] += float(_outage_report(spec, greedy, scenario).mean())
            averages["random"] += float(
                _outage_report(spec, baseline, scenario).mean()
            )
        sweep_value = int(value) if vary == "num_sensors" else float(value)
        for strategy in ("greedy", "random"):
            rows.append(
                (sweep_value, strategy, spec.mode, averages[strategy] / spec.reps)
            )
    return ExperimentResult(
        spec.summary(),
        ("sweep_value", "strategy", "mode", "avg_pout"),
        tuple(rows),
    )


def _outage_cdf(spec: ExperimentSpec) -> ExperimentResult:
    greedy_values, random_values = [], []
    for rep in range(spec.reps):
        scenario, greedy, baseline = _allocations_for(spec, spec.config, 0, rep)
        greedy_values.append(_outage_report(spec, greedy, scenario))
        random_values.append(_outage_report(spec, baseline, scenario))
    grid = np.linspace(0.0, 1.0, spec.cdf_points)
    f_greedy = empirical_cdf(np.concatenate(greedy_values), grid)
    f_random = empirical_cdf(np.concatenate(random_values), grid)
    rows = tuple(
        (float(grid[k]), float(f_greedy[k]), float(f_random[k]))
        for k in range(grid.size)
    )
    return ExperimentResult(
        spec.summary(), ("pout", "F_greedy", "F_random"), rows
    )


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    if spec.experiment == "cdf_compare":
        return _cdf_compare(spec)
    if spec.experiment == "error_vs_m":
        return _error_sweep(spec, "num_sensors")
    if spec.experiment == "error_vs_p":
        return _error_sweep(spec, "activity")
    if spec.experiment == "outage_vs_m":
        return _outage_sweep(spec, "num_sensors")
    if spec.experiment == "outage_vs_p":
        return _outage_sweep(spec, "activity")
    return _outage_cdf(spec)
