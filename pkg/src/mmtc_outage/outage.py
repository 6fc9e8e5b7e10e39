"""Per-sensor outage probabilities under SINR thresholding.

A sensor is in outage when its SINR falls below the detection threshold,
which happens exactly when the aggregated interference at its detector
exceeds ``own_power / threshold - noise_power``.  Three evaluation routes
are provided: the closed-form series tail (truncated-Gaussian kernel with
a Hermite correction), numerical characteristic-function inversion, and
Monte Carlo resampling of activities and resource choices.

Beyond the per-sensor operations, two batched evaluators make scenario-wide
sweeps affordable: :class:`GcOutageEngine` pools per-tuple power sums so one
full-objective evaluation costs microseconds per sensor (this is what the
greedy allocator iterates), and :func:`batch_cf_outage` shares pooled
characteristic-function factor products across all sensors detected at the
same collector/beam tuple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from scipy.special import ndtr

from .access import (
    ResourceAllocation,
    effective_probabilities,
    resource_mask,
)
from .scenario import Scenario
from .stats_core import (
    _HERMITE_COEFFS,
    _cf_spectrum_grid,
    _cumulants_from_raw_moments,
    _invert_spectrum,
    _norm_pdf,
    DiscretizedDistribution,
    build_model,
    cf_density,
    gram_charlier,
    tail_probability,
)

__all__ = [
    "GramCharlierMethod",
    "CharFnMethod",
    "MonteCarloMethod",
    "OutageMethod",
    "OutageReport",
    "parse_method",
    "interference_headroom",
    "interference_terms",
    "outage_single",
    "outage_multi",
    "monte_carlo_outage",
    "average_outage",
    "GcOutageEngine",
    "batch_cf_outage",
    "pooled_cf_densities",
    "write_outage_csv",
]


@dataclass(frozen=True)
class GramCharlierMethod:
    """Closed-form series tail of the given order (0 = bare kernel)."""

    order: int = 5

    def __post_init__(self) -> None:
        if not 0 <= self.order <= 5:
            raise ValueError(f"series order must lie in 0..5, got {self.order}")

    @property
    def label(self) -> str:
        return f"gc{self.order}"


@dataclass(frozen=True)
class CharFnMethod:
    """Numerical characteristic-function inversion on a power-of-two grid."""

    grid_points: int = 1 << 16

    @property
    def label(self) -> str:
        return "cf"


@dataclass(frozen=True)
class MonteCarloMethod:
    """Empirical frequency over independent activity/resource draws."""

    draws: int = 100_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.draws < 1:
            raise ValueError("draws must be >= 1")

    @property
    def label(self) -> str:
        return "mc"


OutageMethod = Union[GramCharlierMethod, CharFnMethod, MonteCarloMethod]


def parse_method(text: str) -> OutageMethod:
    """Method from a CLI-style name: gc0..gc5 (or gc = gc5), cf, mc."""
    name = text.strip().lower()
    if name == "cf":
        return CharFnMethod()
    if name == "mc":
        return MonteCarloMethod()
    if name == "gc":
        return GramCharlierMethod(5)
    if len(name) == 3 and name.startswith("gc") and name[2].isdigit():
        return GramCharlierMethod(int(name[2]))
    raise ValueError(
        f"unknown method {text!r}; expected gc, gc0..gc5, cf, or mc"
    )


# ---------------------------------------------------------------------------
# scalar operations


def interference_headroom(scenario: Scenario, sensor_index: int) -> float:
    """Interference level at which the sensor's SINR hits the threshold.

    Outage is the event {interference > headroom}; a negative headroom means
    the sensor fails on noise alone.
    """
    own = float(scenario.own_power[sensor_index])
    noise = float(scenario.noise_power[sensor_index])
    return own / scenario.config.detection_threshold - noise


def interference_terms(
    alloc: ResourceAllocation,
    scenario: Scenario,
    sensor_index: int,
    resource: int,
) -> tuple[np.ndarray, np.ndarray]:
    """(weights, probabilities) of the sensors able to collide on ``resource``.

    Weights are received powers at the reference sensor's detector; zero
    weights and zero effective probabilities are dropped.
    """
    mask = resource_mask(alloc, scenario, resource).copy()
    mask[sensor_index] = False
    weights = scenario.powers_at[scenario.det_node[sensor_index]][mask]
    probs = effective_probabilities(alloc, scenario)[mask]
    keep = (weights > 0.0) & (probs > 0.0)
    return weights[keep], probs[keep]


def outage_single(
    alloc: ResourceAllocation,
    scenario: Scenario,
    sensor_index: int,
    resource: int,
    method: OutageMethod,
) -> float:
    """Outage probability of one sensor transmitting on one fixed resource.

    Conventions: a sensor on a switched-off tuple (empty resource set) is in
    outage with probability 1; negative headroom gives 1; an interference
    support below the headroom gives 0.
    """
    node = int(scenario.det_node[sensor_index])
    own_set = alloc.resource_sets[node]
    if not own_set:
        return 1.0
    if resource not in own_set:
        raise ValueError(
            f"sensor {sensor_index}'s tuple holds resources {sorted(own_set)}, "
            f"not {resource}"
        )
    threshold = interference_headroom(scenario, sensor_index)
    if threshold < 0.0:
        return 1.0
    if isinstance(method, MonteCarloMethod):
        return _mc_outage(
            alloc, scenario, sensor_index, method.draws,
            [method.seed, sensor_index, resource], resource,
        )
    weights, probs = interference_terms(alloc, scenario, sensor_index, resource)
    if weights.size == 0:
        return 0.0
    if threshold >= float(weights.sum()):
        return 0.0
    if isinstance(method, CharFnMethod):
        dist = cf_density(list(zip(weights, probs)), method.grid_points)
        return float(dist.tail(threshold))
    if isinstance(method, GramCharlierMethod):
        model = build_model(list(zip(weights, probs)))
        if model.variance <= 0.0:
            # all contributors are always-on: interference is deterministic
            return 1.0 if model.mean > threshold else 0.0
        return tail_probability(gram_charlier(model, method.order), threshold)
    raise TypeError(f"unsupported method object {method!r}")


def outage_multi(
    alloc: ResourceAllocation,
    scenario: Scenario,
    sensor_index: int,
    method: OutageMethod,
) -> float:
    """Outage averaged uniformly over the sensor's held resources."""
    node = int(scenario.det_node[sensor_index])
    own_set = sorted(alloc.resource_sets[node])
    if not own_set:
        return 1.0
    values = [
        outage_single(alloc, scenario, sensor_index, t, method) for t in own_set
    ]
    return math.fsum(values) / len(values)


_MC_CHUNK_TARGET = 1 << 21  # samples per chunk ~ target / candidate count


def _resource_table(alloc: ResourceAllocation) -> tuple[np.ndarray, np.ndarray]:
    """Per-tuple sorted resource ids padded into a rectangle, plus set sizes."""
    sizes = alloc.set_sizes
    width = max(1, int(sizes.max()))
    table = np.zeros((alloc.num_tuples, width), dtype=np.int64)
    for node, ids in enumerate(alloc.resource_sets):
        for slot, t in enumerate(sorted(ids)):
            table[node, slot] = t
    return table, sizes


def _mc_outage(
    alloc: ResourceAllocation,
    scenario: Scenario,
    sensor_index: int,
    draws: int,
    seed_key: list[int],
    resource: int | None,
) -> float:
    """Vectorized Monte Carlo core.

    Per draw: every candidate interferer is active with its activity
    probability and, if active, transmits on one resource drawn uniformly
    from its tuple's set; the reference sensor transmits on ``resource``
    (or, when None, on a uniform draw from its own set).  The outage event
    is counted as interference strictly above the headroom, matching the
    tail convention of the analytic methods.
    """
    node = int(scenario.det_node[sensor_index])
    own_set = sorted(alloc.resource_sets[node])
    if not own_set:
        return 1.0
    threshold = interference_headroom(scenario, sensor_index)
    if threshold < 0.0:
        return 1.0  # every draw fails on noise alone
    table, sizes = _resource_table(alloc)
    det = scenario.det_node
    own_arr = np.asarray(own_set, dtype=np.int64)
    candidate = (sizes[det] > 0) & (scenario.activities > 0.0)
    candidate[sensor_index] = False
    if resource is None:
        relevant = np.zeros(scenario.num_sensors, dtype=bool)
        for t in own_set:
            relevant |= resource_mask(alloc, scenario, t)
    else:
        relevant = resource_mask(alloc, scenario, resource)
    candidate &= relevant
    ids = np.nonzero(candidate)[0]
    if ids.size == 0:
        return 0.0
    weights = scenario.powers_at[node][ids]
    acts = scenario.activities[ids]
    nodes = det[ids]
    node_sizes = sizes[nodes]
    rng = np.random.default_rng(seed_key)
    chunk = max(1, _MC_CHUNK_TARGET // ids.size)
    failures = 0
    remaining = draws
    while remaining:
        n = min(chunk, remaining)
        if resource is None:
            mine = own_arr[rng.integers(0, own_arr.size, size=n)]
        else:
            mine = np.full(n, resource, dtype=np.int64)
        active = rng.random((n, ids.size)) < acts[None, :]
        slots = rng.integers(0, node_sizes[None, :], size=(n, ids.size))
        chosen = table[nodes[None, :], slots]
        hits = active & (chosen == mine[:, None])
        interference = hits @ weights
        failures += int(np.count_nonzero(interference > threshold))
        remaining -= n
    return failures / draws


def monte_carlo_outage(
    alloc: ResourceAllocation,
    scenario: Scenario,
    sensor_index: int,
    draws: int = 100_000,
    seed: int = 0,
) -> float:
    """Empirical outage frequency; the sensor's own resource is redrawn
    uniformly from its set on every draw.  Deterministic given the seed."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    return _mc_outage(alloc, scenario, sensor_index, draws, [seed, sensor_index], None)


# ---------------------------------------------------------------------------
# batched series evaluation


def _bernoulli_cumulants(p: np.ndarray, max_order: int) -> np.ndarray:
    """Cumulants 1..max_order of a unit-weight Bernoulli, stacked last axis."""
    p = np.asarray(p, dtype=float)
    q = 1.0 - p
    cols = [
        p,
        p * q,
        p * q * (1.0 - 2.0 * p),
        p * q * (1.0 - 6.0 * p + 6.0 * p * p),
        p * q * (1.0 - 2.0 * p) * (1.0 - 12.0 * p + 12.0 * p * p),
    ]
    return np.stack(cols[:max_order], axis=-1)


def _batched_series_tail(
    kappa: np.ndarray,
    thresholds: np.ndarray,
    supports: np.ndarray,
    order: int,
) -> np.ndarray:
    """Vectorized twin of the scalar series tail.

    ``kappa[:, n]`` holds cumulant order n+1 (at least two columns); callers
    must have dealt with thresholds outside (0, support) and zero-variance
    rows already.  Mirrors gram_charlier_from_cumulants + tail_probability
    arithmetic step for step, so the two agree to rounding.
    """
    mu = kappa[:, 0]
    sigma = np.sqrt(kappa[:, 1])
    alpha = -mu / sigma
    beta = (supports - mu) / sigma
    norm = ndtr(beta) - ndtr(alpha)
    pa = _norm_pdf(alpha)
    pb = _norm_pdf(beta)

    btilde = np.zeros((kappa.shape[0], 6))
    btilde[:, 0] = 1.0
    if order >= 1:
        moments = [np.ones_like(mu)]
        for i in range(1, order + 1):
            boundary = (alpha ** (i - 1) * pa - beta ** (i - 1) * pb) / norm
            prev = (i - 1) * moments[i - 2] if i >= 2 else 0.0
            moments.append(boundary + prev)
        std_cums = _cumulants_from_raw_moments(np.stack(moments[1:], axis=0))
        kernel_cums = np.empty((kappa.shape[0], order))
        kernel_cums[:, 0] = mu + sigma * std_cums[0]
        for n in range(2, order + 1):
            kernel_cums[:, n - 1] = sigma**n * std_cums[n - 1]
        eta = kappa[:, :order] - kernel_cums
        bell = [np.ones_like(mu)]
        for m in range(order):
            acc = np.zeros_like(mu)
            for k in range(m + 1):
                acc += math.comb(m, k) * bell[m - k] * eta[:, k]
            bell.append(acc)
        for m in range(1, order + 1):
            btilde[:, m] = bell[m] / (math.factorial(m) * sigma**m)
    an = btilde @ _HERMITE_COEFFS

    lo = (thresholds - mu) / sigma
    plo = _norm_pdf(lo)
    partial = [ndtr(beta) - ndtr(lo), plo - pb]
    for k in range(2, 6):
        partial.append(
            lo ** (k - 1) * plo - beta ** (k - 1) * pb + (k - 1) * partial[k - 2]
        )
    total = np.zeros_like(mu)
    for m in range(6):
        total += an[:, m] * partial[m]
    return np.clip(total / norm, 0.0, 1.0)


class GcOutageEngine:
    """Scenario-wide series outage with per-tuple power pooling.

    The interferer weights seen by a sensor depend only on its detection
    tuple, so the cumulant sums of every (destination, resource) pair can be
    assembled from a fixed (D, D, order) tensor of per-source-tuple power
    sums.  One full objective evaluation then reduces to a couple of small
    einsums plus a vectorized series tail over (sensor, resource) pairs —
    this is the engine the greedy allocator iterates.

    Requires the uniform per-sensor activity produced by the scenario
    generator (the per-tuple pooling folds the activity into per-tuple
    effective probabilities).
    """

    def __init__(self, scenario: Scenario, order: int = 5):
        if not 0 <= order <= 5:
            raise ValueError(f"series order must lie in 0..5, got {order}")
        acts = scenario.activities
        if acts.size and not np.all(acts == acts[0]):
            raise ValueError(
                "per-tuple pooling needs a uniform activity; "
                "use the scalar operations for heterogeneous sensors"
            )
        self.scenario = scenario
        self.order = order
        self.depth = max(order, 2)
        self.activity = float(acts[0]) if acts.size else 0.0
        det = scenario.det_node
        num_tuples = scenario.num_tuples
        powers = scenario.powers_at  # (D, M)
        exponents = np.arange(1, self.depth + 1)
        weight_powers = powers[:, :, None] ** exponents  # (D, M, depth)
        pooled = np.zeros((num_tuples, num_tuples, self.depth))
        for node in range(num_tuples):
            members = det == node
            if members.any():
                pooled[:, node, :] = weight_powers[:, members, :].sum(axis=1)
        self.pooled = pooled  # (dest, source tuple, order)
        self.tuple_counts = np.bincount(det, minlength=num_tuples)
        self.self_powers = weight_powers[det, np.arange(det.size), :]  # (M, depth)
        self.thresholds = (
            scenario.own_power / scenario.config.detection_threshold
            - scenario.noise_power
        )

    def _pairs(self, alloc: ResourceAllocation):
        """Flatten (sensor, held resource) pairs plus averaging weights."""
        det = self.scenario.det_node
        sensors, resources, weights = [], [], []
        for node, ids in enumerate(alloc.resource_sets):
            if not ids:
                continue
            members = np.nonzero(det == node)[0]
            if members.size == 0:
                continue
            share = 1.0 / len(ids)
            for t in sorted(ids):
                sensors.append(members)
                resources.append(np.full(members.size, t, dtype=np.int64))
                weights.append(np.full(members.size, share))
        if not sensors:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty, np.empty(0)
        return (
            np.concatenate(sensors),
            np.concatenate(resources),
            np.concatenate(weights),
        )

    def outage_vector(
        self,
        alloc: ResourceAllocation,
        *,
        cache: np.ndarray | None = None,
        changed: tuple[int, frozenset[int], frozenset[int]] | None = None,
    ) -> np.ndarray:
        """Per-sensor outage under ``alloc``.

        With ``cache`` (a previous result) and ``changed`` (node, old
        resource set, new resource set), only sensors whose value can have
        moved are recomputed — those detected at the changed node plus those
        whose tuple's set meets the union of old and new resources.  The
        recomputation uses the same pooled arrays as a full pass, so both
        routes return bitwise-identical vectors.
        """
        scenario = self.scenario
        det = scenario.det_node
        num_resources = alloc.num_resources
        sizes = alloc.set_sizes
        p_eff = np.zeros(alloc.num_tuples)
        held = sizes > 0
        p_eff[held] = self.activity / sizes[held]
        cvals = _bernoulli_cumulants(p_eff, self.depth)  # (D, depth)
        holds = np.zeros((num_resources + 1, alloc.num_tuples), dtype=bool)
        for node, ids in enumerate(alloc.resource_sets):
            for t in ids:
                holds[t, node] = True
        # pooled cumulant sums and supports for every (destination, resource)
        sums = np.einsum("te,en,den->dtn", holds, cvals, self.pooled)
        support = np.einsum("te,de->dt", holds, self.pooled[:, :, 0])
        counts = holds @ self.tuple_counts  # (R+1,) members per resource

        pair_sensor, pair_resource, pair_weight = self._pairs(alloc)
        out = np.ones(scenario.num_sensors)
        if cache is not None:
            if changed is None:
                raise ValueError("cache updates need the changed-node triple")
            node, old_ids, new_ids = changed
            touched = np.zeros(alloc.num_tuples, dtype=bool)
            touched[node] = True
            moved = frozenset(old_ids) | frozenset(new_ids)
            for other, ids in enumerate(alloc.resource_sets):
                if ids & moved:
                    touched[other] = True
            affected = touched[det]
            keep = affected[pair_sensor]
            pair_sensor = pair_sensor[keep]
            pair_resource = pair_resource[keep]
            pair_weight = pair_weight[keep]
            out = cache.copy()
            out[affected] = 1.0
        if pair_sensor.size:
            dest = det[pair_sensor]
            kappa = (
                sums[dest, pair_resource, :]
                - cvals[dest] * self.self_powers[pair_sensor]
            )
            supports = support[dest, pair_resource] - self.self_powers[pair_sensor, 0]
            members = counts[pair_resource] - 1
            thresholds = self.thresholds[pair_sensor]
            values = self._pair_values(kappa, thresholds, supports, members)
            contrib = np.zeros(scenario.num_sensors)
            np.add.at(contrib, pair_sensor, values * pair_weight)
            touched_sensors = np.zeros(scenario.num_sensors, dtype=bool)
            touched_sensors[pair_sensor] = True
            out[touched_sensors] = contrib[touched_sensors]
        return out

    def _pair_values(self, kappa, thresholds, supports, members) -> np.ndarray:
        values = np.zeros(kappa.shape[0])
        neg = thresholds < 0.0
        values[neg] = 1.0
        live = ~neg & (members > 0) & (thresholds < supports)
        if live.any():
            variance = kappa[:, 1]
            deterministic = live & (variance <= 0.0)
            if deterministic.any():
                values[deterministic] = np.where(
                    kappa[deterministic, 0] > thresholds[deterministic], 1.0, 0.0
                )
            series = live & (variance > 0.0)
            if series.any():
                values[series] = _batched_series_tail(
                    kappa[series],
                    thresholds[series],
                    supports[series],
                    self.order,
                )
        return values

    def average(self, alloc: ResourceAllocation, **kw) -> float:
        return float(self.outage_vector(alloc, **kw).mean())


# ---------------------------------------------------------------------------
# batched characteristic-function evaluation

_SELF_DIVIDE_MAX_P = 0.45  # above this, rebuild instead of dividing the pool
_POOL_DROP_TOL = 1e-9  # weight-sum fraction of negligible terms to drop


def _pool_requests(alloc: ResourceAllocation, scenario: Scenario):
    """Group (sensor, resource) requests by destination tuple."""
    det = scenario.det_node
    groups: dict[int, list[tuple[int, int]]] = {}
    for node, ids in enumerate(alloc.resource_sets):
        if not ids:
            continue
        members = np.nonzero(det == node)[0]
        for i in members:
            for t in sorted(ids):
                groups.setdefault(node, []).append((int(i), t))
    return groups


def _pooled_pass(
    alloc: ResourceAllocation,
    scenario: Scenario,
    grid_points: int,
    consume,
    drop_tol: float = _POOL_DROP_TOL,
) -> None:
    """Shared-grid CF inversion for every (sensor, held resource) pair.

    For each destination tuple, per-source-tuple factor products are pooled
    once and each sensor's spectrum is recovered by dividing out its own
    factor (rebuilt from scratch when its probability is large enough to
    make the division ill-conditioned).  ``consume(sensor, resource,
    distribution)`` is called for every pair; sensors on switched-off tuples
    are never passed.  Terms contributing less than ``drop_tol`` of a
    destination's total weight are dropped from the pool.
    """
    q_pts = int(grid_points)
    if q_pts < 64 or q_pts & (q_pts - 1):
        raise ValueError(f"grid_points must be a power of two >= 64, got {grid_points}")
    det = scenario.det_node
    p_eff = effective_probabilities(alloc, scenario)
    groups = _pool_requests(alloc, scenario)
    fine = 16 * q_pts

    for dest, requests in groups.items():
        row = scenario.powers_at[dest]
        eligible = (p_eff > 0.0) & (row > 0.0)
        if eligible.any():
            order_ = np.argsort(row[eligible])
            elig_ids = np.nonzero(eligible)[0][order_]
            cum = np.cumsum(row[elig_ids])
            total = cum[-1]
            kept_ids = elig_ids[cum > drop_tol * total]
        else:
            kept_ids = np.empty(0, dtype=np.int64)
        kept = np.zeros(scenario.num_sensors, dtype=bool)
        kept[kept_ids] = True
        kept_total = float(row[kept_ids].sum())
        upper = (kept_total if kept_total > 0.0 else 1.0) * (1.0 + 1.0 / q_pts)
        freqs, taper = _cf_spectrum_grid(upper, fine)

        needed = sorted({t for _, t in requests})
        pooled = {t: np.ones(freqs.size, dtype=complex) for t in needed}
        on_resource = {
            t: resource_mask(alloc, scenario, t) & kept for t in needed
        }
        for node in np.unique(det[kept]):
            node_set = alloc.resource_sets[node]
            hit = [t for t in needed if t in node_set]
            if not hit:
                continue
            members = np.nonzero(kept & (det == node))[0]
            psi = np.ones(freqs.size, dtype=complex)
            for j in members:
                psi *= (1.0 - p_eff[j]) + p_eff[j] * np.exp(1j * (row[j] * freqs))
            for t in hit:
                pooled[t] *= psi

        for i, t in requests:
            phi = pooled[t]
            if kept[i]:
                own = (1.0 - p_eff[i]) + p_eff[i] * np.exp(1j * (row[i] * freqs))
                if p_eff[i] <= _SELF_DIVIDE_MAX_P:
                    phi = phi / own
                else:
                    others = np.nonzero(on_resource[t])[0]
                    phi = np.ones(freqs.size, dtype=complex)
                    for j in others:
                        if j == i:
                            continue
                        phi *= (1.0 - p_eff[j]) + p_eff[j] * np.exp(
                            1j * (row[j] * freqs)
                        )
            consume(i, t, _invert_spectrum(phi * taper, q_pts, upper))


def batch_cf_outage(
    alloc: ResourceAllocation,
    scenario: Scenario,
    grid_points: int = 1 << 12,
) -> np.ndarray:
    """Per-sensor CF-method outage, factor-pooled per destination tuple.

    Matches the scalar route up to the grid convention: here every sensor
    detected at the same tuple shares one frequency grid sized to the pooled
    support, so tails can differ from per-sensor grids at the level of one
    grid cell's mass.  Edge conventions are identical to
    :func:`outage_single`.
    """
    det = scenario.det_node
    thresholds = (
        scenario.own_power / scenario.config.detection_threshold
        - scenario.noise_power
    )
    p_eff = effective_probabilities(alloc, scenario)
    sizes = alloc.set_sizes[det]
    out = np.ones(scenario.num_sensors)

    shares = np.zeros(scenario.num_sensors)
    held = sizes > 0
    shares[held] = 1.0 / sizes[held]
    accum = np.zeros(scenario.num_sensors)
    # exact per-resource pool sums for the support edge (no drop tolerance)
    relevant = {}

    def consume(i: int, t: int, dist: DiscretizedDistribution) -> None:
        if t not in relevant:
            relevant[t] = resource_mask(alloc, scenario, t) & (p_eff > 0.0)
        if thresholds[i] < 0.0:
            accum[i] += shares[i]
            return
        mask = relevant[t]
        support = float(scenario.powers_at[det[i]][mask].sum())
        if mask[i]:
            support -= float(scenario.powers_at[det[i], i])
        live = int(np.count_nonzero(mask)) - (1 if mask[i] else 0)
        if live == 0 or thresholds[i] >= support:
            return
        accum[i] += shares[i] * float(dist.tail(thresholds[i]))

    _pooled_pass(alloc, scenario, grid_points, consume)
    out[held] = accum[held]
    return out


def pooled_cf_densities(
    alloc: ResourceAllocation,
    scenario: Scenario,
    grid_points: int,
    sensors: np.ndarray | None = None,
) -> dict[tuple[int, int], DiscretizedDistribution]:
    """Gridded interference laws for (sensor, resource) pairs, factor-pooled.

    Returns every held pair for the requested sensors (all sensors when
    None).  Each distribution spans [0, pooled support] of its destination
    tuple, so all sensors detected at one tuple share a comparable grid.
    """
    wanted = None if sensors is None else set(int(s) for s in sensors)
    results: dict[tuple[int, int], DiscretizedDistribution] = {}

    def consume(i: int, t: int, dist: DiscretizedDistribution) -> None:
        if wanted is None or i in wanted:
            results[(i, t)] = dist

    _pooled_pass(alloc, scenario, grid_points, consume)
    return results


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True, eq=False)
class OutageReport:
    """Per-sensor outage probabilities plus the two scalar objectives."""

    mode: str
    method_label: str
    per_sensor: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.per_sensor, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "per_sensor", values)

    @property
    def average(self) -> float:
        return float(self.per_sensor.mean())

    @property
    def maximum(self) -> float:
        return float(self.per_sensor.max())


def average_outage(
    alloc: ResourceAllocation,
    scenario: Scenario,
    method: OutageMethod,
) -> OutageReport:
    """Evaluate every sensor's outage under the allocation.

    Gram-Charlier and characteristic-function methods run through the
    batched evaluators; Monte Carlo loops over sensors with per-sensor
    derived seeds.
    """
    if isinstance(method, GramCharlierMethod):
        per_sensor = GcOutageEngine(scenario, method.order).outage_vector(alloc)
    elif isinstance(method, CharFnMethod):
        per_sensor = batch_cf_outage(alloc, scenario, method.grid_points)
    elif isinstance(method, MonteCarloMethod):
        per_sensor = np.array(
            [
                _mc_outage(alloc, scenario, i, method.draws, [method.seed, i], None)
                for i in range(scenario.num_sensors)
            ]
        )
    else:
        raise TypeError(f"unsupported method object {method!r}")
    return OutageReport(alloc.mode, method.label, per_sensor)


def write_outage_csv(
    report: OutageReport, path: str | Path, note: str | None = None
) -> None:
    """Dump per-sensor outage values plus a trailing summary comment line."""
    suffix = f" {note}" if note else ""
    lines = [f"# outage mode={report.mode} method={report.method_label}{suffix}"]
    lines.append("sensor_id,resource_mode,method,p_out")
    for i, value in enumerate(report.per_sensor):
        lines.append(f"{i},{report.mode},{report.method_label},{float(value)!r}")
    lines.append(f"# average={report.average!r} max={report.maximum!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")
