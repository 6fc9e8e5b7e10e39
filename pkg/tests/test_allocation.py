"""Interference-graph construction and greedy coloring tests."""

import math

import numpy as np
import pytest

from mmtc_outage import access, allocation, outage
from mmtc_outage import scenario as scn


def placed_scenario(cn_xy, *, beams=4, factor=2.0, radius=100.0):
    """Two-collector hand geometry with a few throwaway sensors."""
    cn_xy = np.asarray(cn_xy, dtype=float)
    cfg = scn.ScenarioConfig(
        num_sensors=4,
        num_cns=cn_xy.shape[0],
        antennas=beams,
        beams=beams,
        num_resources=3,
        deploy_radius=radius,
        interference_factor=factor,
        area_side=2000.0,
    )
    sensors = cn_xy[np.zeros(4, dtype=int)] + np.array(
        [[10.0, 0.0], [0.0, 12.0], [-9.0, 3.0], [5.0, -8.0]]
    )
    home = np.zeros(4, dtype=np.int64)
    return scn.assemble_scenario(cfg, cn_xy, sensors, home)


def toy(**overrides):
    base = dict(
        num_sensors=24,
        num_cns=2,
        antennas=4,
        beams=2,
        activity=0.12,
        num_resources=3,
        deploy_radius=80.0,
        area_side=500.0,
        seed=7,
    )
    base.update(overrides)
    return scn.generate_scenario(scn.ScenarioConfig(**base))


# ---------------------------------------------------------------------------
# graph construction


def test_single_collector_graph_is_complete():
    s = placed_scenario([[0.0, 0.0]])
    graph = allocation.build_graph(s)
    expected = ~np.eye(4, dtype=bool)
    assert np.array_equal(graph.adjacency, expected)
    assert graph.num_nodes == 4
    assert graph.degrees.tolist() == [3, 3, 3, 3]


def test_facing_collectors_within_reach_share_edges():
    s = placed_scenario([[0.0, 0.0], [250.0, 0.0]])
    graph = allocation.build_graph(s)
    adj = graph.adjacency
    # boresights at 0, pi/2, pi, 3pi/2: beam 0 of the left collector and
    # beam 2 of the right collector face each other
    assert allocation.beam_points_at(s, 0, 0, 1)
    assert allocation.beam_points_at(s, 1, 2, 0)
    assert not allocation.beam_points_at(s, 0, 1, 1)
    for l2 in range(4):
        assert adj[0, 4 + l2]  # left beam 0 points at the right collector
    for l in range(4):
        assert adj[l, 4 + 2]  # right beam 2 points back
    assert not adj[1, 4 + 1]
    assert not adj[3, 4 + 3]
    # same-collector cliques intact
    assert np.array_equal(adj[:4, :4], ~np.eye(4, dtype=bool))


def test_collectors_out_of_reach_are_independent():
    s = placed_scenario([[0.0, 0.0], [500.0, 0.0]])
    adj = allocation.build_graph(s).adjacency
    assert not adj[:4, 4:].any()


def test_reach_boundary_is_exclusive():
    # (factor + 1) * radius = 300 exactly: no inter-collector edges
    s = placed_scenario([[0.0, 0.0], [300.0, 0.0]])
    adj = allocation.build_graph(s).adjacency
    assert not adj[:4, 4:].any()


def test_angular_boundary_is_exclusive():
    # collector direction exactly between two boresights: neither points
    d = 250.0 / math.sqrt(2.0)
    s = placed_scenario([[0.0, 0.0], [d, d]])
    adj = allocation.build_graph(s).adjacency
    for l in range(4):
        assert not allocation.beam_points_at(s, 0, l, 1)
        assert not allocation.beam_points_at(s, 1, l, 0)
    assert not adj[:4, 4:].any()


def test_degrees_and_sweep_order():
    s = placed_scenario([[0.0, 0.0], [250.0, 0.0]])
    graph = allocation.build_graph(s)
    assert graph.degrees.tolist() == [7, 4, 4, 4, 4, 4, 7, 4]
    assert graph.sweep_order().tolist() == [0, 6, 1, 2, 3, 4, 5, 7]
    assert sorted(graph.neighbors(1).tolist()) == [0, 2, 3, 6]


def test_graph_validation():
    bad = np.zeros((3, 3), dtype=bool)
    bad[0, 1] = True
    with pytest.raises(ValueError, match="symmetric"):
        allocation.InterferenceGraph(bad)
    with pytest.raises(ValueError, match="diagonal"):
        allocation.InterferenceGraph(np.eye(2, dtype=bool))
    with pytest.raises(ValueError, match="square"):
        allocation.InterferenceGraph(np.zeros((2, 3), dtype=bool))


# ---------------------------------------------------------------------------
# greedy coloring


def test_lone_tuple_turns_itself_on():
    s = toy(num_cns=1, beams=1, antennas=2, num_sensors=6, num_resources=1)
    result = allocation.greedy_allocate(s, "single")
    assert result.allocation.colors[0, 0] == 1
    assert result.objective < 1.0  # switched off would pin every sensor at 1
    assert result.trace[0] >= result.objective
    solo = toy(num_cns=1, beams=1, antennas=2, num_sensors=1, num_resources=1)
    lone = allocation.greedy_allocate(solo, "single")
    assert lone.allocation.colors[0, 0] == 1
    assert lone.objective == 0.0


@pytest.mark.parametrize("mode", ["single", "multiple"])
def test_greedy_beats_random_start_for_every_seed(mode):
    s = toy()
    engine = outage.GcOutageEngine(s)
    for seed in range(20):
        result = allocation.greedy_allocate(
            s, mode, allocation.GreedyConfig(init_seed=seed), engine=engine
        )
        baseline = engine.average(allocation.random_allocate(s, mode, seed))
        assert result.objective <= baseline + 1e-12
        trace = np.asarray(result.trace)
        assert np.all(np.diff(trace) <= 1e-15)


def test_trace_starts_at_the_random_initialization():
    s = toy()
    engine = outage.GcOutageEngine(s)
    config = allocation.GreedyConfig(init_seed=5)
    result = allocation.greedy_allocate(s, "single", config, engine=engine)
    rng = np.random.default_rng(5)
    colors = rng.integers(0, 4, size=(s.num_cns, s.num_beams))
    init = access.ResourceAllocation("single", colors, 3)
    assert result.trace[0] == engine.average(init)
    assert len(result.trace) <= config.max_iterations + 1


@pytest.mark.parametrize("mode", ["single", "multiple"])
def test_incremental_and_full_recompute_agree(mode):
    s = toy()
    engine = outage.GcOutageEngine(s)
    config = allocation.GreedyConfig(init_seed=3)
    fast = allocation.greedy_allocate(s, mode, config, engine=engine, incremental=True)
    slow = allocation.greedy_allocate(s, mode, config, engine=engine, incremental=False)
    assert np.array_equal(fast.allocation.colors, slow.allocation.colors)
    assert fast.trace == slow.trace


def test_color_bound_restricts_palette():
    s = toy()
    result = allocation.greedy_allocate(
        s, "single", allocation.GreedyConfig(color_bound=1, init_seed=2)
    )
    assert set(np.unique(result.allocation.colors)) <= {0, 1}
    restricted = allocation.random_allocate(s, "multiple", 4, color_bound=2)
    assert restricted.colors.max() <= 2


def test_config_validation():
    with pytest.raises(ValueError, match="max_iterations"):
        allocation.GreedyConfig(max_iterations=0)
    with pytest.raises(ValueError, match="improvement_threshold"):
        allocation.GreedyConfig(improvement_threshold=-1.0)
    with pytest.raises(ValueError, match="color_bound"):
        allocation.GreedyConfig(color_bound=0)
    s = toy()
    with pytest.raises(ValueError, match="palette"):
        allocation.greedy_allocate(
            s, "single", allocation.GreedyConfig(color_bound=5)
        )


def test_graph_shape_mismatch_raises():
    s = toy()
    wrong = allocation.InterferenceGraph(np.zeros((2, 2), dtype=bool))
    with pytest.raises(ValueError, match="tuples"):
        allocation.greedy_allocate(s, "single", graph=wrong)


def test_hopeless_scenario_stops_immediately():
    s = toy(detection_threshold=1e9)
    result = allocation.greedy_allocate(s, "single")
    assert result.trace == (1.0, 1.0)
    assert result.objective == 1.0


def test_trace_csv_layout(tmp_path):
    s = toy()
    result = allocation.greedy_allocate(s, "single")
    path = tmp_path / "trace.csv"
    allocation.write_trace_csv(result, path)
    raw = path.read_bytes()
    assert b"\r" not in raw and b"np.float64" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "# greedy mode=single num_resources=3"
    assert lines[1] == "iteration,average_outage"
    assert len(lines) == 2 + len(result.trace)
    assert lines[2].startswith("0,")
    assert float(lines[-1].split(",")[1]) == result.objective
