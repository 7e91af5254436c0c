"""Tests for road maps, the coverage replay, sweeps and strategy comparisons."""

import csv
import io
import math

import pytest

from rsuplan.coverage import PlacementPlan
from rsuplan.errors import MapParseError, ParameterError, UnknownJunctionError
from rsuplan.evaluator import (
    ROW_FIELDS,
    CoverageReport,
    RoadMap,
    SimConfig,
    compare,
    dump_map,
    in_range_junctions,
    loads_map,
    rows_to_csv,
    shortest_path_matrix,
    simulate,
    sweep,
)
from rsuplan.strategies import StrategySpec, hespic_components
from rsuplan.trajectory_db import SequentialDatabase

SPACOV_PLAN = PlacementPlan((3, 6), "spacov", {"minsup": "2/8"})


def test_map_loading(road_map):
    """Junction coordinates and edge lengths come from the two sections."""
    assert len(road_map) == 7
    assert road_map.position(3) == (-50.0, 60.0)
    assert (7, 1, 20.0) in road_map.edges
    with pytest.raises(UnknownJunctionError):
        road_map.position(99)


def test_map_yaml_dialect(road_map):
    """The YAML dialect carries the same map."""
    again = loads_map(dump_map(road_map, "yaml"), "yaml")
    assert again.junctions == road_map.junctions
    assert again.edges == road_map.edges
    assert loads_map(dump_map(road_map)) == road_map


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("1 0 0\n", "before any"),
        ("[roads]\n", "unknown section"),
        ("[junctions]\n1 0\n", "expected"),
        ("[junctions]\n1 0 0\n1 5 5\n", "duplicate"),
        ("[junctions]\n1 0 0\n[edges]\n1 2 10\n", "not a junction"),
        ("[junctions]\n1 0 0\n2 1 1\n[edges]\n1 2 0\n", "positive"),
        ("[junctions]\n1 x 0\n", "invalid x"),
        ("# only a comment\n", "no junctions"),
    ],
)
def test_bad_maps(text, fragment):
    """Malformed maps are parse errors pointing at the problem."""
    with pytest.raises(MapParseError, match=fragment):
        loads_map(text)


def test_map_yaml_rejects_repeated_junctions():
    """A junction listed twice in the YAML dialect is a parse error."""
    with pytest.raises(MapParseError, match="duplicate") as exc_info:
        loads_map("junctions:\n  1: [0, 0]\n  1: [5, 5]\n", "yaml")
    assert exc_info.value.line == 3
    with pytest.raises(MapParseError, match="duplicate"):
        loads_map('junctions:\n  1: [0, 0]\n  "1": [5, 5]\n', "yaml")


def test_road_graph_keeps_the_shortest_parallel_edge():
    """Duplicate roads between the same junctions collapse to the shorter one."""
    road_map = RoadMap({1: (0, 0), 2: (10, 0)}, ((1, 2, 30.0), (2, 1, 12.0)))
    assert road_map.graph()[1][2]["length"] == 12.0


def test_shortest_path_matrix(road_map):
    """Dijkstra distances follow the road lengths; disconnected pairs are infinite."""
    dis = shortest_path_matrix(road_map)
    assert dis.distance(6, 1) == 100
    assert dis.distance(3, 1) == 170
    assert dis.distance(2, 4) == 85
    assert dis.distance(4, 2) == dis.distance(2, 4)
    lonely = RoadMap({1: (0, 0), 2: (5, 0), 3: (50, 50)}, ((1, 2, 5.0),))
    assert math.isinf(shortest_path_matrix(lonely).distance(1, 3))


def test_in_range_junctions(road_map):
    """Range is measured in straight lines from the RSU junctions, inclusive."""
    assert in_range_junctions(road_map, [3, 6], 0) == frozenset({3, 6})
    assert in_range_junctions(road_map, [6], 50) == frozenset({2, 4, 5, 6})
    assert in_range_junctions(road_map, [], 1000) == frozenset()


def test_simulate_spacov_plan(road_map, table_d):
    """Junctions 3 and 6 reach every vehicle even with zero range."""
    report = simulate(road_map, SPACOV_PLAN, table_d, SimConfig(communication_range=0))
    assert report == CoverageReport(
        coverage_ratio=1.0,
        informed_vehicles=8,
        total_vehicles=8,
        avg_latency=0.375,
        overhead=12,
        overhead_bytes=12 * 2312,
        cost=2,
    )


def test_simulate_partial_coverage(road_map, table_d):
    """Vehicles that never come in range lower the ratio and have no latency."""
    plan = PlacementPlan((1,), "hespic")
    report = simulate(road_map, plan, table_d, SimConfig(communication_range=0))
    assert report.coverage_ratio == pytest.approx(1 / 8)
    assert report.avg_latency == 3.0
    plan = PlacementPlan((4,), "hespic")
    report = simulate(road_map, plan, SequentialDatabase.from_paths([(1, 7)]), SimConfig(0))
    assert report.coverage_ratio == 0.0
    assert report.avg_latency is None


def test_simulate_is_deterministic(road_map, table_d):
    """Repeated runs of the replay agree."""
    repeated = simulate(road_map, SPACOV_PLAN, table_d, SimConfig(communication_range=60, runs=3))
    single = simulate(road_map, SPACOV_PLAN, table_d, SimConfig(communication_range=60))
    assert repeated.coverage_ratio == pytest.approx(single.coverage_ratio)
    assert repeated.avg_latency == pytest.approx(single.avg_latency)
    assert repeated.overhead == single.overhead


def test_message_frequency_is_recorded_not_replayed(road_map, table_d):
    """The replay has no clock; the frequency only travels with the configuration."""
    slow = simulate(road_map, SPACOV_PLAN, table_d, SimConfig(0, message_frequency=0.1))
    fast = simulate(road_map, SPACOV_PLAN, table_d, SimConfig(0, message_frequency=10))
    assert slow == fast
    assert slow.overhead_bytes == slow.overhead * 2312
    with pytest.raises(ParameterError):
        SimConfig(message_frequency=0)


def test_simulate_rejects_unknown_junctions(road_map, table_d):
    """Plans and trajectories must stay on the map."""
    with pytest.raises(UnknownJunctionError):
        simulate(road_map, PlacementPlan((9,), "spacov"), table_d)
    off_map = SequentialDatabase.from_paths([(6, 42)])
    with pytest.raises(UnknownJunctionError):
        simulate(road_map, SPACOV_PLAN, off_map)


def test_sim_config_validation():
    """Negative or non-finite ranges are rejected."""
    for bad in (-1.0, math.inf, math.nan):
        with pytest.raises(ParameterError):
            SimConfig(communication_range=bad)
    with pytest.raises(ParameterError):
        SimConfig(runs=0)
    with pytest.raises(ParameterError):
        SimConfig(message_size=0)


def test_range_sweep_reuses_one_plan(road_map, table_d):
    """Coverage never drops as the range grows."""
    spec = StrategySpec("spacov", "2/8")
    points = sweep(road_map, table_d, spec, "range", [0, 50, 500])
    assert [p.value for p in points] == ["0", "50", "500"]
    assert {p.rsu_junctions for p in points} == {(3, 6)}
    ratios = [p.report.coverage_ratio for p in points]
    assert ratios == sorted(ratios)
    overheads = [p.report.overhead for p in points]
    assert overheads == sorted(overheads)


def test_k_sweep_grows_the_budget(road_map, table_d):
    """Each k value places k junctions."""
    spec = StrategySpec("hespic", "2/8", k=1)
    points = sweep(road_map, table_d, spec, "k", [1, 2, 3], SimConfig(communication_range=0))
    assert [len(p.rsu_junctions) for p in points] == [1, 2, 3]
    assert [p.report.cost for p in points] == [1, 2, 3]


def test_minsup_and_vehicle_sweeps(road_map, table_d):
    """The plan is rebuilt per value."""
    spec = StrategySpec("spacov", "2/8")
    points = sweep(road_map, table_d, spec, "minsup", ["2/8", "3/8"])
    assert [p.value for p in points] == ["2/8", "3/8"]
    points = sweep(road_map, table_d, spec, "vehicles", [4, 8])
    assert [p.report.total_vehicles for p in points] == [4, 8]


def test_sweep_validation(road_map, table_d):
    """Unknown axes, empty value lists and k on a non-ranking strategy are rejected."""
    spec = StrategySpec("spacov", "2/8")
    with pytest.raises(ParameterError):
        sweep(road_map, table_d, spec, "speed", [1])
    with pytest.raises(ParameterError):
        sweep(road_map, table_d, spec, "range", [])
    with pytest.raises(ParameterError):
        sweep(road_map, table_d, spec, "k", [1])
    with pytest.raises(ParameterError):
        sweep(road_map, table_d, spec, "range", ["inf"])
    with pytest.raises(ParameterError):
        sweep(road_map, table_d, spec, "range", ["far"])
    with pytest.raises(ParameterError):
        sweep(road_map, table_d, spec, "vehicles", ["most"])


def test_compare_strategies(road_map, table_d):
    """One row per strategy on the same inputs."""
    specs = [
        StrategySpec("spacov", "2/8"),
        StrategySpec("spacov+", "2/8"),
        StrategySpec("hespic", "2/8", k=1),
    ]
    points = compare(road_map, table_d, specs, SimConfig(communication_range=0))
    assert [p.strategy for p in points] == ["spacov", "spacov+", "hespic"]
    assert points[0].report.coverage_ratio == 1.0
    assert points[2].report.cost == 1
    with pytest.raises(ParameterError):
        compare(road_map, table_d, [])


def test_compare_hespic_components(road_map, table_d):
    """Each criterion can be evaluated on its own."""
    specs = hespic_components("2/8", 2)
    points = compare(road_map, table_d, specs)
    assert [p.strategy for p in points] == [
        "hespic",
        "hespic-weight",
        "hespic-probability",
        "hespic-distance",
    ]


def test_rows_to_csv(road_map, table_d):
    """CSV rows follow the fixed column order and leave missing latencies blank."""
    points = sweep(road_map, table_d, StrategySpec("spacov", "2/8"), "range", [0])
    text = rows_to_csv([p.to_row() for p in points])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == list(ROW_FIELDS)
    assert rows[0]["junctions"] == "3 6"
    assert rows[0]["coverage_ratio"] == "1.0"
    row = {"axis": "range", "avg_latency": None}
    assert rows_to_csv([row], ["axis", "avg_latency"]) == "axis,avg_latency\nrange,\n"
