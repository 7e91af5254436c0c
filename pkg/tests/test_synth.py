"""Tests for the synthetic grid map and random-walk generator."""

import pytest

from rsuplan.errors import ParameterError
from rsuplan.synth import grid_map, random_trajectories


def test_grid_layout():
    """Junction ids run row by row; neighbours are one spacing apart."""
    grid = grid_map(2, 3, spacing=100)
    assert len(grid) == 6
    assert len(grid.edges) == 7
    assert grid.position(1) == (0, 0)
    assert grid.position(6) == (200, 100)
    assert all(length == 100 for _, _, length in grid.edges)


def test_walks_follow_roads():
    """Consecutive junctions of a walk share an edge and lengths stay in bounds."""
    grid = grid_map(4, 4)
    graph = grid.graph()
    db = random_trajectories(grid, 50, min_len=2, max_len=6, seed=3)
    assert len(db) == 50
    assert [t.vehicle_id for t in db][:3] == ["v1", "v2", "v3"]
    for t in db:
        assert 2 <= len(t.path) <= 6
        for a, b in zip(t.path, t.path[1:]):
            assert graph.has_edge(a, b)


def test_walks_do_not_turn_back():
    """A walk only reverses at a dead end."""
    db = random_trajectories(grid_map(3, 3), 40, min_len=3, max_len=3, seed=11)
    for t in db:
        assert t.path[0] != t.path[2]


def test_seed_makes_walks_reproducible():
    """The same seed yields the same database."""
    grid = grid_map(3, 3)
    assert random_trajectories(grid, 20, seed=5) == random_trajectories(grid, 20, seed=5)
    assert random_trajectories(grid, 20, seed=5) != random_trajectories(grid, 20, seed=6)


def test_generator_validation():
    """Degenerate grids and walk bounds are rejected."""
    with pytest.raises(ParameterError):
        grid_map(0, 3)
    with pytest.raises(ParameterError):
        grid_map(2, 2, spacing=0)
    with pytest.raises(ParameterError):
        random_trajectories(grid_map(2, 2), 0)
    with pytest.raises(ParameterError):
        random_trajectories(grid_map(2, 2), 5, min_len=4, max_len=2)
