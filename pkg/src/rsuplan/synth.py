"""Synthetic road grids and random-walk trajectories for desk-scale experiments."""

from __future__ import annotations

import logging
from typing import List, Optional

import numpy as np

from .errors import ParameterError
from .evaluator import RoadMap
from .trajectory_db import SequentialDatabase, Trajectory

logger = logging.getLogger(__name__)


def grid_map(rows: int, cols: int, spacing: float = 150.0) -> RoadMap:
    """Manhattan grid; junction ``r * cols + c + 1`` sits at ``(c * spacing, r * spacing)``."""
    if rows < 1 or cols < 1:
        raise ParameterError("a grid needs at least one row and one column")
    if not spacing > 0:
        raise ParameterError("grid spacing must be positive")

    def jid(r: int, c: int) -> int:
        return r * cols + c + 1

    junctions = {jid(r, c): (c * spacing, r * spacing) for r in range(rows) for c in range(cols)}
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((jid(r, c), jid(r, c + 1), float(spacing)))
            if r + 1 < rows:
                edges.append((jid(r, c), jid(r + 1, c), float(spacing)))
    return RoadMap(junctions, tuple(edges))


def random_trajectories(
    road_map: RoadMap,
    vehicles: int,
    min_len: int = 3,
    max_len: int = 8,
    seed: Optional[int] = 0,
) -> SequentialDatabase:
    """Seeded random walks along map edges.

    A walk never turns straight back to the junction it came from unless it
    is at a dead end, and stops early when a junction has no road at all.
    """
    if vehicles < 1:
        raise ParameterError("at least one vehicle is needed")
    if not 1 <= min_len <= max_len:
        raise ParameterError("walk lengths must satisfy 1 <= min_len <= max_len")

    rng = np.random.default_rng(seed)
    graph = road_map.graph()
    nodes = sorted(graph.nodes)
    trajectories: List[Trajectory] = []
    for v in range(vehicles):
        length = int(rng.integers(min_len, max_len + 1))
        path = [nodes[rng.integers(len(nodes))]]
        while len(path) < length:
            neighbours = sorted(graph.neighbors(path[-1]))
            if not neighbours:
                break
            forward = [n for n in neighbours if len(path) < 2 or n != path[-2]]
            options = forward or neighbours
            path.append(options[rng.integers(len(options))])
        trajectories.append(Trajectory(f"v{v + 1}", tuple(path)))
    logger.info(f"Generated {vehicles} random walks over {len(nodes)} junctions (seed={seed})")
    return SequentialDatabase(trajectories)
