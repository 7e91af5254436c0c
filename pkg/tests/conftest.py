"""Shared fixtures: the eight-vehicle and seven-trajectory databases on junctions 1..7."""

from __future__ import annotations

import os
from pathlib import Path

import pytest
from hypothesis import settings

from rsuplan.evaluator import loads_map
from rsuplan.hespic import loads_distance_matrix
from rsuplan.trajectory_db import loads_trajectories

# property suites run a thousand cases each; "quick" is for local iteration
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.register_profile("quick", max_examples=50, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "thorough"))

TABLE_D = """\
v1: 2 6 7 1
v2: 3 6 4
v3: 5 3 7
v4: 6 5
v5: 2 6 7
v6: 3 6
v7: 6 5 3 7
v8: 6 3
"""

TABLE_DT = """\
t0: 6 5 3
t1: 6 5 3 7
t2: 5 3 7
t3: 3 6
t4: 3 6 4
t5: 2 6 7
t6: 2 6 7 1
"""

# rows are origins; the matrix is deliberately not symmetric
DISTANCES = """\
7 1 2 3 4 5 6 7
0 110 170 40 50 60 20
110 0 70 95 95 45 115
170 70 0 190 110 90 150
40 95 190 0 90 90 60
60 95 110 90 0 50 50
60 45 90 40 50 0 80
20 115 150 60 50 80 0
"""

ROAD_MAP = """\
[junctions]
1 100 0
2 -45 0
3 -50 60
4 0 -40
5 0 50
6 0 0
7 80 0

[edges]
2 6 45
6 7 80
7 1 20
3 6 90
6 4 40
5 3 110
3 7 150
6 5 50
"""


@pytest.fixture
def table_d():
    return loads_trajectories(TABLE_D)


@pytest.fixture
def table_dt():
    return loads_trajectories(TABLE_DT)


@pytest.fixture
def distances():
    return loads_distance_matrix(DISTANCES)


@pytest.fixture
def road_map():
    return loads_map(ROAD_MAP)


@pytest.fixture
def data_files(tmp_path: Path):
    """The fixtures above written to disk, keyed by short name."""
    files = {
        "d": ("table_d.txt", TABLE_D),
        "dt": ("table_dt.txt", TABLE_DT),
        "dis": ("junctions7.dis", DISTANCES),
        "map": ("junctions7.map", ROAD_MAP),
    }
    paths = {}
    for key, (name, text) in files.items():
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        paths[key] = path
    return paths
