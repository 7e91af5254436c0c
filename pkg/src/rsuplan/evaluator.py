"""Road maps, shortest-path distances and a deterministic coverage replay.

Vehicles are only observed at junctions, so the replay walks each trajectory
and checks whether the junction it is at lies within communication range of an
RSU. Latency and overhead are proxies:

* latency is the 0-based position along the path of the first in-range junction;
* overhead is one message per in-range junction visit.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import yaml

from .coverage import PlacementPlan
from .errors import MapParseError, ParameterError, UnknownJunctionError
from .hespic import DistanceMatrix
from .mining import MinSup
from .strategies import StrategySpec, build_plan
from .trajectory_db import DuplicateKeyError, JunctionId, SequentialDatabase, safe_load_unique

logger = logging.getLogger(__name__)

MAP_FORMATS = ("text", "yaml")
SWEEP_AXES = ("k", "minsup", "range", "vehicles")

Edge = Tuple[JunctionId, JunctionId, float]


@dataclass(frozen=True)
class RoadMap:
    """Junction coordinates in meters and undirected road segments with lengths."""

    junctions: Dict[JunctionId, Tuple[float, float]]
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        for a, b, length in self.edges:
            for end in (a, b):
                if end not in self.junctions:
                    raise MapParseError(f"edge ({a}, {b}) references unknown junction {end}")
            if not length > 0 or not math.isfinite(length):
                raise MapParseError(f"edge ({a}, {b}) must have a positive length, got {length}")
        object.__setattr__(self, "edges", tuple(self.edges))

    def __len__(self) -> int:
        return len(self.junctions)

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.junctions.items())), self.edges))

    def position(self, junction: JunctionId) -> Tuple[float, float]:
        try:
            return self.junctions[junction]
        except KeyError:
            raise UnknownJunctionError(f"junction {junction} is not on the map")

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        for j, (x, y) in sorted(self.junctions.items()):
            g.add_node(j, x=x, y=y)
        for a, b, length in self.edges:
            # parallel roads collapse to the shortest one
            if g.has_edge(a, b) and g[a][b]["length"] <= length:
                continue
            g.add_edge(a, b, length=length)
        return g


def _number(token: Any, what: str, lineno: Optional[int], name: str) -> float:
    try:
        value = float(token)
    except (TypeError, ValueError):
        raise MapParseError(f"invalid {what} {token!r}", lineno, name)
    if not math.isfinite(value):
        raise MapParseError(f"{what} must be finite", lineno, name)
    return value


def _junction(token: Any, lineno: Optional[int], name: str) -> JunctionId:
    try:
        value = int(token)
    except (TypeError, ValueError):
        raise MapParseError(f"invalid junction id {token!r}", lineno, name)
    if value < 0:
        raise MapParseError(f"junction ids must be non-negative, got {value}", lineno, name)
    return value


def _parse_map_text(text: str, name: str) -> RoadMap:
    junctions: Dict[JunctionId, Tuple[float, float]] = {}
    edges: List[Edge] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("junctions", "edges"):
                raise MapParseError(f"unknown section [{section}]", lineno, name)
            continue
        tokens = line.split()
        if section is None:
            raise MapParseError("data before any [junctions] or [edges] section", lineno, name)
        if len(tokens) != 3:
            layout = "id x y" if section == "junctions" else "a b length"
            raise MapParseError(f"expected '{layout}'", lineno, name)
        if section == "junctions":
            j = _junction(tokens[0], lineno, name)
            if j in junctions:
                raise MapParseError(f"duplicate junction {j}", lineno, name)
            junctions[j] = (
                _number(tokens[1], "x", lineno, name),
                _number(tokens[2], "y", lineno, name),
            )
        else:
            a, b = _junction(tokens[0], lineno, name), _junction(tokens[1], lineno, name)
            length = _number(tokens[2], "length", lineno, name)
            for end in (a, b):
                if end not in junctions:
                    raise MapParseError(f"edge endpoint {end} is not a junction", lineno, name)
            if length <= 0:
                raise MapParseError(f"edge length must be positive, got {length}", lineno, name)
            edges.append((a, b, length))
    if not junctions:
        raise MapParseError("map has no junctions", source=name)
    return RoadMap(junctions, tuple(edges))


def _parse_map_yaml(text: str, name: str) -> RoadMap:
    try:
        data = safe_load_unique(text)
    except DuplicateKeyError as exc:
        raise MapParseError(
            f"duplicate key {exc.key!r}", line=exc.problem_mark.line + 1, source=name
        ) from exc
    except yaml.YAMLError as exc:
        raise MapParseError(f"invalid YAML: {exc}", source=name) from exc
    if not isinstance(data, dict) or not data.get("junctions"):
        raise MapParseError("map needs a non-empty 'junctions' mapping", source=name)

    junctions = {}
    for key, coords in data["junctions"].items():
        if not isinstance(coords, (list, tuple)) or len(coords) != 2:
            raise MapParseError(f"junction {key!r} needs [x, y]", source=name)
        junction = _junction(key, None, name)
        if junction in junctions:
            raise MapParseError(f"duplicate junction {junction}", source=name)
        junctions[junction] = (
            _number(coords[0], "x", None, name),
            _number(coords[1], "y", None, name),
        )
    edges = []
    for item in data.get("edges") or []:
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            raise MapParseError(f"edge {item!r} needs [a, b, length]", source=name)
        edges.append(
            (
                _junction(item[0], None, name),
                _junction(item[1], None, name),
                _number(item[2], "length", None, name),
            )
        )
    try:
        return RoadMap(junctions, tuple(edges))
    except MapParseError as exc:
        raise MapParseError(str(exc), source=name) from exc


def load_map(source: Union[str, Path, IO[str]], format: str = "text") -> RoadMap:
    """Read a road map.

    The text format has a ``[junctions]`` section of ``id x y`` lines and an
    ``[edges]`` section of ``a b length`` lines; ``#`` starts a comment line.
    """
    if format not in MAP_FORMATS:
        raise ParameterError(f"unknown map format {format!r}; expected one of {MAP_FORMATS}")
    if isinstance(source, (str, Path)):
        name = str(source)
        text = Path(source).read_text(encoding="utf-8")
    else:
        name = getattr(source, "name", "<stream>")
        text = source.read()
    road_map = _parse_map_text(text, name) if format == "text" else _parse_map_yaml(text, name)
    logger.info(f"Loaded map with {len(road_map)} junctions and {len(road_map.edges)} edges")
    return road_map


def loads_map(text: str, format: str = "text") -> RoadMap:
    return load_map(io.StringIO(text), format)


def dump_map(road_map: RoadMap, format: str = "text") -> str:
    if format == "text":
        lines = ["[junctions]"]
        lines += [f"{j} {x:g} {y:g}" for j, (x, y) in sorted(road_map.junctions.items())]
        lines.append("[edges]")
        lines += [f"{a} {b} {length:g}" for a, b, length in road_map.edges]
        return "\n".join(lines) + "\n"
    if format == "yaml":
        data = {
            "junctions": {j: [x, y] for j, (x, y) in sorted(road_map.junctions.items())},
            "edges": [[a, b, length] for a, b, length in road_map.edges],
        }
        return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)
    raise ParameterError(f"unknown map format {format!r}; expected one of {MAP_FORMATS}")


def shortest_path_matrix(road_map: RoadMap) -> DistanceMatrix:
    """All-pairs Dijkstra distances over edge lengths; unreachable pairs are ``inf``."""
    junctions = sorted(road_map.junctions)
    index = {j: i for i, j in enumerate(junctions)}
    values = np.full((len(junctions), len(junctions)), np.inf)
    for source, lengths in nx.all_pairs_dijkstra_path_length(road_map.graph(), weight="length"):
        for target, d in lengths.items():
            values[index[source], index[target]] = d
    np.fill_diagonal(values, 0.0)
    if np.isinf(values).any():
        logger.warning("Road map is disconnected; some junction pairs are unreachable")
    return DistanceMatrix(junctions, values)


@dataclass(frozen=True)
class SimConfig:
    """Replay settings.

    Only the range and message size enter the proxies. The replay steps from
    junction to junction with no clock, so each in-range visit is one message;
    ``message_frequency`` and the radio fields are echoed in reports to record the
    setup the numbers stand for.
    """

    communication_range: float = 300.0
    message_size: int = 2312
    message_frequency: float = 0.5
    runs: int = 1
    frequency_band_ghz: float = 5.9
    tx_power_mw: float = 40.0
    bandwidth_mhz: float = 10.0
    bit_rate_mbps: float = 6.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.communication_range) or self.communication_range < 0:
            raise ParameterError("communication range must be a non-negative number of meters")
        if self.message_size < 1:
            raise ParameterError("message size must be positive")
        if not self.message_frequency > 0:
            raise ParameterError("message frequency must be positive")
        if self.runs < 1:
            raise ParameterError("runs must be at least 1")


@dataclass(frozen=True)
class CoverageReport:
    coverage_ratio: float
    informed_vehicles: int
    total_vehicles: int
    avg_latency: Optional[float]
    overhead: int
    overhead_bytes: int
    cost: int

    FIELDS = (
        "coverage_ratio",
        "informed_vehicles",
        "total_vehicles",
        "avg_latency",
        "overhead",
        "overhead_bytes",
        "cost",
    )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def in_range_junctions(
    road_map: RoadMap, rsu_junctions: Iterable[JunctionId], communication_range: float
) -> frozenset:
    """Junctions within ``communication_range`` meters of at least one RSU."""
    rsus = [road_map.position(j) for j in rsu_junctions]
    if not rsus:
        return frozenset()
    ids = sorted(road_map.junctions)
    points = np.array([road_map.junctions[j] for j in ids], dtype=float)
    centers = np.array(rsus, dtype=float)
    gaps = np.linalg.norm(points[:, None, :] - centers[None, :, :], axis=2)
    covered = (gaps <= communication_range + 1e-9).any(axis=1)
    return frozenset(j for j, hit in zip(ids, covered) if hit)


def _replay(
    road_map: RoadMap, plan: PlacementPlan, db: SequentialDatabase, cfg: SimConfig
) -> CoverageReport:
    reach = in_range_junctions(road_map, plan.rsu_junctions, cfg.communication_range)
    informed = 0
    latencies: List[int] = []
    overhead = 0
    for t in db:
        contacts = [i for i, j in enumerate(t.path) if j in reach]
        if contacts:
            informed += 1
            latencies.append(contacts[0])
            overhead += len(contacts)
    return CoverageReport(
        coverage_ratio=informed / len(db),
        informed_vehicles=informed,
        total_vehicles=len(db),
        avg_latency=float(np.mean(latencies)) if latencies else None,
        overhead=overhead,
        overhead_bytes=overhead * cfg.message_size,
        cost=len(plan.rsu_junctions),
    )


def simulate(
    road_map: RoadMap,
    plan: PlacementPlan,
    db: SequentialDatabase,
    cfg: SimConfig = SimConfig(),
) -> CoverageReport:
    """Replay every trajectory against ``plan`` and measure coverage.

    Raises:
        UnknownJunctionError: A plan or trajectory junction is not on the map.
    """
    for j in plan.rsu_junctions:
        road_map.position(j)
    unknown = db.junction_universe - set(road_map.junctions)
    if unknown:
        raise UnknownJunctionError(f"trajectory junctions not on the map: {sorted(unknown)}")

    reports = [_replay(road_map, plan, db, cfg) for _ in range(cfg.runs)]
    first = reports[0]
    if cfg.runs == 1:
        return first
    latencies = [r.avg_latency for r in reports if r.avg_latency is not None]
    return replace(
        first,
        coverage_ratio=float(np.mean([r.coverage_ratio for r in reports])),
        avg_latency=float(np.mean(latencies)) if latencies else None,
    )


# ---------------------------------------------------------------------------
# Sweeps and comparisons
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    axis: str
    value: str
    strategy: str
    rsu_junctions: Tuple[JunctionId, ...]
    report: CoverageReport

    def to_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {
            "axis": self.axis,
            "value": self.value,
            "strategy": self.strategy,
            "junctions": " ".join(map(str, self.rsu_junctions)),
        }
        row.update(self.report.to_dict())
        return row


ROW_FIELDS = ("axis", "value", "strategy", "junctions") + CoverageReport.FIELDS


def _distances(
    road_map: RoadMap, spec: StrategySpec, dis: Optional[DistanceMatrix]
) -> Optional[DistanceMatrix]:
    if spec.strategy != "hespic" or dis is not None:
        return dis
    return shortest_path_matrix(road_map)


def sweep(
    road_map: RoadMap,
    db: SequentialDatabase,
    spec: StrategySpec,
    axis: str,
    values: Sequence[Any],
    cfg: SimConfig = SimConfig(),
    dis: Optional[DistanceMatrix] = None,
) -> List[SweepPoint]:
    """One coverage report per axis value.

    ``range`` reuses one plan, ``k`` and ``minsup`` rebuild the plan per value
    and ``vehicles`` plans and replays on the first ``n`` trajectories.
    """
    if axis not in SWEEP_AXES:
        raise ParameterError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    if not values:
        raise ParameterError("a sweep needs at least one value")
    if axis == "k" and spec.strategy != "hespic":
        raise ParameterError("only hespic has a k axis")
    dis = _distances(road_map, spec, dis)

    points: List[SweepPoint] = []
    fixed_plan = build_plan(spec, db, dis) if axis == "range" else None
    for value in values:
        run_db, run_cfg, run_spec = db, cfg, spec
        if axis == "range":
            run_cfg = replace(cfg, communication_range=_finite(value, axis))
            label = f"{run_cfg.communication_range:g}"
        elif axis == "k":
            run_spec = spec.with_value(k=_integer(value, axis))
            label = str(run_spec.k)
        elif axis == "minsup":
            run_spec = spec.with_value(minsup=MinSup.parse(value))
            label = str(run_spec.minsup)
        else:
            run_db = db.head(_integer(value, axis))
            label = str(len(run_db))
        plan = fixed_plan if fixed_plan is not None else build_plan(run_spec, run_db, dis)
        report = simulate(road_map, plan, run_db, run_cfg)
        points.append(SweepPoint(axis, label, spec.name, plan.rsu_junctions, report))
        logger.info(f"Sweep {axis}={label}: coverage {report.coverage_ratio:.3f}")
    return points


def _finite(value: Any, axis: str) -> float:
    try:
        number = float(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{axis} values must be numbers, got {value!r}") from exc
    if not math.isfinite(number):
        raise ParameterError(f"{axis} values must be finite, got {value!r}")
    return number


def _integer(value: Any, axis: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{axis} values must be integers, got {value!r}") from exc


def compare(
    road_map: RoadMap,
    db: SequentialDatabase,
    specs: Sequence[StrategySpec],
    cfg: SimConfig = SimConfig(),
    dis: Optional[DistanceMatrix] = None,
) -> List[SweepPoint]:
    """Evaluate several strategies on the same map and trajectories."""
    if not specs:
        raise ParameterError("nothing to compare")
    if dis is None and any(s.strategy == "hespic" for s in specs):
        dis = shortest_path_matrix(road_map)
    points = []
    for spec in specs:
        plan = build_plan(spec, db, dis)
        report = simulate(road_map, plan, db, cfg)
        points.append(SweepPoint("strategy", spec.name, spec.name, plan.rsu_junctions, report))
    return points


def rows_to_csv(rows: Iterable[Dict[str, Any]], fields: Sequence[str] = ROW_FIELDS) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in fields})
    return buffer.getvalue()
