"""Trajectory databases: loading, the ordered-subsequence relation and support.

A trajectory is the ordered list of junctions one vehicle traversed. Support is
always carried as an exact ``count`` over ``total`` so threshold tests never
depend on floating point rounding.
"""

from __future__ import annotations

import io
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import (
    IO,
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import yaml

from .errors import ParameterError, TrajectoryParseError

logger = logging.getLogger(__name__)

JunctionId = int
JunctionSequence = Tuple[JunctionId, ...]
Source = Union[str, Path, IO[str], IO[bytes]]

FORMATS = ("text", "yaml")


@dataclass(frozen=True)
class SupportValue:
    """Absolute support ``count`` of a sequence in a database of ``total`` trajectories."""

    count: int
    total: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.count, self.total)

    def __float__(self) -> float:
        return self.count / self.total

    def __str__(self) -> str:
        return f"{self.count}/{self.total}"


@dataclass(frozen=True)
class Trajectory:
    vehicle_id: str
    path: JunctionSequence

    def __post_init__(self) -> None:
        if not self.path:
            raise ParameterError(f"trajectory {self.vehicle_id!r} has an empty path")
        if any(j < 0 for j in self.path):
            raise ParameterError(f"trajectory {self.vehicle_id!r} has a negative junction id")

    def __len__(self) -> int:
        return len(self.path)


def is_ordered_subsequence(s: Sequence[JunctionId], t: Sequence[JunctionId]) -> bool:
    """Return True when the junctions of ``s`` occur in ``t`` in the same relative order.

    Occurrences need not be contiguous. Each element of ``t`` is consumed at most
    once, so ``(3, 3)`` is contained in ``(3, 5, 3)`` but not in ``(3, 5)``.
    """
    it = iter(t)
    return all(j in it for j in s)


class SequentialDatabase:
    """Immutable, ordered collection of trajectories with unique vehicle ids."""

    def __init__(self, trajectories: Iterable[Trajectory]):
        self._trajectories: Tuple[Trajectory, ...] = tuple(trajectories)
        if not self._trajectories:
            raise ParameterError("empty database")

        seen = set()
        for t in self._trajectories:
            if t.vehicle_id in seen:
                raise ParameterError(f"duplicate vehicle id {t.vehicle_id!r}")
            seen.add(t.vehicle_id)

        self._universe: FrozenSet[JunctionId] = frozenset(
            j for t in self._trajectories for j in t.path
        )
        # number of trajectories containing each junction at least once
        self._junction_counts: Dict[JunctionId, int] = dict(
            Counter(j for t in self._trajectories for j in set(t.path))
        )

    @classmethod
    def from_paths(cls, paths: Iterable[Sequence[JunctionId]]) -> "SequentialDatabase":
        """Build a database naming vehicles ``t0``, ``t1``, ... in input order."""
        return cls(Trajectory(f"t{i}", tuple(p)) for i, p in enumerate(paths))

    @property
    def trajectories(self) -> Tuple[Trajectory, ...]:
        return self._trajectories

    @property
    def junction_universe(self) -> FrozenSet[JunctionId]:
        return self._universe

    @property
    def longest_path(self) -> int:
        return max(len(t) for t in self._trajectories)

    def __len__(self) -> int:
        return len(self._trajectories)

    def __iter__(self) -> Iterator[Trajectory]:
        return iter(self._trajectories)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SequentialDatabase):
            return NotImplemented
        return self._trajectories == other._trajectories

    def __hash__(self) -> int:
        return hash(self._trajectories)

    def __repr__(self) -> str:
        return f"SequentialDatabase({len(self)} trajectories, {len(self._universe)} junctions)"

    def junction_count(self, junction: JunctionId) -> int:
        """Number of trajectories passing through ``junction`` at least once."""
        return self._junction_counts.get(junction, 0)

    def containing(self, s: Sequence[JunctionId]) -> List[Trajectory]:
        """Trajectories whose path contains ``s`` as an ordered subsequence."""
        return [t for t in self._trajectories if is_ordered_subsequence(s, t.path)]

    def support(self, s: Sequence[JunctionId]) -> SupportValue:
        return support(self, s)

    def head(self, n: int) -> "SequentialDatabase":
        """The first ``n`` trajectories, used for vehicle-count subsampling."""
        if n < 1:
            raise ParameterError("a database subsample needs at least one trajectory")
        return SequentialDatabase(self._trajectories[:n])


def support(db: SequentialDatabase, s: Sequence[JunctionId]) -> SupportValue:
    """Count the trajectories of ``db`` containing ``s``; each trajectory counts once."""
    if len(s) == 0:
        raise ParameterError("support of the empty sequence is undefined")
    if len(s) == 1:
        return SupportValue(db.junction_count(s[0]), len(db))
    count = sum(1 for t in db if is_ordered_subsequence(s, t.path))
    return SupportValue(count, len(db))


# ---------------------------------------------------------------------------
# File IO
# ---------------------------------------------------------------------------


class DuplicateKeyError(yaml.MarkedYAMLError):
    """A YAML mapping repeats a key; ``key`` is the constructed key."""

    def __init__(self, key: Any, mark: yaml.Mark):
        super().__init__(problem=f"found duplicate key {key!r}", problem_mark=mark)
        self.key = key


class UniqueKeyLoader(yaml.SafeLoader):
    """SafeLoader that rejects repeated mapping keys instead of keeping the last one."""

    def construct_mapping(self, node: yaml.MappingNode, deep: bool = False) -> Dict[Any, Any]:
        seen = set()
        for key_node, _ in node.value if isinstance(node, yaml.MappingNode) else ():
            if key_node.tag == "tag:yaml.org,2002:merge":
                continue
            key = self.construct_object(key_node, deep=deep)
            try:
                duplicate = key in seen
            except TypeError:
                continue
            if duplicate:
                raise DuplicateKeyError(key, key_node.start_mark)
            seen.add(key)
        return super().construct_mapping(node, deep=deep)


def safe_load_unique(stream: Union[str, IO[str]]) -> Any:
    """``yaml.safe_load`` with duplicate keys reported as :class:`DuplicateKeyError`."""
    return yaml.load(stream, Loader=UniqueKeyLoader)


def _read_source(source: Source) -> Tuple[str, str]:
    """Return ``(text, name)`` for a path or an open text/binary stream."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            return path.read_text(encoding="utf-8"), str(path)
        except UnicodeDecodeError as exc:
            raise TrajectoryParseError("file is not valid UTF-8", source=str(path)) from exc
    data = source.read()
    name = getattr(source, "name", "<stream>")
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TrajectoryParseError("stream is not valid UTF-8", source=name) from exc
    return data, str(name)


def _parse_junctions(raw: Iterable[object], lineno: Optional[int], name: str) -> JunctionSequence:
    path: List[int] = []
    for token in raw:
        try:
            if isinstance(token, bool) or isinstance(token, float):
                raise ValueError
            value = int(token)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            raise TrajectoryParseError(f"invalid junction id {token!r}", line=lineno, source=name)
        if value < 0:
            raise TrajectoryParseError(
                f"junction ids must be non-negative, got {value}", line=lineno, source=name
            )
        path.append(value)
    return tuple(path)


def _parse_text(text: str, name: str) -> List[Trajectory]:
    trajectories: List[Trajectory] = []
    seen: Dict[str, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        vehicle_id, sep, rest = line.partition(":")
        vehicle_id = vehicle_id.strip()
        if not sep:
            raise TrajectoryParseError("expected '<vehicle_id>: <junctions>'", lineno, name)
        if not vehicle_id:
            raise TrajectoryParseError("missing vehicle id", lineno, name)
        path = _parse_junctions(rest.split(), lineno, name)
        if not path:
            raise TrajectoryParseError(f"trajectory {vehicle_id!r} has no junctions", lineno, name)
        if vehicle_id in seen:
            raise TrajectoryParseError(
                f"duplicate vehicle id {vehicle_id!r} (first seen on line {seen[vehicle_id]})",
                lineno,
                name,
            )
        seen[vehicle_id] = lineno
        trajectories.append(Trajectory(vehicle_id, path))
    return trajectories


def _parse_yaml(text: str, name: str) -> List[Trajectory]:
    try:
        data = safe_load_unique(text)
    except DuplicateKeyError as exc:
        raise TrajectoryParseError(
            f"duplicate vehicle id {exc.key!r}", line=exc.problem_mark.line + 1, source=name
        ) from exc
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise TrajectoryParseError(f"invalid YAML: {exc}", line=line, source=name) from exc
    if data is None:
        return []
    if not isinstance(data, dict):
        raise TrajectoryParseError("expected a mapping of vehicle id to junction list", source=name)

    trajectories = []
    seen = set()
    for vehicle_id, junctions in data.items():
        if str(vehicle_id) in seen:
            raise TrajectoryParseError(f"duplicate vehicle id {str(vehicle_id)!r}", source=name)
        seen.add(str(vehicle_id))
        if not isinstance(junctions, list) or not junctions:
            raise TrajectoryParseError(
                f"trajectory {vehicle_id!r} must be a non-empty list of junction ids", source=name
            )
        trajectories.append(Trajectory(str(vehicle_id), _parse_junctions(junctions, None, name)))
    return trajectories


def load_trajectories(source: Source, format: str = "text") -> SequentialDatabase:
    """Load a trajectory file.

    Args:
        source: File path or open stream (text or UTF-8 bytes).
        format: ``"text"`` for ``<vehicle_id>: <junction ids>`` lines, where ``#``
            starts a comment line and blank lines are skipped, or ``"yaml"`` for a
            mapping of vehicle id to junction list.

    Raises:
        TrajectoryParseError: Malformed line, empty file or duplicate vehicle id.
        ParameterError: Unknown format.
    """
    if format not in FORMATS:
        raise ParameterError(f"unknown trajectory format {format!r}; expected one of {FORMATS}")

    text, name = _read_source(source)
    trajectories = _parse_text(text, name) if format == "text" else _parse_yaml(text, name)
    if not trajectories:
        raise TrajectoryParseError("empty database", source=name)

    db = SequentialDatabase(trajectories)
    logger.info(f"Loaded {len(db)} trajectories over {len(db.junction_universe)} junctions")
    return db


def _text_id(vehicle_id: str) -> str:
    """Return ``vehicle_id`` when a text line keeps it intact on reading back."""
    if (
        not vehicle_id
        or vehicle_id != vehicle_id.strip()
        or ":" in vehicle_id
        or vehicle_id.startswith("#")
        or len(vehicle_id.splitlines()) != 1
    ):
        raise ParameterError(
            f"vehicle id {vehicle_id!r} cannot be written in the text format; use yaml"
        )
    return vehicle_id


def dump_trajectories(db: SequentialDatabase, format: str = "text") -> str:
    """Serialize ``db`` so that :func:`load_trajectories` reproduces it exactly.

    Raises:
        ParameterError: The text format is asked for an id holding ``:`` or a
            line break, starting with ``#`` or padded with whitespace.
    """
    if format == "text":
        return "".join(f"{_text_id(t.vehicle_id)}: {' '.join(map(str, t.path))}\n" for t in db)
    if format == "yaml":
        data = {t.vehicle_id: list(t.path) for t in db}
        return yaml.safe_dump(data, sort_keys=False, default_flow_style=None)
    raise ParameterError(f"unknown trajectory format {format!r}; expected one of {FORMATS}")


def loads_trajectories(text: str, format: str = "text") -> SequentialDatabase:
    """Parse trajectories from an in-memory string."""
    return load_trajectories(io.StringIO(text), format=format)
