"""Pattern hypergraphs, minimal transversals and covering placements.

Each pattern becomes a hyperedge holding its junctions as a set. A transversal
hits every hyperedge, so a vehicle whose trajectory contains any covered pattern
necessarily crosses a junction of the chosen set.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .config import Settings
from .errors import (
    EmptyPatternSetError,
    InvariantViolation,
    ParameterError,
    PlanFileError,
    ResourceBoundExceeded,
)
from .mining import MinSup, PatternSet, mine_frequent, mine_patterns, maximal_frequent
from .trajectory_db import JunctionId, SequentialDatabase

logger = logging.getLogger(__name__)

STRATEGIES = ("spacov", "spacov+", "hespic", "mip")

Edge = FrozenSet[JunctionId]


def set_key(junctions: Iterable[JunctionId]) -> Tuple[int, Tuple[JunctionId, ...]]:
    """Order junction sets by cardinality, then by their sorted ids."""
    ordered = tuple(sorted(junctions))
    return (len(ordered), ordered)


@dataclass(frozen=True)
class Hypergraph:
    vertices: FrozenSet[JunctionId]
    edges: Tuple[Edge, ...]

    def __post_init__(self) -> None:
        if any(len(e) == 0 for e in self.edges):
            raise ParameterError("hyperedges must not be empty")
        union = frozenset().union(*self.edges) if self.edges else frozenset()
        if union != frozenset(self.vertices):
            raise ParameterError("hypergraph vertices must equal the union of its edges")
        unique = {frozenset(e) for e in self.edges}
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", tuple(sorted(unique, key=set_key)))

    def is_transversal(self, junctions: Iterable[JunctionId]) -> bool:
        chosen = set(junctions)
        return all(e & chosen for e in self.edges)


@dataclass(frozen=True)
class Transversal:
    junctions: FrozenSet[JunctionId]

    def __len__(self) -> int:
        return len(self.junctions)

    def sorted(self) -> Tuple[JunctionId, ...]:
        return tuple(sorted(self.junctions))


@dataclass(frozen=True)
class PlacementPlan:
    """RSU junctions chosen by one strategy, plus the parameters that produced them."""

    rsu_junctions: Tuple[JunctionId, ...]
    strategy: str
    parameters: Dict[str, Any] = field(default_factory=dict, hash=False)
    pattern_digest: Optional[str] = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ParameterError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )
        if len(set(self.rsu_junctions)) != len(self.rsu_junctions):
            raise ParameterError("a placement plan lists each junction once")
        object.__setattr__(self, "rsu_junctions", tuple(self.rsu_junctions))

    def __len__(self) -> int:
        return len(self.rsu_junctions)

    def __contains__(self, junction: object) -> bool:
        return junction in self.rsu_junctions

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy,
            "parameters": dict(self.parameters),
            "junctions": list(self.rsu_junctions),
            "pattern_digest": self.pattern_digest,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PlacementPlan":
        """Accept a bare plan or a report that nests one under ``"plan"``."""
        if "junctions" not in data and isinstance(data.get("plan"), dict):
            data = data["plan"]
        try:
            junctions = tuple(int(j) for j in data["junctions"])
            return cls(
                rsu_junctions=junctions,
                strategy=str(data["strategy"]),
                parameters=dict(data.get("parameters") or {}),
                pattern_digest=data.get("pattern_digest"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PlanFileError(f"invalid placement plan: {exc}") from exc


def load_plan(path: Union[str, Path]) -> PlacementPlan:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PlanFileError(f"invalid JSON: {exc.msg}", line=exc.lineno, source=str(path)) from exc
    if not isinstance(data, dict):
        raise PlanFileError("a plan file holds one JSON object", source=str(path))
    return PlacementPlan.from_dict(data)


def build_hypergraph(patterns: PatternSet) -> Hypergraph:
    """One hyperedge per pattern junction set; order-symmetric duplicates collapse."""
    if len(patterns) == 0:
        raise EmptyPatternSetError(f"cannot build a hypergraph from an empty {patterns.kind.value}")
    edges = tuple(frozenset(p.sequence) for p in patterns)
    vertices = frozenset().union(*edges)
    h = Hypergraph(vertices, edges)
    logger.debug(
        f"Hypergraph over {len(h.vertices)} junctions with {len(h.edges)} edges "
        f"from {len(patterns)} patterns"
    )
    return h


class _Enumerator:
    """Depth-first minimal transversal enumeration.

    Branches on the uncovered edge with the fewest candidate vertices and keeps,
    for every chosen vertex, its critical edges (edges it alone hits). A branch
    is abandoned as soon as some chosen vertex loses all its critical edges.
    """

    def __init__(self, h: Hypergraph, cap: int, budget: float):
        self.edges = h.edges
        self.vertices = sorted(h.vertices)
        self.incident: Dict[JunctionId, FrozenSet[int]] = {
            v: frozenset(i for i, e in enumerate(self.edges) if v in e) for v in self.vertices
        }
        self.cap = cap
        self.deadline = time.monotonic() + budget if budget > 0 else None
        self.found: List[FrozenSet[JunctionId]] = []

    def _check_budget(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ResourceBoundExceeded(
                f"minimal transversal enumeration exceeded its time budget after "
                f"{len(self.found)} transversals"
            )

    def run(self) -> List[FrozenSet[JunctionId]]:
        if self.edges:
            self._search([], {}, frozenset(self.vertices), frozenset(range(len(self.edges))))
        return self.found

    def _search(
        self,
        chosen: List[JunctionId],
        crit: Dict[JunctionId, FrozenSet[int]],
        cand: FrozenSet[JunctionId],
        uncov: FrozenSet[int],
    ) -> None:
        self._check_budget()
        if not uncov:
            self.found.append(frozenset(chosen))
            if len(self.found) > self.cap:
                raise ResourceBoundExceeded(
                    f"more than {self.cap} minimal transversals; raise RSUPLAN_MAX_TRANSVERSALS "
                    f"or tighten minsup"
                )
            return

        pivot = min(uncov, key=lambda i: (len(self.edges[i] & cand), i))
        branch = sorted(self.edges[pivot] & cand)
        cand = cand - set(branch)
        for v in branch:
            hit = self.incident[v]
            new_crit = {u: edges - hit for u, edges in crit.items()}
            if all(new_crit.values()):
                new_crit[v] = uncov & hit
                self._search(chosen + [v], new_crit, cand, uncov - hit)
            cand = cand | {v}


def minimal_transversals(
    h: Hypergraph,
    max_transversals: Optional[int] = None,
    time_budget: Optional[float] = None,
) -> List[Transversal]:
    """Every minimal transversal of ``h``, sorted by cardinality then ids.

    Args:
        max_transversals: Abort once more than this many have been found.
        time_budget: Abort after this many seconds; ``0`` means unlimited.

    Raises:
        ResourceBoundExceeded: Either bound was crossed. Results are never truncated.
    """
    settings = Settings.from_env()
    cap = settings.max_transversals if max_transversals is None else max_transversals
    budget = settings.time_budget if time_budget is None else time_budget
    if cap < 1:
        raise ParameterError("max_transversals must be at least 1")

    found = _Enumerator(h, cap, budget).run()
    result = [Transversal(t) for t in sorted(found, key=set_key)]
    logger.debug(f"Found {len(result)} minimal transversals")
    return result


def select_cover(
    transversals: Sequence[Transversal],
    strategy: str = "spacov",
    parameters: Optional[Dict[str, Any]] = None,
    pattern_digest: Optional[str] = None,
) -> PlacementPlan:
    """Pick the smallest transversal, breaking ties by the smallest sorted id tuple."""
    if not transversals:
        raise EmptyPatternSetError("no transversal to select a cover from")
    best = min(transversals, key=lambda t: set_key(t.junctions))
    plan = PlacementPlan(best.sorted(), strategy, dict(parameters or {}), pattern_digest)
    logger.info(f"Selected {strategy} cover {list(plan.rsu_junctions)}")
    return plan


def cover_patterns(
    patterns: PatternSet,
    strategy: str,
    parameters: Optional[Dict[str, Any]] = None,
    settings: Optional[Settings] = None,
) -> PlacementPlan:
    """Hypergraph, transversals and cover selection for an already mined set."""
    settings = settings or Settings.from_env()
    h = build_hypergraph(patterns)
    transversals = minimal_transversals(h, settings.max_transversals, settings.time_budget)
    plan = select_cover(transversals, strategy, parameters, patterns.digest())
    if not h.is_transversal(plan.rsu_junctions):
        missed = [e for e in h.edges if not e & set(plan.rsu_junctions)]
        raise InvariantViolation(
            f"{strategy} cover {list(plan.rsu_junctions)} misses {sorted(missed[0])}"
        )
    return plan


def spacov(
    db: SequentialDatabase,
    minsup: Union[MinSup, str],
    settings: Optional[Settings] = None,
) -> PlacementPlan:
    """Cover every maximal frequent sequence."""
    minsup = MinSup.parse(minsup)
    mfs = maximal_frequent(mine_frequent(db, minsup))
    return cover_patterns(mfs, "spacov", {"minsup": str(minsup)}, settings)


def spacov_plus(
    db: SequentialDatabase,
    minsup: Union[MinSup, str],
    max_len: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> PlacementPlan:
    """Cover the representative set (maximal frequent plus pruned minimal rare)."""
    minsup = MinSup.parse(minsup)
    result = mine_patterns(db, minsup, max_len)
    return cover_patterns(
        result.ap,
        "spacov+",
        {"minsup": str(minsup), "max_len": result.max_len},
        settings,
    )
