"""Utility-weighted pattern selection.

A trajectory's utility is the sum, over its junctions, of how many trajectories
cross each junction. Frequent sequences are scored by a benefit that mixes the
utility of the trajectories containing them with their own utility, and the
ones above a threshold are ranked by length over benefit (lower is better).

All arithmetic uses absolute support counts and exact fractions; floats only
appear in reports.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .config import Settings
from .coverage import PlacementPlan, cover_patterns
from .errors import EmptyPatternSetError, ParameterError
from .mining import MinSup, PatternKind, PatternSet, canonical_key, mine_frequent
from .trajectory_db import JunctionId, SequentialDatabase, Trajectory, is_ordered_subsequence

logger = logging.getLogger(__name__)


class UtilityAnnotatedDb:
    """A trajectory database with one utility value per trajectory."""

    def __init__(self, base: SequentialDatabase, utilities: Optional[Dict[str, int]] = None):
        self.base = base
        computed = {t.vehicle_id: sequence_utility(base, t.path) for t in base}
        if utilities is not None and utilities != computed:
            raise ParameterError("trajectory utilities do not match the database")
        self.trajectory_utility: Dict[str, int] = computed

    def __len__(self) -> int:
        return len(self.base)

    def utility(self, trajectory: Trajectory) -> int:
        return self.trajectory_utility[trajectory.vehicle_id]

    def utilities(self) -> Tuple[int, ...]:
        return tuple(self.trajectory_utility[t.vehicle_id] for t in self.base)


@dataclass(frozen=True)
class BenefitReport:
    sequence: Tuple[JunctionId, ...]
    utility: int
    densities: Dict[str, int]
    benefit: Fraction
    ratio: Fraction

    @property
    def support_count(self) -> int:
        return len(self.densities)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sequence": list(self.sequence),
            "utility": self.utility,
            "densities": dict(self.densities),
            "benefit": round(float(self.benefit), 6),
            "ratio": round(float(self.ratio), 6),
        }


def sequence_utility(db: SequentialDatabase, s: Sequence[JunctionId]) -> int:
    """Sum of single-junction support counts over the positions of ``s``."""
    if len(s) == 0:
        raise ParameterError("utility of the empty sequence is undefined")
    return sum(db.junction_count(j) for j in s)


def trajectory_utilities(db: SequentialDatabase) -> UtilityAnnotatedDb:
    return UtilityAnnotatedDb(db)


def density(udb: UtilityAnnotatedDb, s: Sequence[JunctionId], t: Trajectory) -> int:
    """Utility of ``t``, defined only when ``t`` contains ``s`` in order."""
    if not is_ordered_subsequence(s, t.path):
        raise ParameterError(f"sequence {tuple(s)} is not contained in trajectory {t.vehicle_id!r}")
    return udb.utility(t)


def _benefit(udb: UtilityAnnotatedDb, s: Sequence[JunctionId]) -> Tuple[Fraction, Dict[str, int]]:
    containing = udb.base.containing(s)
    if not containing:
        raise ParameterError(f"benefit of {tuple(s)} is undefined: zero support")
    densities = {t.vehicle_id: udb.utility(t) for t in containing}
    u = sequence_utility(udb.base, s)
    support_count = len(containing)
    value = Fraction(sum(densities.values()), support_count) + sum(
        (Fraction(u, d) for d in densities.values()), Fraction(0)
    )
    return value, densities


def benefit(udb: UtilityAnnotatedDb, s: Sequence[JunctionId]) -> float:
    return float(_benefit(udb, s)[0])


def benefit_report(udb: UtilityAnnotatedDb, s: Sequence[JunctionId]) -> BenefitReport:
    value, densities = _benefit(udb, s)
    return BenefitReport(
        tuple(s), sequence_utility(udb.base, s), densities, value, Fraction(len(s)) / value
    )


def ratio(
    udb: UtilityAnnotatedDb, s: Sequence[JunctionId], minbenefit: Optional[float] = None
) -> float:
    """Length over benefit.

    Raises:
        ParameterError: ``minbenefit`` is given and the benefit falls below it.
    """
    value, _ = _benefit(udb, s)
    if minbenefit is not None and value < Fraction(minbenefit):
        raise ParameterError(f"benefit {float(value):.4f} of {tuple(s)} is below {minbenefit}")
    return float(Fraction(len(s)) / value)


def mipa(udb: UtilityAnnotatedDb, fs: PatternSet, minbenefit: float) -> List[BenefitReport]:
    """Frequent sequences whose benefit reaches ``minbenefit``, best ratio first."""
    threshold = Fraction(minbenefit)
    kept = []
    for p in fs:
        if p.support.count == 0:
            continue
        report = benefit_report(udb, p.sequence)
        if report.benefit >= threshold:
            kept.append(report)
    kept.sort(key=lambda r: (r.ratio, canonical_key(r.sequence)))
    logger.debug(f"{len(kept)} of {len(fs)} frequent sequences reach benefit {minbenefit}")
    return kept


@dataclass(frozen=True)
class MipReport:
    minsup: MinSup
    minbenefit: float
    patterns: Tuple[BenefitReport, ...]
    plan: Optional[PlacementPlan]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "minsup": str(self.minsup),
            "minbenefit": self.minbenefit,
            "patterns": [r.to_dict() for r in self.patterns],
            "plan": self.plan.to_dict() if self.plan else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def mip_report(
    db: SequentialDatabase,
    minsup: Union[MinSup, str],
    minbenefit: float,
    settings: Optional[Settings] = None,
) -> MipReport:
    """Mine, filter by benefit and cover; the plan is ``None`` when nothing qualifies."""
    minsup = MinSup.parse(minsup)
    udb = trajectory_utilities(db)
    fs = mine_frequent(db, minsup)
    selected = mipa(udb, fs, minbenefit)
    if not selected:
        logger.warning(f"No frequent sequence reaches benefit {minbenefit} at minsup {minsup}")
        return MipReport(minsup, minbenefit, (), None)

    patterns = PatternSet(PatternKind.FS, tuple(fs.get(r.sequence) for r in selected))
    plan = cover_patterns(
        patterns, "mip", {"minsup": str(minsup), "minbenefit": minbenefit}, settings
    )
    return MipReport(minsup, minbenefit, tuple(selected), plan)


def mip_placement(
    db: SequentialDatabase,
    minsup: Union[MinSup, str],
    minbenefit: float,
    settings: Optional[Settings] = None,
) -> PlacementPlan:
    """Cover the high-benefit frequent sequences.

    Raises:
        EmptyPatternSetError: No frequent sequence reaches ``minbenefit``.
    """
    report = mip_report(db, minsup, minbenefit, settings)
    if report.plan is None:
        raise EmptyPatternSetError(
            f"no frequent sequence reaches benefit {minbenefit}; nothing to place"
        )
    return report.plan
