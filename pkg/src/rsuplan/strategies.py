"""One entry point for building a placement plan from a strategy description."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Union

from .config import Settings
from .coverage import STRATEGIES, PlacementPlan, spacov, spacov_plus
from .errors import ParameterError
from .hespic import DistanceMatrix, ScoreWeights, hespic_top_k
from .mining import MinSup
from .mip import mip_placement
from .trajectory_db import SequentialDatabase

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StrategySpec:
    """Strategy name plus every parameter it may need.

    ``k`` is required by ``hespic`` and ``minbenefit`` by ``mip``; the other
    strategies ignore them.
    """

    strategy: str
    minsup: MinSup
    max_len: Optional[int] = None
    minbenefit: Optional[float] = None
    k: Optional[int] = None
    score_weights: ScoreWeights = field(default_factory=ScoreWeights)
    truncation_m: Optional[int] = None
    label: Optional[str] = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ParameterError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )
        object.__setattr__(self, "minsup", MinSup.parse(self.minsup))
        if self.strategy == "hespic" and (self.k is None or self.k < 1):
            raise ParameterError("hespic needs k >= 1")
        if self.strategy == "mip" and self.minbenefit is None:
            raise ParameterError("mip needs minbenefit")
        if self.max_len is not None and self.max_len < 1:
            raise ParameterError("max_len must be at least 1")

    @property
    def name(self) -> str:
        return self.label or self.strategy

    def with_value(self, **changes: Any) -> "StrategySpec":
        return replace(self, **changes)


def build_plan(
    spec: StrategySpec,
    db: SequentialDatabase,
    dis: Optional[DistanceMatrix] = None,
    settings: Optional[Settings] = None,
) -> PlacementPlan:
    """Run the strategy described by ``spec`` on ``db``.

    Raises:
        ParameterError: ``hespic`` is requested without a distance matrix.
    """
    logger.debug(f"Building {spec.name} plan at minsup {spec.minsup}")
    if spec.strategy == "spacov":
        return spacov(db, spec.minsup, settings)
    if spec.strategy == "spacov+":
        return spacov_plus(db, spec.minsup, spec.max_len, settings)
    if spec.strategy == "mip":
        return mip_placement(db, spec.minsup, spec.minbenefit, settings)  # type: ignore[arg-type]
    if dis is None:
        raise ParameterError("hespic needs a distance matrix or a road map")
    return hespic_top_k(
        db,
        spec.minsup,
        dis,
        spec.k,  # type: ignore[arg-type]
        spec.score_weights,
        spec.truncation_m,
        spec.max_len,
    )


def hespic_components(
    minsup: Union[MinSup, str], k: int, truncation_m: Optional[int] = None
) -> List[StrategySpec]:
    """The combined ranking and each criterion on its own."""
    variants: Dict[str, ScoreWeights] = {
        "hespic": ScoreWeights(1.0, 1.0, 1.0),
        "hespic-weight": ScoreWeights(1.0, 0.0, 0.0),
        "hespic-probability": ScoreWeights(0.0, 1.0, 0.0),
        "hespic-distance": ScoreWeights(0.0, 0.0, 1.0),
    }
    return [
        StrategySpec(
            "hespic",
            MinSup.parse(minsup),
            k=k,
            score_weights=weights,
            truncation_m=truncation_m,
            label=label,
        )
        for label, weights in variants.items()
    ]
