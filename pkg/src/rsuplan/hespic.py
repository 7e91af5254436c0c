"""Budget-constrained junction ranking.

Three criteria are turned into rank vectors (1 = least important, n = most
important) and averaged with user weights:

* pattern weight: how many maximal frequent, then minimal rare, patterns use a junction;
* crossing probability: truncated Poisson probability that vehicles cross it;
* dispersion: position along a greedy farthest-next walk over road distances.

The ``k`` best scored junctions form the placement.
"""

from __future__ import annotations

import hashlib
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import (
    IO,
    Any,
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .config import Settings
from .coverage import PlacementPlan
from .errors import DistanceMatrixError, ParameterError, UnknownJunctionError
from .mining import MinSup, PatternSet, mine_patterns
from .trajectory_db import JunctionId, SequentialDatabase

logger = logging.getLogger(__name__)

RankVector = Dict[JunctionId, int]

# open-interval bounds for crossing probabilities of busy junctions
_SMALLEST = math.ulp(0.0)
_LARGEST = math.nextafter(1.0, 0.0)


@dataclass(frozen=True, order=True)
class WeightPair:
    """Number of maximal frequent and of minimal rare patterns containing a junction.

    Ordering is lexicographic: the frequent count decides, the rare count breaks ties.
    """

    supp_mfs: int
    supp_mrs: int


@dataclass(frozen=True)
class ScoreWeights:
    alpha: float = 1.0
    beta: float = 1.0
    delta: float = 1.0

    def __post_init__(self) -> None:
        values = (self.alpha, self.beta, self.delta)
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ParameterError("score weights must be finite and non-negative")
        if sum(values) <= 0:
            raise ParameterError("at least one of alpha, beta, delta must be positive")

    @property
    def total(self) -> float:
        return self.alpha + self.beta + self.delta

    def scaled(self, factor: float) -> "ScoreWeights":
        return ScoreWeights(self.alpha * factor, self.beta * factor, self.delta * factor)


@dataclass(frozen=True)
class CrossingProbability:
    """Truncated crossing probability; ``log_value`` keeps busy junctions apart."""

    lam: int
    truncation_m: int
    value: float
    log_value: float = -math.inf


# ---------------------------------------------------------------------------
# Distance matrices
# ---------------------------------------------------------------------------


class DistanceMatrix:
    """Square matrix of road distances in meters, indexed by junction id.

    Rows are origins. The matrix need not be symmetric; unreachable pairs are
    ``inf``.
    """

    def __init__(self, junctions: Sequence[JunctionId], values: Any):
        self.junctions: Tuple[JunctionId, ...] = tuple(int(j) for j in junctions)
        matrix = np.array(values, dtype=float)
        n = len(self.junctions)
        if len(set(self.junctions)) != n:
            raise DistanceMatrixError("distance matrix junction ids must be unique")
        if matrix.shape != (n, n):
            raise DistanceMatrixError(
                f"distance matrix is {matrix.shape}, expected {n}x{n} for {n} junctions"
            )
        if np.isnan(matrix).any():
            raise DistanceMatrixError("distance matrix contains NaN")
        if (matrix < 0).any():
            raise DistanceMatrixError("distances must be non-negative")
        if n and not np.all(np.diag(matrix) == 0):
            raise DistanceMatrixError("distance matrix diagonal must be zero")
        matrix.setflags(write=False)
        self.values = matrix
        self._index = {j: i for i, j in enumerate(self.junctions)}

    def __len__(self) -> int:
        return len(self.junctions)

    def __repr__(self) -> str:
        return f"DistanceMatrix({len(self)} junctions)"

    def index(self, junction: JunctionId) -> int:
        try:
            return self._index[junction]
        except KeyError:
            raise UnknownJunctionError(f"junction {junction} is not in the distance matrix")

    def distance(self, origin: JunctionId, target: JunctionId) -> float:
        return float(self.values[self.index(origin), self.index(target)])

    def restrict(self, junctions: Iterable[JunctionId]) -> "DistanceMatrix":
        """Sub-matrix over ``junctions`` in ascending id order."""
        keep = sorted(set(junctions))
        rows = [self.index(j) for j in keep]
        return DistanceMatrix(keep, self.values[np.ix_(rows, rows)])

    def to_text(self) -> str:
        lines = [" ".join([str(len(self))] + [str(j) for j in self.junctions])]
        for row in self.values:
            lines.append(" ".join(_format_distance(v) for v in row))
        return "\n".join(lines) + "\n"


def _format_distance(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return f"{value:g}"


def load_distance_matrix(
    source: Union[str, Path, IO[str]],
    junctions: Optional[Sequence[JunctionId]] = None,
) -> DistanceMatrix:
    """Read a distance matrix file.

    The first line holds ``n`` and optionally the ``n`` junction ids labelling
    rows and columns. Without labels, rows map to ``junctions`` (ascending) when
    its size matches, else to ``1..n``. ``n`` rows of ``n`` numbers follow;
    ``inf`` marks unreachable pairs.
    """
    if isinstance(source, (str, Path)):
        name = str(source)
        text = Path(source).read_text(encoding="utf-8")
    else:
        name = getattr(source, "name", "<stream>")
        text = source.read()

    rows: List[Tuple[int, List[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            rows.append((lineno, line.split()))
    if not rows:
        raise DistanceMatrixError("empty distance matrix file", source=name)

    header_line, header = rows[0]
    try:
        n = int(header[0])
        labels = [int(x) for x in header[1:]]
    except ValueError as exc:
        raise DistanceMatrixError("header must be 'n [ids...]'", header_line, name) from exc
    if n < 1:
        raise DistanceMatrixError("matrix size must be positive", header_line, name)
    if labels and len(labels) != n:
        raise DistanceMatrixError(f"header lists {len(labels)} ids for n={n}", header_line, name)

    body = rows[1:]
    if len(body) != n:
        raise DistanceMatrixError(f"expected {n} rows, found {len(body)}", source=name)
    values: List[List[float]] = []
    for lineno, tokens in body:
        if len(tokens) != n:
            raise DistanceMatrixError(f"expected {n} values, found {len(tokens)}", lineno, name)
        try:
            values.append([float(t) for t in tokens])
        except ValueError as exc:
            raise DistanceMatrixError(f"invalid distance in {tokens}", lineno, name) from exc

    if not labels:
        if junctions is not None and len(junctions) == n:
            labels = sorted(junctions)
        else:
            labels = list(range(1, n + 1))
    try:
        return DistanceMatrix(labels, values)
    except DistanceMatrixError as exc:
        raise DistanceMatrixError(str(exc), source=name) from exc


def loads_distance_matrix(
    text: str, junctions: Optional[Sequence[JunctionId]] = None
) -> DistanceMatrix:
    return load_distance_matrix(io.StringIO(text), junctions)


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------


def junction_weights(
    mfs: PatternSet, mrs: PatternSet, universe: Iterable[JunctionId]
) -> Dict[JunctionId, WeightPair]:
    """Count, per junction, the maximal frequent and minimal rare patterns using it."""
    universe = set(universe)
    stray = (mfs.junctions() | mrs.junctions()) - universe
    if stray:
        raise ParameterError(f"patterns use junctions outside the universe: {sorted(stray)}")

    weights = {}
    for j in sorted(universe):
        in_mfs = sum(1 for p in mfs if j in p.junctions)
        in_mrs = sum(1 for p in mrs if j in p.junctions)
        weights[j] = WeightPair(in_mfs, in_mrs)
    return weights


def _ranks(keys: Mapping[JunctionId, Any]) -> RankVector:
    ordered = sorted(keys, key=lambda j: (keys[j], j))
    return {j: position for position, j in enumerate(ordered, start=1)}


def sort_by_weight(weights: Mapping[JunctionId, WeightPair]) -> RankVector:
    return _ranks(weights)


def log_crossing_probability(lam: int, truncation_m: int) -> float:
    """Natural log of :func:`crossing_probability`, ``-inf`` when ``lam`` is 0.

    Terms are summed in log space so large ``lam`` keeps a finite, ordered value.
    """
    if lam < 0:
        raise ParameterError("lambda must be non-negative")
    if truncation_m < 1:
        raise ParameterError("truncation_m must be at least 1")
    if lam == 0:
        return -math.inf
    log_lam = math.log(lam)
    terms = np.array(
        [m * log_lam - lam - math.lgamma(m + 1) for m in range(1, truncation_m + 1)]
    )
    return float(np.logaddexp.reduce(terms))


def crossing_probability(lam: int, truncation_m: int) -> float:
    """Probability of between 1 and ``truncation_m`` arrivals for a Poisson(``lam``) count.

    For ``lam > 0`` the result is clamped into the open interval (0, 1).
    """
    log_value = log_crossing_probability(lam, truncation_m)
    if log_value == -math.inf:
        return 0.0
    return min(max(math.exp(log_value), _SMALLEST), _LARGEST)


def crossing_probabilities(
    db: SequentialDatabase, truncation_m: int
) -> Dict[JunctionId, CrossingProbability]:
    """Per junction, lambda is the number of trajectories crossing it."""
    result = {}
    for j in sorted(db.junction_universe):
        lam = db.junction_count(j)
        result[j] = CrossingProbability(
            lam,
            truncation_m,
            crossing_probability(lam, truncation_m),
            log_crossing_probability(lam, truncation_m),
        )
    return result


def _log_probability(p: Union[float, CrossingProbability]) -> float:
    if isinstance(p, CrossingProbability):
        return p.log_value
    value = float(p)
    return math.log(value) if value > 0 else -math.inf


def sort_by_probability(
    probabilities: Mapping[JunctionId, Union[float, CrossingProbability]],
) -> RankVector:
    """Rank by log probability so values clamped to the same float stay ordered."""
    return _ranks({j: _log_probability(p) for j, p in probabilities.items()})


def greedy_longest_path(
    junctions: Iterable[JunctionId], start: JunctionId, dis: DistanceMatrix
) -> Tuple[JunctionId, ...]:
    """Walk from ``start``, always moving to the farthest unvisited junction.

    Distance ties go to the smallest id. Unreachable junctions count as
    infinitely far.
    """
    remaining = set(junctions)
    if start not in remaining:
        raise ParameterError(f"start junction {start} is not in the junction set")
    for j in remaining:
        dis.index(j)

    path = [start]
    remaining.discard(start)
    current = start
    while remaining:
        row = dis.values[dis.index(current)]
        current = min(remaining, key=lambda j: (-row[dis.index(j)], j))
        path.append(current)
        remaining.discard(current)
    return tuple(path)


def path_ranks(path: Sequence[JunctionId]) -> RankVector:
    """First junction of the path ranks ``n``, the last ranks 1."""
    n = len(path)
    return {j: n - i for i, j in enumerate(path)}


def rank_junctions(
    w_ranks: RankVector,
    p_ranks: RankVector,
    path: Sequence[JunctionId],
    score_weights: ScoreWeights = ScoreWeights(),
) -> Dict[JunctionId, float]:
    """Weighted mean of the three rank vectors per junction."""
    l_ranks = path_ranks(path)
    if not (set(w_ranks) == set(p_ranks) == set(l_ranks)) or len(l_ranks) != len(path):
        raise ParameterError("weight, probability and path ranks must cover the same junctions")
    a, b, d = score_weights.alpha, score_weights.beta, score_weights.delta
    total = score_weights.total
    return {
        j: (a * w_ranks[j] + b * p_ranks[j] + d * l_ranks[j]) / total for j in sorted(w_ranks)
    }


def top_k(scores: Mapping[JunctionId, float], k: int) -> Tuple[JunctionId, ...]:
    """The ``k`` best scored junctions, highest first, ties to the smallest id."""
    if not 1 <= k <= len(scores):
        raise ParameterError(f"k must be between 1 and {len(scores)}, got {k}")
    ordered = sorted(scores, key=lambda j: (-scores[j], j))
    return tuple(ordered[:k])


@dataclass(frozen=True)
class Ranking:
    """Every intermediate of one ranking run, kept for reports."""

    weights: Dict[JunctionId, WeightPair]
    probabilities: Dict[JunctionId, float]
    w_ranks: RankVector
    p_ranks: RankVector
    path: Tuple[JunctionId, ...]
    l_ranks: RankVector
    scores: Dict[JunctionId, float]
    selected: Tuple[JunctionId, ...]
    pattern_digest: Optional[str] = None

    def score_table(self) -> List[Dict[str, Any]]:
        """One row per junction, best score first."""
        order = sorted(self.scores, key=lambda j: (-self.scores[j], j))
        return [
            {
                "junction": j,
                "supp_mfs": self.weights[j].supp_mfs,
                "supp_mrs": self.weights[j].supp_mrs,
                "probability": round(self.probabilities[j], 6),
                "rank_weight": self.w_ranks[j],
                "rank_probability": self.p_ranks[j],
                "rank_path": self.l_ranks[j],
                "score": round(self.scores[j], 6),
                "selected": j in self.selected,
            }
            for j in order
        ]

    def to_plan(self, parameters: Dict[str, Any]) -> PlacementPlan:
        return PlacementPlan(self.selected, "hespic", dict(parameters), self.pattern_digest)


def weight_digest(mfs: PatternSet, mrs: PatternSet) -> str:
    """SHA-256 over the digests of the two pattern sets junction weights are counted from."""
    payload = f"{mfs.digest()}\n{mrs.digest()}".encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def hbcc(
    mfs: PatternSet,
    mrs: PatternSet,
    probabilities: Mapping[JunctionId, Union[float, CrossingProbability]],
    dis: DistanceMatrix,
    k: int,
    score_weights: ScoreWeights = ScoreWeights(),
    universe: Optional[Iterable[JunctionId]] = None,
) -> Ranking:
    """Rank junctions from explicit pattern sets and crossing probabilities.

    The greedy path starts at the junction with the highest weight rank and
    covers every junction, that one included.

    Args:
        universe: Junctions to rank; defaults to the matrix junctions.
    """
    junctions = sorted(set(universe) if universe is not None else set(dis.junctions))
    missing = set(junctions) - set(probabilities)
    if missing:
        raise ParameterError(f"no crossing probability for junctions {sorted(missing)}")
    if not 1 <= k <= len(junctions):
        raise ParameterError(f"k must be between 1 and {len(junctions)}, got {k}")

    weights = junction_weights(mfs, mrs, junctions)
    w_ranks = sort_by_weight(weights)
    probs = {
        j: (p.value if isinstance(p, CrossingProbability) else float(p))
        for j, p in probabilities.items()
        if j in weights
    }
    p_ranks = sort_by_probability({j: p for j, p in probabilities.items() if j in weights})
    start = max(w_ranks, key=w_ranks.__getitem__)
    path = greedy_longest_path(junctions, start, dis)
    scores = rank_junctions(w_ranks, p_ranks, path, score_weights)
    selected = top_k(scores, k)
    logger.info(f"Ranked {len(junctions)} junctions from {start}; top {k}: {list(selected)}")
    return Ranking(
        weights,
        probs,
        w_ranks,
        p_ranks,
        path,
        path_ranks(path),
        scores,
        selected,
        weight_digest(mfs, mrs),
    )


def hespic_ranking(
    db: SequentialDatabase,
    minsup: Union[MinSup, str],
    dis: DistanceMatrix,
    k: int,
    score_weights: ScoreWeights = ScoreWeights(),
    truncation_m: Optional[int] = None,
    max_len: Optional[int] = None,
) -> Ranking:
    """Mine ``db`` and rank its junctions; the rare side keeps single-junction patterns."""
    minsup = MinSup.parse(minsup)
    if truncation_m is None:
        truncation_m = Settings.from_env().poisson_m
    universe = sorted(db.junction_universe)
    if not 1 <= k <= len(universe):
        raise ParameterError(f"k must be between 1 and {len(universe)}, got {k}")

    mined = mine_patterns(db, minsup, max_len, prune=False)
    probabilities = crossing_probabilities(db, truncation_m)
    return hbcc(
        mined.mfs, mined.mrs, probabilities, dis.restrict(universe), k, score_weights, universe
    )


def hespic_top_k(
    db: SequentialDatabase,
    minsup: Union[MinSup, str],
    dis: DistanceMatrix,
    k: int,
    score_weights: ScoreWeights = ScoreWeights(),
    truncation_m: Optional[int] = None,
    max_len: Optional[int] = None,
) -> PlacementPlan:
    """Placement of the ``k`` best ranked junctions, best first."""
    minsup = MinSup.parse(minsup)
    if truncation_m is None:
        truncation_m = Settings.from_env().poisson_m
    ranking = hespic_ranking(db, minsup, dis, k, score_weights, truncation_m, max_len)
    parameters = {
        "minsup": str(minsup),
        "k": k,
        "alpha": score_weights.alpha,
        "beta": score_weights.beta,
        "delta": score_weights.delta,
        "poisson_m": truncation_m,
    }
    return ranking.to_plan(parameters)
