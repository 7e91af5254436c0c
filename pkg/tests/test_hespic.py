"""Tests for the budgeted junction ranking: weights, crossing probabilities and dispersion."""

import math

import numpy as np
import pytest

from rsuplan.errors import DistanceMatrixError, ParameterError, UnknownJunctionError
from rsuplan.hespic import (
    CrossingProbability,
    DistanceMatrix,
    ScoreWeights,
    WeightPair,
    crossing_probabilities,
    crossing_probability,
    greedy_longest_path,
    hbcc,
    hespic_ranking,
    hespic_top_k,
    junction_weights,
    loads_distance_matrix,
    log_crossing_probability,
    path_ranks,
    rank_junctions,
    sort_by_probability,
    sort_by_weight,
    top_k,
    weight_digest,
)
from rsuplan.mining import PatternKind, mine_patterns
from tests.oracles import pattern_set

MFS = pattern_set(PatternKind.MFS, (6, 5), (3, 6), (6, 3), (2, 6, 7), (5, 3, 7))
MRS = pattern_set(
    PatternKind.MRS,
    (1,), (4,),
    (2, 3), (2, 5), (3, 2), (3, 5), (5, 6), (5, 2), (6, 2), (7, 6), (7, 5), (7, 3),
    (3, 6, 7), (6, 5, 7), (6, 5, 3), (6, 3, 7),
)  # fmt: skip

# crossing probabilities as tabulated for the worked example
PROBABILITIES = {1: 0.630, 2: 0.863, 3: 0.859, 4: 0.630, 5: 0.938, 6: 0.740, 7: 0.930}


def test_junction_weights():
    """Each junction counts the maximal frequent and minimal rare patterns using it."""
    weights = junction_weights(MFS, MRS, range(1, 8))
    assert weights == {
        1: WeightPair(0, 1),
        2: WeightPair(1, 5),
        3: WeightPair(3, 7),
        4: WeightPair(0, 1),
        5: WeightPair(2, 7),
        6: WeightPair(4, 7),
        7: WeightPair(2, 6),
    }


def test_junction_weights_reject_stray_junctions():
    """Patterns may only use junctions of the ranked universe."""
    with pytest.raises(ParameterError):
        junction_weights(MFS, MRS, range(1, 7))


def test_weight_ranks_order_lexicographically():
    """The frequent count decides, the rare count breaks ties, then the junction id."""
    ranks = sort_by_weight(junction_weights(MFS, MRS, range(1, 8)))
    order = sorted(ranks, key=ranks.get)
    assert order == [1, 4, 2, 7, 5, 3, 6]
    assert sorted(ranks.values()) == list(range(1, 8))


def test_probability_ranks():
    """Equal probabilities tie-break on the smaller junction id."""
    ranks = sort_by_probability(PROBABILITIES)
    assert ranks == {1: 1, 4: 2, 6: 3, 3: 4, 2: 5, 7: 6, 5: 7}


@pytest.mark.parametrize(
    "lam, expected",
    [(0, 0.0), (1, 0.6321), (2, 0.8636), (3, 0.9383), (4, 0.9306), (5, 0.8599), (7, 0.5978)],
)
def test_crossing_probability_truncated_at_seven(lam, expected):
    """Probability of one to seven arrivals."""
    assert crossing_probability(lam, 7) == pytest.approx(expected, abs=1e-4)


def test_crossing_probability_bounds():
    """Values stay in [0, 1] and grow with the truncation point."""
    values = [crossing_probability(40, m) for m in (1, 10, 40, 60)]
    assert all(0.0 <= v <= 1.0 for v in values)
    assert values == sorted(values)
    assert crossing_probability(3, 200) == pytest.approx(1 - math.exp(-3))
    with pytest.raises(ParameterError):
        crossing_probability(-1, 7)
    with pytest.raises(ParameterError):
        crossing_probability(1, 0)


@pytest.mark.parametrize("lam", [700, 745, 800, 1000, 5000])
def test_busy_junctions_keep_a_positive_probability(lam):
    """Hundreds of vehicles still give a value strictly between 0 and 1."""
    p = crossing_probability(lam, 7)
    assert 0.0 < p < 1.0
    assert math.isfinite(log_crossing_probability(lam, 7))
    assert log_crossing_probability(lam, 7) > log_crossing_probability(lam + 1, 7)


def test_busy_junctions_rank_by_log_probability():
    """Junctions whose floats clamp to the same value are still ordered by lambda."""
    lambdas = {1: 900, 2: 800, 3: 1000}
    probs = {
        j: CrossingProbability(
            lam, 7, crossing_probability(lam, 7), log_crossing_probability(lam, 7)
        )
        for j, lam in lambdas.items()
    }
    assert probs[1].value == probs[3].value
    assert sort_by_probability(probs) == {3: 1, 1: 2, 2: 3}


def test_crossing_probabilities_use_junction_counts(table_d):
    """Lambda is the number of trajectories through the junction."""
    probs = crossing_probabilities(table_d, 7)
    assert probs[6].lam == 7
    assert probs[3].lam == 5
    assert probs[6].value == pytest.approx(0.5978, abs=1e-4)


def test_greedy_longest_path(distances):
    """From junction 6 the walk always moves to the farthest unvisited junction."""
    path = greedy_longest_path(range(1, 8), 6, distances)
    assert path == (6, 3, 4, 2, 7, 5, 1)
    assert path_ranks(path) == {6: 7, 3: 6, 4: 5, 2: 4, 7: 3, 5: 2, 1: 1}


def test_greedy_path_ties_and_unreachable():
    """Ties go to the smaller id and unreachable junctions count as farthest."""
    dis = DistanceMatrix([1, 2, 3], [[0, 5, 5], [5, 0, 1], [5, 1, 0]])
    assert greedy_longest_path([1, 2, 3], 1, dis) == (1, 2, 3)
    dis = DistanceMatrix([1, 2, 3], [[0, 5, math.inf], [5, 0, 1], [1, 1, 0]])
    assert greedy_longest_path([1, 2, 3], 1, dis) == (1, 3, 2)
    with pytest.raises(ParameterError):
        greedy_longest_path([1, 2], 3, dis)


def test_scores_of_the_worked_example(distances):
    """Equal weights average the three ranks."""
    w_ranks = sort_by_weight(junction_weights(MFS, MRS, range(1, 8)))
    p_ranks = sort_by_probability(PROBABILITIES)
    path = greedy_longest_path(range(1, 8), 6, distances)
    scores = rank_junctions(w_ranks, p_ranks, path, ScoreWeights(1, 1, 1))
    sums = {j: round(s * 3) for j, s in scores.items()}
    assert sums == {1: 3, 2: 12, 3: 16, 4: 9, 5: 14, 6: 17, 7: 13}
    assert scores[1] == pytest.approx(1.0)
    assert top_k(scores, 4) == (6, 3, 5, 7)
    assert top_k(scores, 1) == (6,)


def test_hbcc_ranking(distances):
    """The combined ranking starts its walk at the heaviest junction."""
    ranking = hbcc(MFS, MRS, PROBABILITIES, distances, 4)
    assert ranking.path[0] == 6
    assert ranking.selected == (6, 3, 5, 7)
    table = ranking.score_table()
    assert [row["junction"] for row in table] == [6, 3, 5, 7, 2, 4, 1]
    assert [row["selected"] for row in table] == [True] * 4 + [False] * 3
    assert table[0]["rank_path"] == 7


def test_single_criterion_weights(distances):
    """A zero weight removes a criterion from the score."""
    only_weight = hbcc(MFS, MRS, PROBABILITIES, distances, 2, ScoreWeights(1, 0, 0))
    assert only_weight.selected == (6, 3)
    only_probability = hbcc(MFS, MRS, PROBABILITIES, distances, 2, ScoreWeights(0, 1, 0))
    assert only_probability.selected == (5, 7)


def test_top_k_bounds():
    """k must lie between 1 and the number of junctions."""
    with pytest.raises(ParameterError):
        top_k({1: 1.0}, 0)
    with pytest.raises(ParameterError):
        top_k({1: 1.0}, 2)


def test_score_weights_validation():
    """Weights are non-negative and not all zero."""
    with pytest.raises(ParameterError):
        ScoreWeights(0, 0, 0)
    with pytest.raises(ParameterError):
        ScoreWeights(-1, 1, 1)
    with pytest.raises(ParameterError):
        ScoreWeights(math.nan, 1, 1)
    assert ScoreWeights(1, 2, 3).scaled(2) == ScoreWeights(2, 4, 6)


def test_full_pipeline_on_table_d(table_d, distances):
    """Mined weights and computed lambdas rank junction 3 first."""
    ranking = hespic_ranking(table_d, "2/8", distances, 2)
    assert ranking.selected == (3, 6)
    assert ranking.weights[6] == WeightPair(4, 8)
    plan = hespic_top_k(table_d, "2/8", distances, 1)
    assert plan.rsu_junctions == (3,)
    assert plan.parameters["poisson_m"] == 7
    with pytest.raises(ParameterError):
        hespic_top_k(table_d, "2/8", distances, 8)


def test_ranking_plan_records_the_pattern_digest(table_d, distances):
    """The plan digest identifies the frequent and rare sets the weights came from."""
    mined = mine_patterns(table_d, "2/8", prune=False)
    plan = hespic_top_k(table_d, "2/8", distances, 2)
    assert plan.pattern_digest == weight_digest(mined.mfs, mined.mrs)
    assert plan.pattern_digest == hespic_ranking(table_d, "2/8", distances, 2).pattern_digest
    assert hespic_top_k(table_d, "3/8", distances, 2).pattern_digest != plan.pattern_digest
    assert weight_digest(MFS, MRS) != weight_digest(MRS, MFS)


def test_poisson_truncation_from_environment(monkeypatch, table_d, distances):
    """RSUPLAN_POISSON_M is the default truncation point."""
    monkeypatch.setenv("RSUPLAN_POISSON_M", "3")
    plan = hespic_top_k(table_d, "2/8", distances, 1)
    assert plan.parameters["poisson_m"] == 3


def test_distance_matrix_file(distances):
    """Labelled rows keep their ids; lookups go through them."""
    assert distances.junctions == (1, 2, 3, 4, 5, 6, 7)
    assert distances.distance(1, 5) == 50
    assert distances.distance(5, 1) == 60
    with pytest.raises(UnknownJunctionError):
        distances.distance(1, 9)
    assert loads_distance_matrix(distances.to_text()).values.tolist() == distances.values.tolist()


def test_unlabelled_matrix_maps_to_sorted_junctions():
    """Without labels, rows follow the ascending junction ids when the sizes match."""
    text = "2\n0 7\n7 0\n"
    assert loads_distance_matrix(text, [30, 10]).junctions == (10, 30)
    assert loads_distance_matrix(text).junctions == (1, 2)
    assert loads_distance_matrix("2\n0 inf\ninf 0\n").distance(1, 2) == math.inf


@pytest.mark.parametrize(
    "text",
    [
        "",
        "x\n",
        "2 1\n0 1\n1 0\n",
        "2\n0 1\n",
        "2\n0 1 2\n1 0\n",
        "2\n0 a\n1 0\n",
        "2\n0 -1\n1 0\n",
        "2\n1 1\n1 0\n",
        "2\n0 nan\n1 0\n",
    ],
)
def test_bad_distance_matrices(text):
    """Malformed matrices are parse errors."""
    with pytest.raises(DistanceMatrixError):
        loads_distance_matrix(text)


def test_restrict_keeps_the_requested_junctions(distances):
    """Sub-matrices are read-only and ordered by id."""
    sub = distances.restrict([6, 3])
    assert sub.junctions == (3, 6)
    assert sub.distance(6, 3) == 90
    assert not sub.values.flags.writeable
    assert isinstance(sub.values, np.ndarray)
