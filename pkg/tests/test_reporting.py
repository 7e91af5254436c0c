"""Tests for the rendered text summaries."""

import json

from rsuplan.coverage import PlacementPlan, spacov
from rsuplan.evaluator import SimConfig, simulate
from rsuplan.hespic import hespic_ranking
from rsuplan.mip import mip_report
from rsuplan.reporting import (
    PROXY_NOTE,
    coverage_json,
    coverage_text,
    dumps_json,
    mip_text,
    plan_text,
    ranking_text,
)


def test_plan_text(table_d):
    """Plans list their junctions, parameters and pattern digest prefix."""
    plan = spacov(table_d, "2/8")
    text = plan_text(plan)
    assert text.splitlines()[0] == "spacov plan: 2 RSU(s) at 3, 6"
    assert "  minsup = 2/8" in text
    assert f"patterns sha256 {plan.pattern_digest[:16]}" in text


def test_ranking_text_marks_selected_rows(table_d, distances):
    """Selected junctions carry a trailing star."""
    rows = hespic_ranking(table_d, "2/8", distances, 2).score_table()
    lines = ranking_text(rows).splitlines()
    assert lines[0].split() == ["junction", "weight", "probability", "O_W", "O_P", "O_L", "score"]
    assert len(lines) == 8
    assert sum(line.endswith("*") for line in lines) == 2
    assert lines[1].startswith("3 ")


def test_mip_text(table_dt):
    """Each selected sequence is printed with its utility, benefit and ratio."""
    text = mip_text(mip_report(table_dt, "1/7", 17))
    assert text.startswith("MIP at minsup 1/7, minbenefit 17")
    assert "<6 5> U=9 Bf=17.1429 R=0.1167" in text


def test_coverage_outputs(road_map, table_d):
    """Text and JSON coverage reports state the proxy definitions."""
    plan = PlacementPlan((3, 6), "spacov")
    cfg = SimConfig(communication_range=0)
    report = simulate(road_map, plan, table_d, cfg)
    text = coverage_text(report, cfg)
    assert text.startswith(f"# {PROXY_NOTE}")
    assert "coverage ratio   1.0000 (8/8)" in text
    data = json.loads(coverage_json(report, cfg, plan))
    assert data["proxies"] == PROXY_NOTE
    assert data["overhead"] == 12


def test_dumps_json_is_deterministic():
    """Keys are sorted and the output ends with a newline."""
    assert dumps_json({"b": 1, "a": [2]}) == '{\n  "a": [\n    2\n  ],\n  "b": 1\n}\n'
