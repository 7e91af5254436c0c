"""Human-readable summaries rendered with Jinja2, plus stable JSON output."""

from __future__ import annotations

import json
from typing import Any, Dict, Iterable, Sequence

from jinja2 import DictLoader, Environment, StrictUndefined

from .coverage import PlacementPlan
from .evaluator import CoverageReport, SimConfig, SweepPoint
from .mining import MiningResult
from .mip import MipReport

PROXY_NOTE = (
    "latency = 0-based path position of first in-range junction; "
    "overhead = one message per in-range junction visit"
)

_TEMPLATES = {
    "patterns": """\
{% macro block(title, ps) -%}
{{ title }} ({{ ps|length }})
{% for p in ps %}  {{ p.to_text() }}
{% endfor %}
{%- endmacro -%}
minsup {{ result.minsup }}, max_len {{ result.max_len }}
{{ block("FS", result.fs) }}{{ block("MFS", result.mfs) }}{{ block("MRS", result.mrs) }}\
{{ block("MRS pruned", result.pruned_mrs) }}{{ block("AP", result.ap) }}""",
    "plan": """\
{{ plan.strategy }} plan: {{ plan.rsu_junctions|length }} RSU(s) at {{ plan.rsu_junctions|join(", ") }}
{% for key, value in plan.parameters|dictsort %}  {{ key }} = {{ value }}
{% endfor %}
{%- if plan.pattern_digest %}  patterns sha256 {{ plan.pattern_digest[:16] }}
{% endif %}""",
    "ranking": """\
{{ "%-8s %-9s %-11s %-4s %-4s %-4s %-8s"|format("junction", "weight", "probability", "O_W", "O_P", "O_L", "score") }}
{% for row in rows %}\
{{ "%-8s %-9s %-11.4f %-4d %-4d %-4d %-8.4f"|format(row.junction, "(%d,%d)"|format(row.supp_mfs, row.supp_mrs), row.probability, row.rank_weight, row.rank_probability, row.rank_path, row.score) }}{{ " *" if row.selected else "" }}
{% endfor %}""",
    "mip": """\
MIP at minsup {{ report.minsup }}, minbenefit {{ report.minbenefit }}: {{ report.patterns|length }} pattern(s)
{% for r in report.patterns %}  <{{ r.sequence|join(" ") }}> U={{ r.utility }} Bf={{ "%.4f"|format(r.benefit|float) }} R={{ "%.4f"|format(r.ratio|float) }}
{% endfor %}""",
    "coverage": """\
# {{ note }}
range {{ cfg.communication_range }} m, message {{ cfg.message_size }} B @ {{ cfg.message_frequency }} Hz
coverage ratio   {{ "%.4f"|format(report.coverage_ratio) }} ({{ report.informed_vehicles }}/{{ report.total_vehicles }})
avg latency      {{ "n/a" if report.avg_latency is none else "%.3f"|format(report.avg_latency) }}
overhead         {{ report.overhead }} messages ({{ report.overhead_bytes }} bytes)
cost             {{ report.cost }} RSU(s)
""",
    "sweep": """\
# {{ note }}
{{ "%-10s %-10s %-10s %-8s %-8s %-9s %s"|format("axis", "value", "strategy", "ratio", "latency", "overhead", "cost") }}
{% for p in points %}\
{{ "%-10s %-10s %-10s %-8.4f %-8s %-9d %d"|format(p.axis, p.value, p.strategy, p.report.coverage_ratio, "n/a" if p.report.avg_latency is none else "%.3f"|format(p.report.avg_latency), p.report.overhead, p.report.cost) }}
{% endfor %}""",
}

_env = Environment(
    loader=DictLoader(_TEMPLATES),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    autoescape=False,
)


def render(template: str, **context: Any) -> str:
    return _env.get_template(template).render(note=PROXY_NOTE, **context)


def dumps_json(data: Any) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def mining_text(result: MiningResult) -> str:
    return render("patterns", result=result)


def plan_text(plan: PlacementPlan) -> str:
    return render("plan", plan=plan)


def ranking_text(rows: Sequence[Dict[str, Any]]) -> str:
    return render("ranking", rows=rows)


def mip_text(report: MipReport) -> str:
    return render("mip", report=report)


def coverage_text(report: CoverageReport, cfg: SimConfig) -> str:
    return render("coverage", report=report, cfg=cfg)


def sweep_text(points: Iterable[SweepPoint]) -> str:
    return render("sweep", points=list(points))


def coverage_json(report: CoverageReport, cfg: SimConfig, plan: PlacementPlan) -> str:
    return dumps_json(
        {
            "proxies": PROXY_NOTE,
            "config": _config_dict(cfg),
            "plan": plan.to_dict(),
            **report.to_dict(),
        }
    )


def sweep_json(points: Iterable[SweepPoint], cfg: SimConfig) -> str:
    return dumps_json(
        {"proxies": PROXY_NOTE, "config": _config_dict(cfg), "rows": [p.to_row() for p in points]}
    )


def _config_dict(cfg: SimConfig) -> Dict[str, Any]:
    return {name: getattr(cfg, name) for name in cfg.__dataclass_fields__}

