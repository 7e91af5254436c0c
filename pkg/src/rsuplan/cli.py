"""Command‑line interface powered by *click*."""

from __future__ import annotations

import functools
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click

from . import __version__
from .config import Settings, build_default_map, find_config_file, load_config_file
from .coverage import PlacementPlan, load_plan, spacov, spacov_plus
from .errors import EmptyPatternSetError, RsuPlanError
from .evaluator import (
    ROW_FIELDS,
    SWEEP_AXES,
    SimConfig,
    compare,
    dump_map,
    load_map,
    rows_to_csv,
    shortest_path_matrix,
    simulate,
    sweep,
)
from .hespic import DistanceMatrix, ScoreWeights, hespic_ranking, load_distance_matrix
from .mining import MinSup, mine_patterns
from .mip import mip_report
from .reporting import (
    coverage_json,
    coverage_text,
    dumps_json,
    mining_text,
    mip_text,
    plan_text,
    ranking_text,
    sweep_json,
    sweep_text,
)
from .strategies import StrategySpec, hespic_components
from .synth import grid_map, random_trajectories
from .trajectory_db import SequentialDatabase, dump_trajectories, load_trajectories

logger = logging.getLogger(__name__)

EXIT_IO = 1


class CommandFailure(click.ClickException):
    """A ClickException carrying the exit status of the error it wraps."""

    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def handle_errors(func: Callable) -> Callable:
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except RsuPlanError as exc:
            raise CommandFailure(str(exc), exc.exit_code) from exc
        except OSError as exc:
            raise CommandFailure(f"I/O error: {exc}", EXIT_IO) from exc

    return wrapper


class MinSupType(click.ParamType):
    name = "minsup"

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]):
        try:
            return MinSup.parse(value)
        except RsuPlanError as exc:
            self.fail(f"{value!r} is not a fraction in (0, 1]: {exc}", param, ctx)


MINSUP = MinSupType()
EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
OUTPUT_FILE = click.Path(dir_okay=False, writable=True, path_type=Path)


# ---------------------------------------------------------------------------
# Shared options
# ---------------------------------------------------------------------------


def trajectory_options(func: Callable) -> Callable:
    func = click.option(
        "--format",
        "trajectory_format",
        type=click.Choice(["text", "yaml"]),
        default="text",
        show_default=True,
        help="Trajectory file dialect.",
    )(func)
    return click.option(
        "--trajectories",
        "-t",
        type=EXISTING_FILE,
        required=True,
        help="Trajectory file ('<vehicle_id>: <junction ids>' per line).",
    )(func)


def minsup_option(func: Callable) -> Callable:
    return click.option(
        "--minsup",
        type=MINSUP,
        required=True,
        help="Minimum support as 'a/b' or a decimal in (0, 1].",
    )(func)


def max_len_option(func: Callable) -> Callable:
    return click.option(
        "--max-len",
        type=click.IntRange(min=1),
        default=None,
        help="Longest rare candidate considered [default: longest trajectory].",
    )(func)


def output_options(*formats: str) -> Callable:
    def decorator(func: Callable) -> Callable:
        func = click.option(
            "--output-format",
            type=click.Choice(list(formats)),
            default=formats[0],
            show_default=True,
            help="Artifact format.",
        )(func)
        return click.option(
            "--output",
            "-o",
            type=OUTPUT_FILE,
            default=None,
            help="Write the artifact here and print a summary; default prints the artifact.",
        )(func)

    return decorator


def score_options(func: Callable) -> Callable:
    for name, help_text in (
        ("--delta", "Weight of the dispersion path rank."),
        ("--beta", "Weight of the crossing probability rank."),
        ("--alpha", "Weight of the pattern weight rank."),
    ):
        func = click.option(
            name, type=click.FloatRange(min=0), default=1.0, show_default=True, help=help_text
        )(func)
    return click.option(
        "--poisson-m",
        type=click.IntRange(min=1),
        default=None,
        help="Truncation of the crossing probability sum [default: RSUPLAN_POISSON_M or 7].",
    )(func)


def sim_options(func: Callable) -> Callable:
    func = click.option(
        "--runs", type=click.IntRange(min=1), default=1, show_default=True, help="Repetitions."
    )(func)
    func = click.option(
        "--message-frequency",
        type=click.FloatRange(min=0, min_open=True),
        default=0.5,
        show_default=True,
        help="Beacon frequency in Hz, recorded in reports.",
    )(func)
    func = click.option(
        "--message-size",
        type=click.IntRange(min=1),
        default=2312,
        show_default=True,
        help="Message size in bytes.",
    )(func)
    return click.option(
        "--range",
        "communication_range",
        type=click.FloatRange(min=0),
        default=300.0,
        show_default=True,
        help="RSU communication range in meters.",
    )(func)


def map_options(func: Callable) -> Callable:
    func = click.option(
        "--map-format",
        type=click.Choice(["text", "yaml"]),
        default="text",
        show_default=True,
        help="Map file dialect.",
    )(func)
    return click.option(
        "--map", "map_path", type=EXISTING_FILE, required=True, help="Road map file."
    )(func)


def _emit(artifact: str, summary: str, output: Optional[Path]) -> None:
    if output is None:
        click.echo(artifact, nl=False)
        return
    output.write_text(artifact, encoding="utf-8")
    click.echo(summary.rstrip("\n"))
    click.echo(f"✅ Wrote {output}")


def _load_db(path: Path, trajectory_format: str) -> SequentialDatabase:
    return load_trajectories(path, format=trajectory_format)


def _sim_config(communication_range, message_size, message_frequency, runs) -> SimConfig:
    return SimConfig(
        communication_range=communication_range,
        message_size=message_size,
        message_frequency=message_frequency,
        runs=runs,
    )


def _config_keys() -> Dict[str, Dict[str, str]]:
    """Per command, every key a config file may use mapped to its parameter name."""
    keys: Dict[str, Dict[str, str]] = {}
    for name, cmd in cli.commands.items():
        aliases: Dict[str, str] = {}
        for param in cmd.params:
            if not isinstance(param, click.Option) or param.name is None:
                continue
            aliases[param.name] = param.name
            for opt in param.opts:
                if opt.startswith("--"):
                    aliases[opt[2:].replace("-", "_")] = param.name
        keys[name] = aliases
    return keys


def _log_level(verbose: int, settings: Settings) -> int:
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    return getattr(logging, settings.log_level)


def _configure_logging(verbose: int) -> None:
    try:
        settings = Settings.from_env()
    except RsuPlanError as exc:
        raise CommandFailure(str(exc), exc.exit_code) from exc
    level = _log_level(verbose, settings)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="rsuplan")
@click.option("-v", "--verbose", count=True, help="Log progress (-v) or details (-vv).")
@click.option(
    "--config",
    "config_path",
    type=EXISTING_FILE,
    default=None,
    help="YAML file of option defaults; flags override it. Also read from RSUPLAN_CONFIG.",
)
@click.pass_context
def cli(ctx: click.Context, verbose: int, config_path: Optional[Path]) -> None:
    """Mine vehicle trajectories and place road-side units."""
    _configure_logging(verbose)
    path = find_config_file(config_path)
    if path is None:
        return
    try:
        data = load_config_file(path)
    except RsuPlanError as exc:
        raise CommandFailure(str(exc), exc.exit_code) from exc
    except OSError as exc:
        raise CommandFailure(f"I/O error: {exc}", EXIT_IO) from exc
    ctx.default_map = build_default_map(data, _config_keys())
    logger.debug(f"Loaded option defaults from {path}")


@cli.command("mine")
@trajectory_options
@minsup_option
@max_len_option
@click.option("--unpruned", is_flag=True, help="Build AP from the unpruned minimal rare set.")
@output_options("json", "text")
@handle_errors
def mine_cmd(trajectories, trajectory_format, minsup, max_len, unpruned, output, output_format):
    """Mine frequent, maximal, rare and representative sequences."""
    db = _load_db(trajectories, trajectory_format)
    result = mine_patterns(db, minsup, max_len, prune=not unpruned)
    text = mining_text(result)
    artifact = dumps_json(result.to_dict()) if output_format == "json" else text
    _emit(artifact, f"|FS|={len(result.fs)} |MFS|={len(result.mfs)} |AP|={len(result.ap)}", output)


def _plan_artifact(plan: PlacementPlan, output_format: str) -> str:
    return plan.to_json() if output_format == "json" else plan_text(plan)


@cli.command("spacov")
@trajectory_options
@minsup_option
@output_options("json", "text")
@handle_errors
def spacov_cmd(trajectories, trajectory_format, minsup, output, output_format):
    """Cover every maximal frequent sequence with the fewest RSUs."""
    db = _load_db(trajectories, trajectory_format)
    plan = spacov(db, minsup, Settings.from_env())
    _emit(_plan_artifact(plan, output_format), plan_text(plan), output)


@cli.command("spacov-plus")
@trajectory_options
@minsup_option
@max_len_option
@output_options("json", "text")
@handle_errors
def spacov_plus_cmd(trajectories, trajectory_format, minsup, max_len, output, output_format):
    """Cover maximal frequent and minimal rare sequences with the fewest RSUs."""
    db = _load_db(trajectories, trajectory_format)
    plan = spacov_plus(db, minsup, max_len, Settings.from_env())
    _emit(_plan_artifact(plan, output_format), plan_text(plan), output)


def _distance_matrix(
    db: SequentialDatabase,
    dis_path: Optional[Path],
    map_path: Optional[Path],
    map_format: str,
) -> DistanceMatrix:
    if dis_path is not None:
        return load_distance_matrix(dis_path, sorted(db.junction_universe))
    if map_path is not None:
        return shortest_path_matrix(load_map(map_path, map_format))
    raise click.UsageError("hespic needs --dis or --map")


@cli.command("hespic")
@trajectory_options
@minsup_option
@max_len_option
@click.option("--k", "k", type=click.IntRange(min=1), required=True, help="Number of RSUs.")
@score_options
@click.option("--dis", "dis_path", type=EXISTING_FILE, default=None, help="Distance matrix file.")
@click.option("--map", "map_path", type=EXISTING_FILE, default=None, help="Road map file.")
@click.option(
    "--map-format",
    type=click.Choice(["text", "yaml"]),
    default="text",
    show_default=True,
    help="Map file dialect.",
)
@output_options("json", "csv", "text")
@handle_errors
def hespic_cmd(
    trajectories,
    trajectory_format,
    minsup,
    max_len,
    k,
    poisson_m,
    alpha,
    beta,
    delta,
    dis_path,
    map_path,
    map_format,
    output,
    output_format,
):
    """Place the k best ranked junctions."""
    db = _load_db(trajectories, trajectory_format)
    dis = _distance_matrix(db, dis_path, map_path, map_format)
    weights = ScoreWeights(alpha, beta, delta)
    poisson_m = poisson_m or Settings.from_env().poisson_m
    ranking = hespic_ranking(db, minsup, dis, k, weights, poisson_m, max_len)
    plan = ranking.to_plan(
        {
            "minsup": str(minsup),
            "k": k,
            "alpha": alpha,
            "beta": beta,
            "delta": delta,
            "poisson_m": poisson_m,
        },
    )
    rows = ranking.score_table()
    summary = plan_text(plan) + ranking_text(rows)
    if output_format == "json":
        artifact = dumps_json({**plan.to_dict(), "ranking": rows})
    elif output_format == "csv":
        artifact = rows_to_csv(rows, list(rows[0]))
    else:
        artifact = summary
    _emit(artifact, summary, output)


@cli.command("mip")
@trajectory_options
@minsup_option
@click.option(
    "--minbenefit",
    type=click.FloatRange(min=0),
    required=True,
    help="Minimum benefit a frequent sequence needs.",
)
@output_options("json", "text")
@handle_errors
def mip_cmd(trajectories, trajectory_format, minsup, minbenefit, output, output_format):
    """Cover the high-benefit frequent sequences."""
    db = _load_db(trajectories, trajectory_format)
    report = mip_report(db, minsup, minbenefit, Settings.from_env())
    summary = mip_text(report) + (plan_text(report.plan) if report.plan else "")
    artifact = report.to_json() if output_format == "json" else summary
    _emit(artifact, summary, output)
    if report.plan is None:
        raise EmptyPatternSetError(f"no frequent sequence reaches benefit {minbenefit}")


@cli.command("eval")
@click.option("--plan", "plan_path", type=EXISTING_FILE, required=True, help="Plan JSON file.")
@map_options
@trajectory_options
@sim_options
@output_options("csv", "json", "text")
@handle_errors
def eval_cmd(
    plan_path,
    map_path,
    map_format,
    trajectories,
    trajectory_format,
    communication_range,
    message_size,
    message_frequency,
    runs,
    output,
    output_format,
):
    """Replay trajectories against a placement plan."""
    plan = load_plan(plan_path)
    road_map = load_map(map_path, map_format)
    db = _load_db(trajectories, trajectory_format)
    cfg = _sim_config(communication_range, message_size, message_frequency, runs)
    report = simulate(road_map, plan, db, cfg)
    summary = coverage_text(report, cfg)
    if output_format == "csv":
        artifact = rows_to_csv([report.to_dict()], report.FIELDS)
    elif output_format == "json":
        artifact = coverage_json(report, cfg, plan)
    else:
        artifact = summary
    _emit(artifact, summary, output)


def _split_values(raw: str) -> List[str]:
    values = [v.strip() for v in raw.split(",") if v.strip()]
    if not values:
        raise click.BadParameter("give at least one comma-separated value", param_hint="--values")
    return values


def _points_artifact(points, cfg: SimConfig, output_format: str) -> str:
    if output_format == "csv":
        return rows_to_csv([p.to_row() for p in points], ROW_FIELDS)
    if output_format == "json":
        return sweep_json(points, cfg)
    return sweep_text(points)


@cli.command("sweep")
@map_options
@trajectory_options
@click.option(
    "--strategy",
    type=click.Choice(["spacov", "spacov+", "hespic", "mip"]),
    required=True,
    help="Placement strategy.",
)
@minsup_option
@max_len_option
@click.option("--minbenefit", type=click.FloatRange(min=0), default=None, help="For mip.")
@click.option("--k", "k", type=click.IntRange(min=1), default=None, help="For hespic.")
@score_options
@click.option("--axis", type=click.Choice(list(SWEEP_AXES)), required=True, help="Swept value.")
@click.option("--values", "raw_values", required=True, help="Comma-separated axis values.")
@sim_options
@output_options("csv", "json", "text")
@handle_errors
def sweep_cmd(
    map_path,
    map_format,
    trajectories,
    trajectory_format,
    strategy,
    minsup,
    max_len,
    minbenefit,
    k,
    poisson_m,
    alpha,
    beta,
    delta,
    axis,
    raw_values,
    communication_range,
    message_size,
    message_frequency,
    runs,
    output,
    output_format,
):
    """Evaluate one strategy across a range of values of one parameter."""
    values = _split_values(raw_values)
    if strategy == "hespic" and k is None:
        if axis != "k":
            raise click.UsageError("hespic needs --k unless sweeping k")
        try:
            k = click.IntRange(min=1).convert(values[0], None, None)
        except click.BadParameter as exc:
            raise click.BadParameter(exc.message, param_hint="--values") from exc
    spec = StrategySpec(
        strategy,
        minsup,
        max_len=max_len,
        minbenefit=minbenefit,
        k=k,
        score_weights=ScoreWeights(alpha, beta, delta),
        truncation_m=poisson_m,
    )
    road_map = load_map(map_path, map_format)
    db = _load_db(trajectories, trajectory_format)
    cfg = _sim_config(communication_range, message_size, message_frequency, runs)
    points = sweep(road_map, db, spec, axis, values, cfg)
    _emit(_points_artifact(points, cfg, output_format), sweep_text(points), output)


@cli.command("compare")
@map_options
@trajectory_options
@minsup_option
@max_len_option
@click.option(
    "--strategy",
    "strategies",
    type=click.Choice(["spacov", "spacov+", "hespic", "mip"]),
    multiple=True,
    help="Strategies to compare (repeatable) [default: every one whose parameters are given].",
)
@click.option("--minbenefit", type=click.FloatRange(min=0), default=None, help="For mip.")
@click.option("--k", "k", type=click.IntRange(min=1), default=None, help="For hespic.")
@click.option("--components", is_flag=True, help="Also rank by each hespic criterion alone.")
@click.option("--poisson-m", type=click.IntRange(min=1), default=None)
@sim_options
@output_options("csv", "json", "text")
@handle_errors
def compare_cmd(
    map_path,
    map_format,
    trajectories,
    trajectory_format,
    minsup,
    max_len,
    strategies,
    minbenefit,
    k,
    components,
    poisson_m,
    communication_range,
    message_size,
    message_frequency,
    runs,
    output,
    output_format,
):
    """Evaluate several strategies on the same map and trajectories."""
    if not strategies:
        strategies = ["spacov", "spacov+"]
        if k is not None:
            strategies.append("hespic")
        if minbenefit is not None:
            strategies.append("mip")
    specs = []
    for name in strategies:
        if name == "hespic" and components:
            specs.extend(hespic_components(minsup, k, poisson_m))
            continue
        specs.append(
            StrategySpec(
                name, minsup, max_len=max_len, minbenefit=minbenefit, k=k, truncation_m=poisson_m
            )
        )
    road_map = load_map(map_path, map_format)
    db = _load_db(trajectories, trajectory_format)
    cfg = _sim_config(communication_range, message_size, message_frequency, runs)
    points = compare(road_map, db, specs, cfg)
    _emit(_points_artifact(points, cfg, output_format), sweep_text(points), output)


@cli.command("generate")
@click.option("--rows", type=click.IntRange(min=1), default=5, show_default=True)
@click.option("--cols", type=click.IntRange(min=1), default=5, show_default=True)
@click.option(
    "--spacing", type=click.FloatRange(min=0, min_open=True), default=150.0, show_default=True
)
@click.option("--vehicles", type=click.IntRange(min=1), default=200, show_default=True)
@click.option("--min-len", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--max-len", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--map-out", type=OUTPUT_FILE, required=True, help="Map file to write.")
@click.option("--trajectories-out", type=OUTPUT_FILE, required=True, help="Trajectories to write.")
@click.option(
    "--format",
    "file_format",
    type=click.Choice(["text", "yaml"]),
    default="text",
    show_default=True,
)
@handle_errors
def generate_cmd(
    rows, cols, spacing, vehicles, min_len, max_len, seed, map_out, trajectories_out, file_format
):
    """Write a synthetic grid map and random-walk trajectories."""
    road_map = grid_map(rows, cols, spacing)
    db = random_trajectories(road_map, vehicles, min_len, max_len, seed)
    map_out.write_text(dump_map(road_map, file_format), encoding="utf-8")
    trajectories_out.write_text(dump_trajectories(db, file_format), encoding="utf-8")
    click.echo(f"✅ Wrote {len(road_map)} junctions to {map_out}")
    click.echo(f"✅ Wrote {len(db)} trajectories to {trajectories_out}")
