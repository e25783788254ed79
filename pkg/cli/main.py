"""
Command-line front end.

    python -m cli.main --config run.json scan
    python -m cli.main --config run.json --format json --out fig2a.json phase

Exit codes: 0 success, 1 numerical failure, 2 configuration failure.
"""

import functools
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Callable, List, Optional

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape

from cli.emitters import emit, emit_rows, format_value, render_csv, render_json
from cli.run_config import RunConfig, TaskKind, checked_range, load_run_config
from configs.config import config
from core.errors import ConfigError, ConvergenceError, DomainError, LateralVdwError
from services.analysis import (
    Scenario,
    energy_map_2d,
    lateral_force_ratio,
    phase_boundary,
    ratio_at,
    regime_report,
    scan_minima_1d,
    trap_report,
)
from services.sweeps import ordered_map
from utils.logger import setup_logger

logger = setup_logger(__name__)

EXIT_NUMERICAL = 1
EXIT_CONFIG = 2

app = typer.Typer(
    name="lateral-vdw",
    help=f"{config.APP_NAME}: lateral van der Waals energy above corrugated planes.",
    no_args_is_help=True,
    add_completion=False,
)
err_console = Console(stderr=True)


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"


@dataclass(frozen=True)
class GlobalOptions:
    config: Optional[Path]
    tol: Optional[float]
    out: Optional[Path]
    fmt: Optional[str]
    threads: Optional[int]


@dataclass(frozen=True)
class Run:
    """Everything a subcommand needs once the config is loaded."""

    config: RunConfig
    scenario: Scenario
    fmt: str
    out: Optional[Path]
    precision: int
    threads: Optional[int]

    @property
    def task(self):
        return self.config.task


@app.callback()
def main(
    ctx: typer.Context,
    config_path: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Run configuration document (JSON)."
    ),
    tol: Optional[float] = typer.Option(
        None, "--tol", help="Relative quadrature tolerance, overrides the config."
    ),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file, overrides the config."),
    fmt: Optional[OutputFormat] = typer.Option(None, "--format", help="Output format."),
    threads: Optional[int] = typer.Option(
        None, "--threads", min=1, help="Worker threads (default: LATERAL_VDW_THREADS)."
    ),
):
    """Lateral vdW analyzer."""
    ctx.obj = GlobalOptions(
        config=config_path,
        tol=tol,
        out=out,
        fmt=fmt.value if fmt is not None else None,
        threads=threads,
    )


def _fail(message: str, code: int) -> None:
    err_console.print(f"[bold red]Error:[/bold red] {escape(message)}")
    raise typer.Exit(code=code)


def guarded(fn: Callable) -> Callable:
    """Translate library errors into the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, DomainError, ValidationError) as e:
            logger.error(f"Configuration failure: {e}")
            _fail(str(e), EXIT_CONFIG)
        except ConvergenceError as e:
            logger.error(f"Convergence failure: {e}")
            _fail(f"Numerical failure: {e}", EXIT_NUMERICAL)
        except LateralVdwError as e:
            logger.error(f"Numerical failure: {e}")
            _fail(f"Numerical failure: {e}", EXIT_NUMERICAL)

    return wrapper


def prepare(ctx: typer.Context, kind: TaskKind, default_format: str = "csv") -> Run:
    """
    Load the config, check it matches the command and build the scenario.

    Raises:
        ConfigError: If the config is missing, malformed or meant for another command.
    """
    opts: GlobalOptions = ctx.obj
    if opts.config is None:
        raise ConfigError("--config is required")
    if opts.tol is not None and not opts.tol > 0.0:
        raise ConfigError(f"--tol must be positive, got {opts.tol}")
    run = load_run_config(opts.config)
    if run.task.kind is not None and run.task.kind != kind:
        raise ConfigError(f"task.kind is {run.task.kind!r} but the command is {kind!r}")
    return Run(
        config=run,
        scenario=run.build_scenario(opts.tol),
        fmt=opts.fmt or run.output.format or default_format,
        out=opts.out or run.output.path,
        precision=run.output.precision,
        threads=opts.threads,
    )


def _required(value: Any, name: str) -> Any:
    if value is None:
        raise ConfigError(f"task.{name} is required")
    return value


def _emit_document(run: Run, document: dict) -> None:
    """Single-record output: a JSON object, or a one-row CSV."""
    if run.fmt == "json":
        emit(render_json(document, run.precision), run.out)
    else:
        columns = list(document)
        emit(render_csv(columns, [[document[c] for c in columns]], run.precision), run.out)


@app.command("eval")
@guarded
def cmd_eval(ctx: typer.Context):
    """Energy ratio (or lateral force) at one point."""
    run = prepare(ctx, "eval")
    t = run.task
    if t.quantity == "force":
        value, error = lateral_force_ratio(run.scenario, t.x0_over_z0, t.y0_over_z0)
        columns = ["x0_over_z0", "y0_over_z0", "force", "error"]
        row = [t.x0_over_z0, t.y0_over_z0, value, error]
    else:
        value = ratio_at(run.scenario, t.x0_over_z0, t.y0_over_z0)
        columns = ["x0_over_z0", "y0_over_z0", "ratio"]
        row = [t.x0_over_z0, t.y0_over_z0, value]
    typer.echo(format_value(value, run.precision))
    if run.out is not None:
        emit_rows(columns, [row], run.fmt, run.precision, run.out)


@app.command("scan")
@guarded
def cmd_scan(ctx: typer.Context):
    """Ratio (or force) along x on n evenly spaced points."""
    run = prepare(ctx, "scan")
    t = run.task
    lo, hi = checked_range(t.x_range, "x_range")
    n = _required(t.n, "n")
    xs = [float(x) for x in np.linspace(lo, hi, n)] if n else []

    if t.quantity == "force":
        values = ordered_map(
            lambda x: lateral_force_ratio(run.scenario, x, t.y0_over_z0)[0], xs, run.threads
        )
    else:
        values = ordered_map(lambda x: ratio_at(run.scenario, x, t.y0_over_z0), xs, run.threads)
    emit_rows(
        ["x0_over_z0", t.quantity],
        [[x, v] for x, v in zip(xs, values)],
        run.fmt,
        run.precision,
        run.out,
    )


@app.command("map")
@guarded
def cmd_map(ctx: typer.Context):
    """Ratio on a 2D grid, row-major (y outer, x inner)."""
    run = prepare(ctx, "map")
    t = run.task
    x_range = checked_range(t.x_range, "x_range")
    y_range = checked_range(t.y_range, "y_range")
    nx, ny = _required(t.nx, "nx"), _required(t.ny, "ny")

    rows: List[List[float]] = []
    if nx and ny:
        grid = energy_map_2d(run.scenario, x_range, y_range, nx, ny, run.threads)
        for iy, y in enumerate(grid.y):
            for ix, x in enumerate(grid.x):
                rows.append([float(x), float(y), float(grid.ratio[iy, ix])])
        if grid.failures:
            err_console.print(
                f"[yellow]Warning:[/yellow] {len(grid.failures)} map points failed and are written as nan"
            )
    emit_rows(["x0_over_z0", "y0_over_z0", "ratio"], rows, run.fmt, run.precision, run.out)


@app.command("phase")
@guarded
def cmd_phase(ctx: typer.Context):
    """Critical width per gamma_s and the extrapolated threshold."""
    run = prepare(ctx, "phase")
    t = run.task
    family = t.family or run.config.scenario.profile
    if family not in ("gaussian", "strip"):
        raise ConfigError(f"task.family must be gaussian or strip, got {family!r}")
    gammas = _required(t.gamma_values, "gamma_values")

    boundary = phase_boundary(
        gammas, family, t.width_tol, run.scenario.quad, run.threads, run.scenario.orientation
    )
    columns = ["gamma_s", "critical_d_over_z0"]
    rows = [[g, d] for g, d in boundary.rows]
    if run.fmt == "json":
        document = {
            "family": family,
            "rows": [dict(zip(columns, row)) for row in rows],
            "threshold_gamma_s": boundary.threshold,
        }
        emit(render_json(document, run.precision), run.out)
    else:
        footer = [f"threshold_gamma_s,{format_value(boundary.threshold, run.precision)}"]
        emit(render_csv(columns, rows, run.precision, footer), run.out)


@app.command("trap")
@guarded
def cmd_trap(ctx: typer.Context):
    """Trap-frequency shift of a particle held above the origin."""
    run = prepare(ctx, "trap", default_format="json")
    setup = _required(run.task.setup, "setup")
    report = trap_report(run.scenario, setup)
    _emit_document(run, report.model_dump())


@app.command("regime")
@guarded
def cmd_regime(ctx: typer.Context):
    """Peak or valley regime of a grating."""
    run = prepare(ctx, "regime", default_format="json")
    report = regime_report(run.scenario)
    _emit_document(run, report.model_dump())


@app.command("minima")
@guarded
def cmd_minima(ctx: typer.Context):
    """Interior minima of the ratio along x."""
    run = prepare(ctx, "minima")
    t = run.task
    x_range = checked_range(t.x_range, "x_range")
    scan = scan_minima_1d(run.scenario, x_range, t.grid_n, t.y0_over_z0, run.threads)
    rows = [[m.location, m.value, m.kind, m.curvature, m.is_global] for m in scan.minima]
    emit_rows(
        ["x0_over_z0", "ratio", "kind", "curvature", "is_global"],
        rows,
        run.fmt,
        run.precision,
        run.out,
    )


if __name__ == "__main__":
    app()
