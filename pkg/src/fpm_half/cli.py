"""Command-line interface for fpm-half."""

from __future__ import annotations

import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any, TypeVar

import click

from . import __version__
from .config import PipelineConfig
from .core.geometry import PlanMode
from .exceptions import ConfigError, FpmError
from .log import configure_logging
from .pipelines import (
    run_compare_symmetric,
    run_full_vs_half,
    run_metrics,
    run_reconstruct,
    run_simulate,
)

T = TypeVar("T")

PLAN_CHOICES = click.Choice([m.value for m in PlanMode])


def _guarded(func: Callable[..., T], *args: Any, **kwargs: Any) -> T:
    """Run a pipeline, turning package errors into a red message and an exit status."""
    try:
        return func(*args, **kwargs)
    except FpmError as e:
        click.secho(f"Error: {e}", fg="red", err=True)
        sys.exit(e.exit_code)


def _load_config(
    config_path: Path | None,
    out: Path | None = None,
    seed: int | None = None,
    plan: str | None = None,
    iterations: int | None = None,
) -> PipelineConfig:
    config = PipelineConfig.from_yaml(config_path) if config_path else PipelineConfig()
    return config.with_overrides(seed=seed, plan=plan, iterations=iterations, output_dir=out)


def _parse_roi(value: str | None) -> tuple[int, int, int] | None:
    if value is None:
        return None
    try:
        top, left, size = (int(part) for part in value.split(","))
    except ValueError as e:
        raise ConfigError(f"--roi must be TOP,LEFT,SIZE integers, got {value!r}") from e
    return top, left, size


config_option = click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="JSON or YAML pipeline config (defaults are used when omitted)",
)
out_option = click.option(
    "--out", "-o", type=click.Path(file_okay=False, path_type=Path), help="Output directory"
)
seed_option = click.option("--seed", type=int, help="Override the config seed")


@click.group()
@click.version_option(version=__version__)
@click.option("--verbose", "-v", is_flag=True, help="Log progress to stderr and show progress bars")
@click.option(
    "--log-file", type=click.Path(dir_okay=False, path_type=Path), help="Append a debug log here"
)
@click.pass_context
def cli(ctx: click.Context, verbose: bool, log_file: Path | None) -> None:
    """fpm-half - Fourier ptychographic simulation and half-stack reconstruction."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    configure_logging(verbose=verbose, log_file=log_file)


@cli.command()
@config_option
@out_option
@seed_option
@click.option("--plan", type=PLAN_CHOICES, help="Override the illumination plan mode")
@click.pass_context
def simulate(
    ctx: click.Context,
    config_path: Path | None,
    out: Path | None,
    seed: int | None,
    plan: str | None,
) -> None:
    """Simulate a capture stack and write frames plus manifest."""
    config = _guarded(_load_config, config_path, out=out, seed=seed, plan=plan)
    summary = _guarded(run_simulate, config, progress=ctx.obj["verbose"])

    click.secho(f"Simulated {summary.frame_count} frames ({summary.mode})", fg="green")
    click.echo(f"  Stack: {summary.stack_dir}")
    click.echo(f"  Synthesized NA: {summary.synthesized_na:.4f}")
    click.echo(f"  Acquisition estimate: {summary.acquisition_time_s:.1f} s")


@cli.command()
@config_option
@click.option(
    "--stack",
    "-s",
    "stack_dir",
    required=True,
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Stack directory written by 'simulate'",
)
@out_option
@click.option("--iterations", "-n", type=int, help="Override the sweep budget")
@click.option("--roi", help="Reconstruct only the square TOP,LEFT,SIZE region (camera pixels)")
@click.pass_context
def reconstruct(
    ctx: click.Context,
    config_path: Path | None,
    stack_dir: Path,
    out: Path | None,
    iterations: int | None,
    roi: str | None,
) -> None:
    """Reconstruct amplitude and phase from a capture stack."""
    config = _guarded(_load_config, config_path, out=out, iterations=iterations)
    region = _guarded(_parse_roi, roi)
    summary = _guarded(
        run_reconstruct, config, stack_dir, roi=region, progress=ctx.obj["verbose"]
    )

    click.secho(
        f"Reconstructed from {summary.frame_count} frames in {summary.iterations} sweeps",
        fg="green",
    )
    click.echo(f"  Final residual: {summary.final_residual:.6e}")
    click.echo(f"  Results: {summary.result_dir}")


@cli.command("compare-symmetric")
@config_option
@out_option
@seed_option
@click.pass_context
def compare_symmetric(
    ctx: click.Context, config_path: Path | None, out: Path | None, seed: int | None
) -> None:
    """Compare frames under point-symmetric illumination for each object kind."""
    config = _guarded(_load_config, config_path, out=out, seed=seed)
    rows = _guarded(run_compare_symmetric, config, progress=ctx.obj["verbose"])

    click.echo(f"{'kind':<16} {'pair':>10} {'angle (deg)':>16} {'RMSE':>10}")
    for row in rows:
        pair = f"({row.led[0]},{row.led[1]})"
        angle = f"{row.angle_deg[0]:.2f},{row.angle_deg[1]:.2f}"
        click.echo(f"{row.kind:<16} {pair:>10} {angle:>16} {row.rmse_gray:>10.4f}")
    click.echo(f"Report: {config.output_dir / 'symmetric_pairs.csv'}")


@cli.command("full-vs-half")
@config_option
@out_option
@seed_option
@click.option("--plan", type=PLAN_CHOICES, help="Half plan mode (full selects half-rows)")
@click.option("--iterations", "-n", type=int, help="Override the sweep budget")
@click.pass_context
def full_vs_half(
    ctx: click.Context,
    config_path: Path | None,
    out: Path | None,
    seed: int | None,
    plan: str | None,
    iterations: int | None,
) -> None:
    """Reconstruct from the full stack and from half of it, then compare."""
    config = _guarded(
        _load_config, config_path, out=out, seed=seed, plan=plan, iterations=iterations
    )
    summary = _guarded(run_full_vs_half, config, progress=ctx.obj["verbose"])

    click.secho(
        f"{summary.kind}: {summary.frames_full} vs {summary.frames_half} frames", fg="green"
    )
    for channel in summary.channels:
        marker = " *" if channel.channel == summary.compared_channel else ""
        click.echo(
            f"  {channel.channel:<10} RMSE {channel.rmse_gray:8.4f}  NCC {channel.ncc:.4f}{marker}"
        )
    for group in summary.contrast:
        click.echo(
            f"  {group.label:<16} contrast full {group.contrast_full:.4f}  "
            f"half {group.contrast_half:.4f}"
        )
    click.echo(f"Report: {config.output_dir}")


@cli.command()
@click.argument("image_a", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("image_b", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@out_option
@click.option("--row", type=int, help="Profile row (center row by default)")
def metrics(image_a: Path, image_b: Path, out: Path | None, row: int | None) -> None:
    """Compare two grayscale images (PGM or PNG)."""
    results = _guarded(run_metrics, image_a, image_b, out=out, row=row)
    for name, value in results.items():
        click.echo(f"{name}: {value:.6f}")


def main() -> None:
    """Entry point."""
    cli()


if __name__ == "__main__":
    main()
