"""Command-line entry point: ``nullcsi [--config F] [--seed N] [--out D] COMMAND``."""

import logging
import sys
from dataclasses import replace

import click

from .config import ConfigError, ScenarioConfig, parse_config
from .experiments import FIGURES, cmd_certify_bounds, cmd_figure, cmd_version_and_env


def _parse_dims(values):
    dims = []
    for text in values:
        try:
            r, c = (int(p) for p in text.lower().split("x"))
        except ValueError:
            raise click.BadParameter(f"expected ROWSxCOLS, got {text!r}", param_hint="--dims") from None
        if r < 1 or c < 1:
            raise click.BadParameter(f"dimensions must be >= 1, got {text!r}", param_hint="--dims")
        dims.append((r, c))
    return dims


class _Group(click.Group):
    """Group that maps usage errors to status 1; status 2 means a failed claim."""

    def main(self, args=None, **extra):
        extra.pop("standalone_mode", None)
        try:
            status = super().main(args, standalone_mode=False, **extra)
        except click.ClickException as exc:
            exc.show()
            sys.exit(1)
        except click.Abort:
            click.echo("aborted", err=True)
            sys.exit(1)
        sys.exit(status or 0)


@click.group(cls=_Group)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="YAML scenario file.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Master seed; overrides the file.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="results", show_default=True)
@click.option("-v", "--verbose", is_flag=True, help="Log applied defaults and claim results.")
@click.pass_context
def main(ctx, config_path, seed, out_dir, verbose):
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    ctx.ensure_object(dict)
    ctx.obj.update(config_path=config_path, seed=seed, out_dir=out_dir)


def _load(ctx):
    path = ctx.obj["config_path"]
    try:
        cfg = parse_config(path) if path else ScenarioConfig()
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(1)
    if ctx.obj["seed"] is not None:
        cfg = replace(cfg, master_seed=ctx.obj["seed"])
    return cfg


@main.command()
@click.argument("figure_id", type=click.Choice(FIGURES))
@click.pass_context
def figure(ctx, figure_id):
    """Run a figure sweep and write <FIGURE_ID>.csv plus a claim summary."""
    cfg = _load(ctx)
    try:
        status = cmd_figure(figure_id, cfg, ctx.obj["out_dir"])
    except (ValueError, ArithmeticError) as exc:
        click.echo(f"error: {exc}", err=True)
        status = 1
    ctx.exit(status)


@main.command()
@click.option("--ensemble-size", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--dims", multiple=True, help="Matrix shape ROWSxCOLS; repeatable.")
@click.pass_context
def certify(ctx, ensemble_size, dims):
    """Certify the perturbation bounds on random ensembles."""
    cfg = _load(ctx)
    ctx.exit(cmd_certify_bounds(ensemble_size, _parse_dims(dims), cfg, ctx.obj["out_dir"]))


@main.command()
@click.pass_context
def info(ctx):
    """Print version, numeric backend and tolerances."""
    ctx.exit(cmd_version_and_env(click.echo))
