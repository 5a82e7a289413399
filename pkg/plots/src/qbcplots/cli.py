"""Command-line front end: ``qbc-plots render <csv> --kind hist|line --out <path>``."""

from __future__ import annotations

import click

from qbcplots.render import KIND_HISTOGRAM, KIND_LINE, PlotSpec, SchemaMismatchError, render


@click.group()
def main() -> None:
    """Charts for qbc experiment CSV outputs."""


@main.command("render")
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice([KIND_HISTOGRAM, KIND_LINE]), required=True)
@click.option("--out", "output_path", type=click.Path(dir_okay=False), required=True)
@click.option("--xlabel", default=None)
@click.option("--ylabel", default=None)
@click.option("--title", default=None)
@click.option("--dpi", type=int, default=120, show_default=True)
def render_command(csv_path, kind, output_path, xlabel, ylabel, title, dpi) -> None:
    """Render one CSV file into a chart image."""
    spec = PlotSpec(
        input_csv=csv_path,
        kind=kind,
        output_path=output_path,
        xlabel=xlabel,
        ylabel=ylabel,
        title=title,
        dpi=dpi,
    )
    try:
        result = render(spec)
    except SchemaMismatchError as exc:
        raise click.ClickException(str(exc)) from exc
    if result.kind == KIND_HISTOGRAM:
        click.echo(f"wrote {output_path} ({len(result.bars)} bars)")
    else:
        click.echo(f"wrote {output_path} ({len(result.series)} series)")


if __name__ == "__main__":
    main()
