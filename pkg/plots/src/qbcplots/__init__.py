"""Chart rendering for qbc experiment CSV outputs."""

from qbcplots.render import (
    KIND_HISTOGRAM,
    KIND_LINE,
    PlotSpec,
    RenderResult,
    SchemaMismatchError,
    render,
)

__all__ = [
    "KIND_HISTOGRAM",
    "KIND_LINE",
    "PlotSpec",
    "RenderResult",
    "SchemaMismatchError",
    "render",
]

__version__ = "0.1.0"
