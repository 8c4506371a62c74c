"""The three figure kinds rendered from result directories.

``cdf``
    Per-UE rate or SE distributions, one step curve per scenario, with a
    marker on each curve at its 5th percentile as reported in ``summary.json``
    and an optional labeled threshold line.

``bar``
    Average cell SE and area traffic capacity side by side, one bar per
    scenario, with the requirement levels from the summaries drawn as
    horizontal lines.

``overlay``
    Like ``cdf`` but inputs are consumed in pairs that share a color, the
    second of each pair dashed — made for before/after comparisons of the
    same scenario under a model toggle.

All figures are rendered batch-style (Agg backend) with fixed geometry and
scrubbed metadata so rerunning the same command reproduces the output file
byte for byte (PNG and SVG).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotkit"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .io import PlotkitError, ResultBundle, load_results  # noqa: E402

KINDS = ("cdf", "bar", "overlay")

# metric -> (sample attribute, summary key, axis label)
METRICS = {
    "rate": ("user_rate_mbps", "user_rate_5th_mbps", "per-UE rate (Mbit/s)"),
    "se": ("user_se", "user_se_5th_bps_hz", "per-UE SE (b/s/Hz)"),
}

_FIGSIZE = (6.4, 4.2)
_DPI = 120


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: kind, inputs, metric, optional threshold, output path."""

    kind: str
    inputs: tuple[Path, ...]
    out: Path
    metric: str = "rate"
    threshold: float | None = None
    threshold_label: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotkitError(f"unknown figure kind {self.kind!r}")
        if self.metric not in METRICS:
            raise PlotkitError(f"unknown metric {self.metric!r}")
        if not self.inputs:
            raise PlotkitError("no input directories given")
        if self.kind == "overlay" and len(self.inputs) % 2 != 0:
            raise PlotkitError("overlay needs an even number of inputs")


def _threshold_line(ax, spec: FigureSpec) -> None:
    if spec.threshold is None:
        return
    label = spec.threshold_label or f"threshold {spec.threshold:g}"
    ax.axvline(spec.threshold, color="black", linestyle=":", linewidth=1.2,
               label=label)


def _draw_cdf(ax, spec: FigureSpec, bundles: list[ResultBundle],
              paired: bool) -> dict[str, tuple[float, float]]:
    attr, p5_key, xlabel = METRICS[spec.metric]
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    markers: dict[str, tuple[float, float]] = {}
    for i, bundle in enumerate(bundles):
        color = cycle[(i // 2 if paired else i) % len(cycle)]
        style = "--" if paired and i % 2 else "-"
        values = getattr(bundle, attr)
        ax.step(values, bundle.cdf, where="post", color=color,
                linestyle=style, label=bundle.name)
        p5 = float(bundle.summary[p5_key])
        markers[bundle.name] = (p5, 0.05)
        ax.plot([p5], [0.05], marker="v", color=color, markersize=6,
                linestyle="none")
    _threshold_line(ax, spec)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("CDF")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right", fontsize=8)
    return markers


def _draw_bars(fig, bundles: list[ResultBundle]) -> None:
    ax_se, ax_area = fig.subplots(1, 2)
    names = [b.name for b in bundles]
    x = range(len(bundles))
    panels = (
        (ax_se, "avg_cell_se_bps_hz", "avg_cell_se", "avg cell SE (b/s/Hz)"),
        (ax_area, "area_capacity_kbps_km2", "area_capacity_kbps_km2",
         "area capacity (kb/s/km$^2$)"),
    )
    for ax, value_key, req_key, ylabel in panels:
        values = [float(b.summary[value_key]) for b in bundles]
        ax.bar(x, values, color="tab:blue")
        requirements = {float(b.summary["requirements"][req_key])
                        for b in bundles}
        for req in sorted(requirements):
            ax.axhline(req, color="black", linestyle=":", linewidth=1.2,
                       label=f"requirement {req:g}")
        ax.set_xticks(list(x), names, rotation=30, ha="right", fontsize=8)
        ax.set_ylabel(ylabel)
        ax.grid(True, axis="y", alpha=0.3)
        ax.legend(loc="upper right", fontsize=8)


def build_figure(spec: FigureSpec):
    """Load inputs and draw; returns (figure, 5th-percentile markers)."""
    bundles = [load_results(d) for d in spec.inputs]
    fig = plt.figure(figsize=_FIGSIZE, dpi=_DPI)
    markers: dict[str, tuple[float, float]] = {}
    if spec.kind == "bar":
        _draw_bars(fig, bundles)
    else:
        ax = fig.subplots()
        markers = _draw_cdf(ax, spec, bundles, paired=spec.kind == "overlay")
    fig.tight_layout()
    return fig, markers


def render(spec: FigureSpec) -> Path:
    """Render the figure to ``spec.out``; nothing is written on error."""
    fig, _ = build_figure(spec)
    try:
        suffix = spec.out.suffix.lower()
        if suffix == ".png":
            fig.savefig(spec.out, metadata={"Software": None})
        elif suffix == ".svg":
            fig.savefig(spec.out, metadata={"Date": None})
        else:
            fig.savefig(spec.out)
    finally:
        plt.close(fig)
    return spec.out
