"""Render qwsearch artifacts into figures.

Five figure kinds are supported, one per artifact schema:

- ``winding``: generating-function curve in the complex plane, annotated
  with the integer winding number from the summary JSON.
- ``detection``: first-detection probability bars F_n versus n.
- ``sweep``: mean attempt count versus sampling interval (log-log).
- ``noise``: windowed detection probability per realization, one column
  of points per noise magnitude (accepts several CSVs).
- ``heatmap``: node probability over time for non-monitored evolution;
  the time axis is shown in sampling-interval units when the companion
  JSON provides the interval.

Rendering is read-only and deterministic: identical inputs and style give
byte-identical images.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("winding", "detection", "sweep", "noise", "heatmap")

_CSV_HEADERS = {
    "winding": ["theta", "re", "im", "abs", "unwrapped_phase"],
    "detection": ["n", "F_n", "re_phi", "im_phi"],
    "sweep": ["tau", "mean_n", "p_det_at_nmax"],
    "noise": ["a", "realization", "p_det"],
    "heatmap": ["t", "node", "prob"],
}


class SchemaError(ValueError):
    """Input artifact missing, empty, or not matching the declared kind."""


@dataclass(frozen=True)
class FigureSpec:
    """A render request: figure kind, input artifacts, output image path."""

    kind: str
    inputs: tuple[str, ...]
    out_path: str
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise SchemaError("at least one input artifact is required")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))


def _read_csv(path: str, kind: str) -> dict[str, np.ndarray]:
    file = Path(path)
    if not file.exists():
        raise SchemaError(f"input {path} does not exist")
    with open(file, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} is empty") from None
        if header != _CSV_HEADERS[kind]:
            raise SchemaError(
                f"{path} header {header} does not match kind {kind!r} "
                f"(expected {_CSV_HEADERS[kind]})"
            )
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path} has a header but no data rows")
    columns = np.array(rows, dtype=float).T
    return dict(zip(header, columns))


def _read_json(paths: tuple[str, ...]) -> dict:
    for path in paths:
        if path.endswith(".json"):
            with open(path) as fh:
                return json.load(fh)
    return {}


def _csv_inputs(spec: FigureSpec) -> list[str]:
    found = [p for p in spec.inputs if not p.endswith(".json")]
    if not found:
        raise SchemaError("no CSV artifact among the inputs")
    return found


def render(spec: FigureSpec) -> dict:
    """Render the figure and return metadata about what was drawn.

    The returned dict echoes the output path and, for winding figures, the
    annotated integer so callers can cross-check it against the summary
    JSON without decoding the image.
    """
    builder = {
        "winding": _build_winding,
        "detection": _build_detection,
        "sweep": _build_sweep,
        "noise": _build_noise,
        "heatmap": _build_heatmap,
    }[spec.kind]
    fig, meta = builder(spec)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    dpi = float(spec.style.get("dpi", 110))
    try:
        fig.savefig(out, dpi=dpi, metadata={"Software": "qwplots"})
    finally:
        plt.close(fig)
    meta["out_path"] = str(out)
    return meta


def _new_figure(spec: FigureSpec, default_size=(6.0, 4.5)):
    size = spec.style.get("figsize", default_size)
    if isinstance(size, str):
        size = tuple(float(v) for v in size.split("x"))
    fig, ax = plt.subplots(figsize=size)
    return fig, ax


def _build_winding(spec: FigureSpec):
    data = _read_csv(_csv_inputs(spec)[0], "winding")
    summary = _read_json(spec.inputs)
    winding = summary.get("winding")
    fig, ax = _new_figure(spec, default_size=(5.0, 5.0))
    ax.plot(data["re"], data["im"], lw=1.2, color=spec.style.get("color", "tab:blue"))
    ax.plot(0, 0, "k+", ms=10)
    ax.set_aspect("equal")
    ax.set_xlabel(r"Re $\hat\Phi(\theta)$")
    ax.set_ylabel(r"Im $\hat\Phi(\theta)$")
    label = r"$\Omega$ = " + (str(winding) if winding is not None else "undefined")
    ax.annotate(label, xy=(0.05, 0.95), xycoords="axes fraction", va="top", fontsize=12)
    ax.set_title(spec.style.get("title", "Generating-function winding"))
    return fig, {"winding": winding}


def _build_detection(spec: FigureSpec):
    fig, ax = _new_figure(spec)
    peak = None
    for path in _csv_inputs(spec):
        data = _read_csv(path, "detection")
        ax.bar(data["n"], data["F_n"], width=0.9, alpha=0.8, label=Path(path).stem)
        peak = int(data["n"][np.argmax(data["F_n"])])
    ax.set_xlabel("attempt $n$")
    ax.set_ylabel("$F_n$")
    ax.set_ylim(0, 1.05)
    if len(_csv_inputs(spec)) > 1:
        ax.legend(frameon=False)
    ax.set_title(spec.style.get("title", "First-detection probability"))
    return fig, {"peak_attempt": peak}


def _build_sweep(spec: FigureSpec):
    data = _read_csv(_csv_inputs(spec)[0], "sweep")
    fig, ax = _new_figure(spec)
    ax.loglog(data["tau"], data["mean_n"], "o-", ms=4,
              color=spec.style.get("color", "tab:red"))
    ax.set_xlabel(r"sampling interval $\tau$")
    ax.set_ylabel(r"mean attempts $\langle n \rangle$")
    ax.set_title(spec.style.get("title", "Search cost on a random graph"))
    return fig, {"points": len(data["tau"])}


def _build_noise(spec: FigureSpec):
    fig, ax = _new_figure(spec)
    magnitudes = []
    for path in _csv_inputs(spec):
        data = _read_csv(path, "noise")
        a = float(data["a"][0])
        magnitudes.append(a)
        jitter = (data["realization"] % 17 - 8) / 17 * 0.15
        x = np.full_like(data["p_det"], len(magnitudes)) + jitter
        ax.plot(x, data["p_det"], ".", ms=3, alpha=0.5)
        ax.plot(len(magnitudes), data["p_det"].mean(), "k_", ms=18, mew=2)
    ax.set_xticks(np.arange(1, len(magnitudes) + 1))
    ax.set_xticklabels([f"{a:g}" for a in magnitudes])
    ax.set_xlabel("noise magnitude $a$")
    ax.set_ylabel("windowed $P_{det}$")
    ax.set_title(spec.style.get("title", "Noise robustness"))
    return fig, {"magnitudes": magnitudes}


def _build_heatmap(spec: FigureSpec):
    data = _read_csv(_csv_inputs(spec)[0], "heatmap")
    summary = _read_json(spec.inputs)
    times = np.unique(data["t"])
    nodes = np.unique(data["node"]).astype(int)
    grid = data["prob"].reshape(len(times), len(nodes))
    tau = summary.get("tau")
    t_axis = times / tau if tau else times
    fig, ax = _new_figure(spec)
    mesh = ax.pcolormesh(
        t_axis, nodes, grid.T, cmap=spec.style.get("cmap", "viridis"),
        shading="nearest", vmin=0.0, vmax=1.0,
    )
    fig.colorbar(mesh, ax=ax, label=r"$|\langle x|\psi(t)\rangle|^2$")
    ax.set_xlabel(r"time ($\tau$ units)" if tau else "time")
    ax.set_ylabel("node $x$")
    ax.set_title(spec.style.get("title", "Non-monitored evolution"))
    return fig, {"times": len(times), "nodes": len(nodes)}
