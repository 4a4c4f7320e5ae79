"""Artifact emission: delimited tables, JSON documents, rendered figures.

Every delimited file starts with a header block of ``#: key = value`` lines
recording the full effective configuration, so the file doubles as a config
file that reproduces the run. JSON documents carry the same map under a
``config`` key. All writers format numbers through repr, which keeps output
byte-identical across runs of the same configuration.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path

HEADER_PREFIX = "#: "


def format_value(value: object) -> str:
    """Deterministic, parse-exact text form of a config or cell value."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, complex):
        return repr(value).strip("()")
    return str(value)


def header_lines(config: Mapping[str, object]) -> list[str]:
    return [f"{HEADER_PREFIX}{key} = {format_value(v)}" for key, v in config.items()]


def write_csv(
    path: Path,
    config: Mapping[str, object],
    columns: Sequence[str],
    rows: Iterable[Sequence[object]],
) -> None:
    lines = header_lines(config)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(
    path: Path, config: Mapping[str, object], payload: Mapping[str, object]
) -> None:
    doc: dict[str, object] = {
        "config": {k: format_value(v) for k, v in config.items()}
    }
    doc.update(payload)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_header_config(path: Path) -> dict[str, str]:
    """Recover the key-value header block from an emitted artifact.

    Accepts both delimited files (``#:`` lines) and JSON documents (the
    ``config`` object), so any emitted artifact can seed a new run.
    """
    text = path.read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        cfg = doc.get("config", {})
        return {str(k): str(v) for k, v in cfg.items()}
    pairs: dict[str, str] = {}
    for line in text.splitlines():
        if not line.startswith(HEADER_PREFIX):
            continue
        body = line[len(HEADER_PREFIX) :]
        key, _, value = body.partition("=")
        pairs[key.strip()] = value.strip()
    return pairs


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def render_series(
    path: Path,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    xlabel: str,
    ylabel: str,
) -> None:
    """Line plot of one or more columns against a common abscissa."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, ys in series.items():
        ax.plot(x, ys, label=label, linewidth=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    if len(series) > 1:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_heatmap(
    path: Path,
    x: Sequence[float],
    y: Sequence[float],
    grid,
    xlabel: str,
    ylabel: str,
    label: str,
) -> None:
    """Diverging-colormap image of a 2D slice, symmetric about zero."""
    import numpy as np

    plt = _pyplot()
    data = np.asarray(grid, dtype=float)
    limit = float(np.max(np.abs(data))) or 1.0
    fig, ax = plt.subplots(figsize=(5.6, 4.6))
    mesh = ax.pcolormesh(
        x, y, data, cmap="RdBu_r", vmin=-limit, vmax=limit, shading="auto"
    )
    fig.colorbar(mesh, ax=ax, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_bars(
    path: Path,
    labels: Sequence[object],
    heights: Sequence[float],
    xlabel: str,
    ylabel: str,
) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.bar(range(len(heights)), heights, color="#33557f")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels([str(c) for c in labels], fontsize=7)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
