"""Report writers: JSON, delimited data, plot data and rendered figures.

Output rules shared by every experiment:

- CSV uses '.' as the decimal separator and 17 significant digits, enough to
  round-trip doubles exactly.
- JSON reports carry a schema-version field, echo the resolved config, and
  contain no timestamps, so identical configs produce byte-identical files.
- Plot data files are plain two-column text with a single header row,
  consumable by any external plotter.
- Figures are rendered to PNG next to the data with the Agg backend; the PNG
  metadata is stripped of the writer software string to keep bytes stable.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SCHEMA_VERSION = "1"


def fmt17(x) -> str:
    """Format a real number with 17 significant digits."""
    return format(float(x), ".17g")


def jsonable(obj):
    """Recursively convert report content to JSON-native values.

    Complex numbers become {"re": ..., "im": ...}; numpy scalars and arrays
    become Python floats and lists.
    """
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(np.real(obj)), "im": float(np.imag(obj))}
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def write_json_report(path: Path, report: dict) -> None:
    payload = jsonable(report)
    text = json.dumps(payload, sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, str):
                cells.append(v)
            elif isinstance(v, (int, np.integer)):
                cells.append(str(int(v)))
            else:
                cells.append(fmt17(v))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_plot_data(path: Path, header, rows) -> None:
    """Two-column whitespace-delimited data with a comment header row."""
    lines = ["# " + " ".join(header)]
    for row in rows:
        lines.append(" ".join(fmt17(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_figure(path: Path, spec: dict) -> None:
    """Render one figure from a declarative series spec.

    spec fields: title, xlabel, ylabel, xscale/yscale ("linear" or "log"),
    and series = [{label, x, y, style}].
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for series in spec.get("series", []):
        xs = np.asarray(series["x"], dtype=float)
        ys = np.asarray(series["y"], dtype=float)
        style = series.get("style", "o-")
        ax.plot(xs, ys, style, label=series.get("label"), markersize=4,
                linewidth=1.2)
    ax.set_xscale(spec.get("xscale", "linear"))
    ax.set_yscale(spec.get("yscale", "linear"))
    ax.set_title(spec.get("title", ""))
    ax.set_xlabel(spec.get("xlabel", ""))
    ax.set_ylabel(spec.get("ylabel", ""))
    if any(s.get("label") for s in spec.get("series", [])):
        ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)


def write_experiment_outputs(outdir: Path, result) -> dict:
    """Write report.json, CSV tables, plot data and figures for one run.

    Returns a map of logical name to written path.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = {}
    report_path = outdir / "report.json"
    write_json_report(report_path, result.report)
    written["report"] = report_path
    for name, (header, rows) in result.tables.items():
        p = outdir / name
        write_csv(p, header, rows)
        written[name] = p
    for name, (header, rows) in result.plot_data.items():
        p = outdir / name
        write_plot_data(p, header, rows)
        written[name] = p
    for spec in result.figures:
        p = outdir / spec["filename"]
        render_figure(p, spec)
        written[spec["filename"]] = p
    return written
