"""Writers for series CSV, snapshot JSON, certificate JSON, sweep CSV and SVG plots.

Floats are written with ``repr`` (shortest round-trip form), so parsing the
files back gives bit-identical doubles.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .dynamics import State
from .report import SERIES_COLUMNS, RunReport

SWEEP_COLUMNS = ("alpha_diff", "amplitude", "classification", "max_grad", "t_terminal", "review")


class OutputError(OSError):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(float(v))
    return str(v)


def _write_text(path, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def series_csv_text(report: RunReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SERIES_COLUMNS)
    for row in report.rows:
        w.writerow([_fmt(row.get(c)) for c in SERIES_COLUMNS])
    return buf.getvalue()


def write_series(report: RunReport, path):
    _write_text(path, series_csv_text(report))


def _parse_cell(col: str, text: str):
    if col == "poincare_ok":
        return {"true": True, "false": False, "": None}[text]
    return float(text) if text != "" else None


def read_series(path) -> list:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SERIES_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        return [{c: _parse_cell(c, v) for c, v in zip(header, line)} for line in reader]


def snapshot_record(state: State) -> dict:
    g = state.field.grid
    return {"t": float(state.time), "grid": {"n": g.n, "L": g.half_length},
            "values": [float(v) for v in state.field.values]}


def write_snapshot(state: State, path):
    _write_text(path, json.dumps(snapshot_record(state)) + "\n")


def read_snapshot(path) -> State:
    from .spectral import Field, make_grid
    with open(path, encoding="utf-8") as fh:
        rec = json.load(fh)
    grid = make_grid(int(rec["grid"]["n"]), float(rec["grid"]["L"]))
    return State(Field(grid, rec["values"]), float(rec["t"]))


def write_certificate(record: dict, path):
    _write_text(path, json.dumps(record, indent=1) + "\n")


def sweep_csv_text(cells) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for c in cells:
        w.writerow([_fmt(c.alpha_diff), _fmt(c.amplitude), c.classification.value,
                    _fmt(c.max_grad), _fmt(c.t_terminal), "true" if c.review else "false"])
    return buf.getvalue()


def write_sweep(cells, path):
    _write_text(path, sweep_csv_text(cells))


def plot_svg_text(report: RunReport, columns=("l2_dev", "sup_dev", "grad_sup"),
                  width: int = 640, height: int = 400) -> str:
    """Polylines of ``log10`` of the chosen columns against ``t``."""
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    pad = 50
    traces = {}
    for col in columns:
        pts = [(r["t"], math.log10(r[col])) for r in report.rows
               if r.get(col) is not None and math.isfinite(r[col]) and r[col] > 0]
        if pts:
            traces[col] = pts
    allpts = [p for pts in traces.values() for p in pts]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    if allpts:
        t0 = min(p[0] for p in allpts)
        t1 = max(p[0] for p in allpts)
        y0 = min(p[1] for p in allpts)
        y1 = max(p[1] for p in allpts)
        t1 = t1 if t1 > t0 else t0 + 1.0
        y1 = y1 if y1 > y0 else y0 + 1.0
        sx = lambda t: pad + (t - t0) / (t1 - t0) * (width - 2 * pad)
        sy = lambda y: height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)
        out.append(f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" '
                   f'height="{height - 2 * pad}" fill="none" stroke="black"/>')
        out.append(f'<text x="{pad}" y="{height - pad / 3:.1f}" font-size="12">t = {t0:.3g}</text>')
        out.append(f'<text x="{width - pad}" y="{height - pad / 3:.1f}" font-size="12" '
                   f'text-anchor="end">t = {t1:.3g}</text>')
        out.append(f'<text x="5" y="{pad:.1f}" font-size="12">1e{y1:.2f}</text>')
        out.append(f'<text x="5" y="{height - pad:.1f}" font-size="12">1e{y0:.2f}</text>')
        for i, (col, pts) in enumerate(traces.items()):
            color = colors[i % len(colors)]
            coords = " ".join(f"{sx(t):.2f},{sy(y):.2f}" for t, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
            out.append(f'<text x="{width - pad - 5}" y="{pad + 15 * (i + 1)}" font-size="12" '
                       f'text-anchor="end" fill="{color}">log10 {col}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_plot(report: RunReport, path):
    _write_text(path, plot_svg_text(report))


def ensure_parent(path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
