"""JSON / CSV / SVG report writers."""
from __future__ import annotations

import csv
import html
import json
from pathlib import Path

import numpy as np

RUNTIME_KEY = "runtime"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if np.isnan(x):
            return None
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def to_json_text(report):
    return json.dumps(_plain(report), indent=2, sort_keys=True) + "\n"


def deterministic_content(report):
    """Report without the run-time block (wall clock, thread count)."""
    return {k: v for k, v in _plain(report).items() if k != RUNTIME_KEY}


def _flatten(row):
    out = {}
    for key, value in row.items():
        if isinstance(value, dict):
            for sub, inner in _flatten(value).items():
                out[f"{key}.{sub}"] = inner
        elif isinstance(value, list):
            out[key] = json.dumps(value)
        else:
            out[key] = value
    return out


def write_csv(rows, path, columns=None):
    rows = [_flatten(_plain(r)) for r in rows]
    if columns is None:
        columns = []
        for r in rows:
            columns.extend(k for k in r if k not in columns)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


def write_svg(points, path, config, xlabel="dimension", ylabel="ratio"):
    """Static scatter plot of ``(x, y)`` pairs with the config in a comment."""
    W, H, pad = 480, 320, 48
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    comment = json.dumps(_plain(config), sort_keys=True).replace("--", "- -")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">',
        f"<!-- config: {comment} -->",
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{pad}" y1="{H - pad}" x2="{W - pad}" y2="{H - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{H - pad}" stroke="black"/>',
        f'<text x="{W / 2}" y="{H - 10}" text-anchor="middle">{html.escape(xlabel)}</text>',
        f'<text x="14" y="{H / 2}" transform="rotate(-90 14 {H / 2})" '
        f'text-anchor="middle">{html.escape(ylabel)}</text>',
    ]
    if len(xs):
        x0, x1 = xs.min(), xs.max()
        y0, y1 = ys.min(), ys.max()
        sx = (W - 2 * pad) / (x1 - x0) if x1 > x0 else 0.0
        sy = (H - 2 * pad) / (y1 - y0) if y1 > y0 else 0.0
        for x, y in zip(xs, ys):
            cx = pad + (x - x0) * sx if sx else W / 2
            cy = H - pad - (y - y0) * sy if sy else H / 2
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2" fill="steelblue" opacity="0.5"/>')
        parts.append(f'<text x="{pad}" y="{pad - 8}">{ylabel} in [{y0:.4g}, {y1:.4g}]</text>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


def emit_reports(report, formats, out_dir, stem=None, csv_columns=None, svg_points=None):
    """Write ``report`` in each requested format; returns the written paths."""
    out_dir = Path(out_dir)
    stem = stem or report["command"]
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if "json" in formats:
            path = out_dir / f"{stem}.json"
            path.write_text(to_json_text(report))
            written.append(path)
        if "csv" in formats:
            path = out_dir / f"{stem}.csv"
            write_csv(report["results"], path, csv_columns)
            written.append(path)
        if "svg" in formats and svg_points is not None:
            path = out_dir / f"{stem}.svg"
            write_svg(svg_points, path, report["config"])
            written.append(path)
    except OSError as exc:
        raise OSError(f"cannot write report under {out_dir}: {exc}") from exc
    return written
