"""CSV emitters and the SVG packing renderer."""
from __future__ import annotations

import csv
import io
import sys
from pathlib import Path

import numpy as np

from .config import FordConfig
from .enumeration import enumerate_tangencies

TANGENCY_SCHEMA = ("alpha", "kappa")
THEORY_SCHEMA = ("s", "F")
DENSITY_SCHEMA = ("s", "density")
EMPIRICAL_SCHEMA = ("s", "F_empirical")
COMPARE_SCHEMA = ("s", "F_empirical", "F_theory")
COMPONENT_SCHEMA = ("s", "F_ij")


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def emit_csv(records, schema, out_path=None) -> str:
    """Write rows with the given header; ``out_path`` of ``None`` or ``-`` means stdout.

    ``records`` is an iterable of row tuples, or a mapping from column name to
    a column sequence.  Returns the text written.
    """
    schema = tuple(schema)
    if isinstance(records, dict):
        cols = [records[name] for name in schema]
        rows = zip(*cols)
    else:
        rows = records
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(schema)
    for row in rows:
        row = tuple(row)
        if len(row) != len(schema):
            raise ValueError(f"row has {len(row)} fields, schema has {len(schema)}")
        w.writerow([_fmt(x) for x in row])
    text = buf.getvalue()
    if out_path is None or str(out_path) == "-":
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8", newline="\n")
    return text


def read_csv(path) -> dict:
    """Columns of a CSV file as float arrays, keyed by header name."""
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = [[float(x) for x in row] for row in r if row]
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {name: arr[:, k] for k, name in enumerate(header)}


def render_svg(cfg: FordConfig, T: float, out_path=None, width: int = 1200) -> str:
    """SVG of every circle with curvature at most ``T`` over one period.

    The initial configuration is always drawn, together with the base line and
    the top line.
    """
    t = cfg.period_t
    scale = width / t
    margin = 10.0
    height = scale * 1.0 + 2 * margin

    def X(x):
        return margin + (x) * scale

    def Y(y):
        return margin + (1.0 - y) * scale

    circles = {}
    for i in range(2, cfg.h + 1):
        a, r = cfg.alpha(i), cfg.radius(i)
        for x in (a, t - a):  # the mirror image covers the second half period
            circles[round(x, 9)] = (x, r)
    if T > 0:
        tg = enumerate_tangencies(cfg, T, (0.0, t + 1e-12))
        for a, k in zip(tg.alpha, tg.kappa):
            circles.setdefault(round(float(a), 9), (float(a), 1.0 / float(k)))
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width + 2 * margin:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width + 2 * margin:.3f} {height:.3f}">',
        f"<title>{cfg.name} packing, curvature up to {T:g}</title>",
        '<g fill="none" stroke="black" stroke-width="0.6">',
        f'<line x1="{X(0):.4f}" y1="{Y(0):.4f}" x2="{X(t):.4f}" y2="{Y(0):.4f}"/>',
        f'<line x1="{X(0):.4f}" y1="{Y(1):.4f}" x2="{X(t):.4f}" y2="{Y(1):.4f}"/>',
    ]
    for _, (a, r) in sorted(circles.items()):
        rr = r * scale
        if rr < 0.05:
            continue
        parts.append(f'<circle cx="{X(a):.4f}" cy="{Y(r):.4f}" r="{rr:.4f}"/>')
    parts += ["</g>", "</svg>", ""]
    text = "\n".join(parts)
    if out_path is not None:
        Path(out_path).write_text(text, encoding="utf-8")
    return text


def circles_in_svg(text: str) -> list:
    """``(cx, cy, r)`` of every circle element (used for checks)."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(text.encode("utf-8"))
    out = []
    for el in root.iter("{http://www.w3.org/2000/svg}circle"):
        out.append((float(el.get("cx")), float(el.get("cy")), float(el.get("r"))))
    return out

