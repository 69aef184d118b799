"""Serialization of grid reports and tetrahedron documents.

JSON output has a fixed key order and writes every float with 17
significant digits, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from . import dirac as dr

SCHEMA_VERSION = 1


def fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        return None
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = fmt_float(obj)
        return "null" if s is None else s
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """Deterministic JSON text for nested dicts/lists of scalars."""
    return _encode(obj, indent, 0) + "\n"


def tetra_dict(m, r, s, k):
    return {"r": r, "s": s, "k": k, "m": m, "hat_order": s + 2 * k}


def grid_report_dict(report, dim):
    pts = report.points
    lag = [p.lagrangian_residual for p in pts if p.lagrangian_residual is not None]
    inv = [p.involutivity_residual for p in pts if p.involutivity_residual is not None]
    hat = [p.hat_gap for p in pts if p.hat_gap is not None]
    lookup = {p.index: p for p in pts}
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "grid_report",
        "field": report.name,
        "grid": {
            "box": [list(map(float, row)) for row in report.box],
            "resolution": list(report.resolution),
            "h": report.h,
            "tol": report.tol,
            "size": report.size,
        },
        "summary": {
            "classified": sum(1 for p in pts if p.classified),
            "marginal": len(report.marginal),
            "failed": len(report.failed),
            "max_lagrangian_residual": max(lag, default=None),
            "max_involutivity_residual": max(inv, default=None),
            "max_hat_gap": max(hat, default=None),
        },
        "strata": [
            {
                "r": t[0],
                "s": t[1],
                "k": t[2],
                "count": st.count,
                "lower": list(st.lower),
                "upper": list(st.upper),
                "tetra": tetra_dict(dim, *t),
            }
            for t, st in report.strata.items()
        ],
        "rank_delta_jumps": [list(lookup[i].point) for i in report.jump_set],
        "semicontinuity": {
            "violations": {k: [list(i) for i in v] for k, v in report.usc_violations.items()},
            "isolated_nongeneric": {k: [list(i) for i in v] for k, v in report.isolated_nongeneric.items()},
        },
        "points": [_point_dict(p) for p in pts],
    }


def _point_dict(p):
    r, s, k = p.triple if p.triple is not None else (None, None, None)
    return {
        "index": list(p.index),
        "point": list(p.point),
        "r": r,
        "s": s,
        "k": k,
        "rank_delta": p.rank_delta,
        "lagrangian_residual": p.lagrangian_residual,
        "involutivity_residual": p.involutivity_residual,
        "hat_gap": p.hat_gap,
        "marginal": p.marginal,
        "error": p.error,
    }


def grid_report_csv(report, coords):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(coords) + ["r", "s", "k", "rank_delta", "lagr_res", "inv_res", "marginal"])

    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return fmt_float(v) or ""
        return str(v)

    for p in report.points:
        r, s, k = p.triple if p.triple is not None else (None, None, None)
        row = [fmt_float(x) for x in p.point]
        row += [cell(r), cell(s), cell(k), cell(p.rank_delta)]
        row += [cell(p.lagrangian_residual), cell(p.involutivity_residual), "1" if p.marginal else "0"]
        w.writerow(row)
    return buf.getvalue()


# -- tetrahedron -------------------------------------------------------------


def plane_points(m, c):
    """Admissible (r, s, k) on the hat-order plane s + 2k = c."""
    return [t for t in dr.admissible_cells(m) if t[1] + 2 * t[2] == c]


def tetra_document(m, queried):
    """JSON-ready description of the admissible lattice with queried points."""
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "tetrahedron",
        "dim": m,
        "axes": {"type": "k", "order": "s", "ri": "r"},
        "admissible": [list(t) for t in dr.admissible_cells(m)],
        "queried": [
            dict(tetra_dict(m, *t), plane=[list(p) for p in plane_points(m, t[1] + 2 * t[2])])
            for t in queried
        ],
    }


_AZ, _EL = math.radians(40.0), math.radians(22.0)


def _project(k, s, r):
    # orthographic view: type to the right, order into the page, ri up
    x = k * math.cos(_AZ) - s * math.sin(_AZ)
    depth = k * math.sin(_AZ) + s * math.cos(_AZ)
    y = r * math.cos(_EL) - depth * math.sin(_EL)
    return x, y


def tetra_svg(m, queried, size=480):
    """Static SVG of the admissible (r, s, k) lattice for dimension m."""
    cells = dr.admissible_cells(m)
    corners = [(0, 0, 0), (max(m / 2, 1), 0, 0), (0, max(m, 1), 0), (0, 0, max(m, 1))]
    pts2 = [_project(k, s, r) for r, s, k in cells] + [_project(*c) for c in corners]
    xs, ys = [p[0] for p in pts2], [p[1] for p in pts2]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    margin = 60.0
    scale = (size - 2 * margin) / span

    def to_px(k, s, r):
        x, y = _project(k, s, r)
        return margin + (x - min(xs)) * scale, size - margin - (y - min(ys)) * scale

    def fmt(v):
        return "%.2f" % v

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<title>Admissible (r, s, k) for dim M = {m}</title>',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    axes = (((max(m / 2, 1), 0, 0), "type"), ((0, max(m, 1), 0), "order"), ((0, 0, max(m, 1)), "ri"))
    ox, oy = to_px(0, 0, 0)
    for end, label in axes:
        x, y = to_px(*end)
        out.append(f'<line x1="{fmt(ox)}" y1="{fmt(oy)}" x2="{fmt(x)}" y2="{fmt(y)}" stroke="#444" stroke-width="1.5"/>')
        out.append(f'<text x="{fmt(x + 6)}" y="{fmt(y - 6)}" font-family="sans-serif" font-size="14">{label}</text>')
    # slices of constant real index
    for r in range(m % 2, m + 1, 2):
        kmax = (m - r) // 2
        rect = [(0, 0, r), (kmax, 0, r), (kmax, r, r), (0, r, r), (0, 0, r)]
        path = " ".join(f"{fmt(a)},{fmt(b)}" for a, b in (to_px(*c) for c in rect))
        out.append(f'<polyline points="{path}" fill="none" stroke="#bbb" stroke-width="1"/>')
    for c in sorted({t[1] + 2 * t[2] for t in queried}):
        for r in range(m % 2, m + 1, 2):
            seg = [(k, c - 2 * k, r) for k in range((m - r) // 2 + 1) if 0 <= c - 2 * k <= r]
            if len(seg) >= 2:
                path = " ".join(f"{fmt(a)},{fmt(b)}" for a, b in (to_px(*p) for p in seg))
                out.append(f'<polyline points="{path}" fill="none" stroke="#2a7" stroke-width="2" stroke-dasharray="5,3"/>')
        for r, s, k in plane_points(m, c):
            x, y = to_px(k, s, r)
            out.append(f'<circle cx="{fmt(x)}" cy="{fmt(y)}" r="6" fill="none" stroke="#2a7" stroke-width="1.5"/>')
    for r, s, k in cells:
        x, y = to_px(k, s, r)
        out.append(f'<circle cx="{fmt(x)}" cy="{fmt(y)}" r="3" fill="#333"/>')
    for r, s, k in queried:
        x, y = to_px(k, s, r)
        out.append(f'<circle cx="{fmt(x)}" cy="{fmt(y)}" r="7" fill="#d33" fill-opacity="0.8"/>')
        out.append(
            f'<text x="{fmt(x + 9)}" y="{fmt(y + 4)}" font-family="sans-serif" font-size="12">({r},{s},{k}) s+2k={s + 2 * k}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
