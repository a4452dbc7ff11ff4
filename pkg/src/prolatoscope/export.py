"""Writers for profiles, ensembles, sweeps, manifests and quick SVG plots.

Numbers go out with 17 significant digits in exponent form, independent of
locale, so repeated runs produce identical bytes.
"""

from __future__ import annotations

import datetime as _dt
import json
from pathlib import Path

import numpy as np


def fmt(x):
    return format(float(x), ".16e")


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("ascii"))
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dump_json(data):
    return json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n"


def write_json(path, data):
    return _write(path, dump_json(data))


def profile_csv(profile):
    vals = np.asarray(profile.values, dtype=complex)
    lines = [
        "# meaning,c,L",
        f"# {profile.meaning},{fmt(profile.c)},{profile.L}",
    ]
    for key in sorted(profile.metadata):
        lines.append(f"# {key}={profile.metadata[key]}")
    lines.append("coordinate,value_re,value_im")
    lines.extend(f"{fmt(x)},{fmt(v.real)},{fmt(v.imag)}" for x, v in zip(profile.grid, vals))
    return "\n".join(lines) + "\n"


def write_profile_csv(path, profile):
    return _write(path, profile_csv(profile))


def read_profile_csv(path):
    """Returns ``(header_fields, grid, complex values)`` from a profile CSV."""
    lines = Path(path).read_text().splitlines()
    meaning, c, L = lines[1][2:].split(",")
    body = [ln for ln in lines if ln and not ln.startswith("#")][1:]
    data = np.array([[float(v) for v in ln.split(",")] for ln in body])
    return {"meaning": meaning, "c": float(c), "L": int(L)}, data[:, 0], data[:, 1] + 1j * data[:, 2]


def table_csv(columns, comments=()):
    """CSV with one column per (name, array) pair in ``columns``."""
    names = [name for name, _ in columns]
    arrays = [np.asarray(col) for _, col in columns]
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(names))
    for row in zip(*arrays):
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_table_csv(path, columns, comments=()):
    return _write(path, table_csv(columns, comments))


def read_table_csv(path):
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    names = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    out = {}
    for j, name in enumerate(names):
        col = [r[j] for r in rows]
        try:
            out[name] = np.array([float(v) for v in col])
        except ValueError:
            out[name] = np.array(col)
    return out


def ensemble_csv(ensemble):
    lines = ["trial,k,re,im"]
    for t in range(ensemble.trials):
        for k in range(ensemble.L):
            v = ensemble.coeffs[t, k]
            lines.append(f"{t},{k},{fmt(v.real)},{fmt(v.imag)}")
    return "\n".join(lines) + "\n"


def ensemble_summary(ensemble, quadrature="x"):
    stats = ensemble.summary(quadrature)
    return {
        "provenance": {
            "seed": ensemble.seed,
            "model": ensemble.model.kind,
            "r": ensemble.model.r,
            "L": ensemble.L,
            "photons": ensemble.photons,
            "c": ensemble.c,
            "trials": ensemble.trials,
        },
        "quadrature": quadrature,
        "modes": [
            {
                "k": k,
                "noise_free": float(ensemble.mean_coeffs[k]),
                "mean_re": stats["mean_re"][k],
                "mean_im": stats["mean_im"][k],
                "var_re": stats["var_re"][k],
                "var_im": stats["var_im"][k],
            }
            for k in range(ensemble.L)
        ],
    }


def sweep_csv(points):
    lines = ["N,model,r,L_star,W,W_L,S"]
    for p in points:
        lines.append(
            f"{fmt(p.photons)},{p.model.kind},{fmt(p.model.r)},{p.L_star},{fmt(p.W)},{fmt(p.W_L)},{fmt(p.S)}"
        )
    return "\n".join(lines) + "\n"


def sweep_json(points, provenance):
    return {
        "provenance": provenance,
        "points": [
            {"N": p.photons, "model": p.model.kind, "r": p.model.r, "L_star": p.L_star, "W": p.W, "W_L": p.W_L, "S": p.S}
            for p in points
        ],
    }


def write_manifest(out_dir, command, config):
    """Resolved config for a run; the timestamp sits on its own line."""
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    # sorted keys put "timestamp" on the last line, after the nested config
    return write_json(Path(out_dir) / "manifest.json", {"command": command, "config": config, "timestamp": stamp})


def svg_lines(series, width=640, height=400, title=""):
    """Polyline plot of ``series``, a list of ``(x, y, label)``; no axes ticks."""
    xs = np.concatenate([np.asarray(s[0], float) for s in series])
    ys = np.concatenate([np.asarray(s[1], float) for s in series])
    ok = np.isfinite(xs) & np.isfinite(ys)
    x0, x1 = xs[ok].min(), xs[ok].max()
    y0, y1 = ys[ok].min(), ys[ok].max()
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pad = 40
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{pad}" y="20" font-size="14">{title}</text>',
    ]
    for i, (x, y, label) in enumerate(series):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        px = pad + (x - x0) / (x1 - x0) * (width - 2 * pad)
        py = height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py) if np.isfinite(a) and np.isfinite(b))
        color = colors[i % len(colors)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        out.append(f'<text x="{width - 160}" y="{30 + 16 * i}" font-size="12" fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, series, title=""):
    return _write(path, svg_lines(series, title=title))
