"""CSV tables, JSON manifests and log-log SVG plots for experiment runs."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .experiments import ExperimentRun, records_as_dicts

CSV_COLUMNS = ("experiment", "n", "t", "L", "alpha", "eps", "re", "im", "abs", "ref_abs", "rel_err", "wall_ms")


def _fmt(v):
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return repr(v)
    return str(v)


def write_csv(run: ExperimentRun, path: Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records_as_dicts(run):
            w.writerow([_fmt(rec[c]) for c in CSV_COLUMNS])


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_manifest(run: ExperimentRun, path: Path, files: list):
    doc = dict(
        config=run.config,
        summary=run.summary,
        fit=run.fit,
        passed=run.passed,
        environment=run.environment,
        files=files,
    )
    path.write_text(json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n")


# --- SVG ------------------------------------------------------------------------

W, H, PAD = 640, 440, 64


def _ticks(lo, hi):
    a, b = math.floor(lo), math.ceil(hi)
    step = max(1, (b - a) // 6)
    return list(range(a, b + 1, step))


def loglog_svg(xs, ys, title, xlabel, ylabel, fit=None) -> str:
    """Scatter on log-log axes with an optional fitted line (slope, intercept in ln)."""
    pts = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y)]
    lx = [math.log10(x) for x, _ in pts]
    ly = [math.log10(y) for _, y in pts]
    x0, x1 = min(lx), max(lx)
    y0, y1 = min(ly), max(ly)
    if x1 - x0 < 1e-9:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 0.5, y1 + 0.5
    padx, pady = 0.05 * (x1 - x0), 0.08 * (y1 - y0)
    x0, x1, y0, y1 = x0 - padx, x1 + padx, y0 - pady, y1 + pady

    def X(v):
        return PAD + (v - x0) / (x1 - x0) * (W - 2 * PAD)

    def Y(v):
        return H - PAD - (v - y0) / (y1 - y0) * (H - 2 * PAD)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="24" text-anchor="middle" font-size="15" font-family="sans-serif">{title}</text>',
        f'<path d="M{PAD},{PAD} V{H - PAD} H{W - PAD}" stroke="black" fill="none"/>',
    ]
    for k in _ticks(x0, x1):
        if x0 <= k <= x1:
            out.append(f'<line x1="{X(k):.1f}" y1="{H - PAD}" x2="{X(k):.1f}" y2="{H - PAD + 5}" stroke="black"/>')
            out.append(f'<text x="{X(k):.1f}" y="{H - PAD + 20}" text-anchor="middle" font-size="11" font-family="sans-serif">1e{k}</text>')
    for k in _ticks(y0, y1):
        if y0 <= k <= y1:
            out.append(f'<line x1="{PAD - 5}" y1="{Y(k):.1f}" x2="{PAD}" y2="{Y(k):.1f}" stroke="black"/>')
            out.append(f'<text x="{PAD - 8}" y="{Y(k) + 4:.1f}" text-anchor="end" font-size="11" font-family="sans-serif">1e{k}</text>')
    out.append(f'<text x="{W / 2:.1f}" y="{H - 16}" text-anchor="middle" font-size="12" font-family="sans-serif">{xlabel}</text>')
    out.append(f'<text x="16" y="{H / 2:.1f}" text-anchor="middle" font-size="12" font-family="sans-serif" transform="rotate(-90 16 {H / 2:.1f})">{ylabel}</text>')
    for a, b in zip(lx, ly):
        out.append(f'<circle cx="{X(a):.2f}" cy="{Y(b):.2f}" r="3.5" fill="#1f5fa8"/>')
    if fit:
        slope, icpt = fit["slope"], fit["intercept"]
        # fit is in natural logs: ln y = slope ln x + icpt
        ya = slope * min(lx) + icpt / math.log(10)
        yb = slope * max(lx) + icpt / math.log(10)
        out.append(f'<path d="M{X(min(lx)):.2f},{Y(ya):.2f} L{X(max(lx)):.2f},{Y(yb):.2f}" stroke="#c0392b" stroke-width="1.5" fill="none"/>')
        label = f"fitted slope {slope:.3f}"
        if "predicted" in fit:
            label += f" (predicted {fit['predicted']:.3f})"
        out.append(f'<text x="{W - PAD}" y="{PAD + 14}" text-anchor="end" font-size="12" font-family="sans-serif" fill="#c0392b">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _plot_spec(run: ExperimentRun):
    exp = run.config["experiment"]
    ok = [r for r in run.records if not r.failure]
    if exp in ("counterexample-growth", "verify-ndim-remainder"):
        return [(f"{exp}-value.svg", [r.t for r in ok], [r.abs for r in ok], "|value| against t", "t", "|value|", run.fit)]
    if exp == "verify-lemma-asymptotic":
        return [(f"{exp}-error.svg", [r.L for r in ok], [r.rel_err for r in ok], "relative error against L", "L", "relative error", None)]
    if exp == "easylem-check":
        return [(f"{exp}-ratio.svg", [r.t for r in ok], [r.abs for r in ok], "weighted convolution against |x|", "|x|", "integral", None)]
    if exp == "envelope-check":
        return [(f"{exp}-ratio.svg", [r.t for r in ok], [r.rel_err for r in ok], "kernel / envelope", "k r", "ratio", None)]
    return [(f"{exp}-error.svg", [r.t for r in ok], [r.rel_err for r in ok], "relative error against t", "t", "relative error", None)]


def emit_report(run: ExperimentRun, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    exp = run.config["experiment"]
    files = []
    csv_path = out / f"{exp}.csv"
    write_csv(run, csv_path)
    files.append(csv_path.name)
    for name, xs, ys, title, xl, yl, fit in _plot_spec(run):
        if not any(x > 0 and y > 0 for x, y in zip(xs, ys)):
            continue
        (out / name).write_text(loglog_svg(xs, ys, title, xl, yl, fit))
        files.append(name)
    write_manifest(run, out / f"{exp}.json", files + [f"{exp}.json"])
    return [out / f for f in files] + [out / f"{exp}.json"]
