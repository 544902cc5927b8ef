"""Tables, statistical comparison and radar charts built from campaign records."""

import json
from pathlib import Path

import numpy as np

from . import stats
from .campaign import LOSS_COLUMNS, VARIANTS, mean_losses

CRITERION_LABELS = {
    "zero_one": "Zero-One", "ma_fdr": "MaFDR", "ma_fnr": "MaFNR", "ma_f1": "MaF1",
    "mi_fdr": "MiFDR", "mi_fnr": "MiFNR", "mi_f1": "MiF1",
}


def metric_tables(records):
    """{kind: [MetricTable per criterion]} over datasets having every variant."""
    means = mean_losses(records)
    out = {}
    for kind, by_dataset in means.items():
        variants = [v for v in VARIANTS if any(v in row for row in by_dataset.values())]
        names = sorted(n for n, row in by_dataset.items() if all(v in row for v in variants))
        values = np.array([[by_dataset[n][v] for v in variants] for n in names])  # (n, k, 7)
        out[kind] = [stats.MetricTable(c, tuple(variants), tuple(names), values[:, :, i])
                     for i, c in enumerate(LOSS_COLUMNS)] if names else []
    return out


def summary_text(records):
    """Mean losses per kind, dataset and variant."""
    lines = []
    for kind, by_dataset in mean_losses(records).items():
        lines.append(f"== {kind}")
        header = "dataset".ljust(14) + "variant".ljust(11) + "".join(
            CRITERION_LABELS[c].rjust(10) for c in LOSS_COLUMNS)
        lines.append(header)
        for name, row in by_dataset.items():
            for variant in VARIANTS:
                if variant in row:
                    lines.append(name.ljust(14) + variant.ljust(11) +
                                 "".join(f"{v:10.4f}" for v in row[variant]))
        lines.append("")
    return "\n".join(lines)


def compare_records(records, alpha=0.05):
    """{kind: [CriterionReport]} for every kind with at least two datasets."""
    out = {}
    for kind, tables in metric_tables(records).items():
        if tables and len(tables[0].datasets) >= 2:
            out[kind] = [stats.compare(t, alpha) for t in tables]
    return out


def write_comparison(records, out_dir, alpha=0.05):
    """Write compare_<kind>.txt / .json and per-criterion metric tables; returns the text."""
    out_dir = Path(out_dir)
    texts = []
    for kind, tables in metric_tables(records).items():
        for t in tables:
            stats.write_metric_table(t, out_dir / f"metric_{kind}_{t.criterion}.csv")
    for kind, reports in compare_records(records, alpha).items():
        text = f"# base classifier: {kind}\n" + stats.render_rank_table(reports)
        (out_dir / f"compare_{kind}.txt").write_text(text)
        (out_dir / f"compare_{kind}.json").write_text(
            json.dumps(stats.report_dict(reports), indent=2) + "\n")
        texts.append(text)
    return "\n".join(texts)


# -- radar charts -----------------------------------------------------------------

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def radar_radius(rank, k, inner=0.15):
    """Rank 1 sits just outside the centre, rank k on the rim (unit radius)."""
    if k <= 1:
        return 1.0
    return inner + (1.0 - inner) * (rank - 1.0) / (k - 1.0)


def radar_svg(axes, series, k, title="", size=420):
    """SVG radar chart; ``series`` maps a variant name to its rank on each axis."""
    if len(axes) < 3:
        raise ValueError("a radar chart needs at least three axes")
    cx = cy = size / 2.0
    scale = size * 0.32
    angles = [-np.pi / 2 + 2 * np.pi * i / len(axes) for i in range(len(axes))]

    def point(r, a):
        return cx + scale * r * np.cos(a), cy + scale * r * np.sin(a)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + 30}" '
             f'viewBox="0 0 {size} {size + 30}" font-family="sans-serif" font-size="12">',
             '<rect width="100%" height="100%" fill="white"/>']
    if title:
        parts.append(f'<text x="{cx:.1f}" y="18" text-anchor="middle" font-size="14">{title}</text>')
    for r in range(1, k + 1):
        ring = " ".join(f"{x:.2f},{y:.2f}" for x, y in (point(radar_radius(r, k), a) for a in angles))
        parts.append(f'<polygon points="{ring}" fill="none" stroke="#ccc"/>')
    for name, a in zip(axes, angles):
        x, y = point(1.0, a)
        lx, ly = point(1.18, a)
        parts.append(f'<line x1="{cx:.2f}" y1="{cy:.2f}" x2="{x:.2f}" y2="{y:.2f}" stroke="#999"/>')
        parts.append(f'<text x="{lx:.2f}" y="{ly:.2f}" text-anchor="middle" '
                     f'dominant-baseline="middle">{name}</text>')
    for i, (label, ranks) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{x:.2f},{y:.2f}"
                       for x, y in (point(radar_radius(r, k), a) for r, a in zip(ranks, angles)))
        parts.append(f'<polygon class="series" data-name="{label}" points="{pts}" fill="{color}" '
                     f'fill-opacity="0.15" stroke="{color}" stroke-width="2"/>')
        ly = size + 10 - 16 * (len(series) - 1 - i)
        parts.append(f'<rect x="10" y="{ly - 9:.0f}" width="12" height="12" fill="{color}"/>')
        parts.append(f'<text x="28" y="{ly:.0f}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_radar_svg(reports, path, title=""):
    """One polygon per variant over the criterion axes of ``reports``."""
    reports = list(reports)
    variants = reports[0].classifiers
    axes = [CRITERION_LABELS.get(r.criterion, r.criterion) for r in reports]
    series = {v: [float(r.average_ranks[i]) for r in reports] for i, v in enumerate(variants)}
    Path(path).write_text(radar_svg(axes, series, len(variants), title))
    return path


def write_radars(records, out_dir):
    paths = []
    for kind, reports in compare_records(records).items():
        paths.append(emit_radar_svg(reports, Path(out_dir) / f"radar_{kind}.svg",
                                    title=f"average ranks, base {kind}"))
    return paths
