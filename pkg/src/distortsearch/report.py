"""Report emission: JSON + CSV data files and static SVG bar charts.

Charts are dependency-free SVG with each bar's numeric value embedded as a
``<text class="value">`` element, so tests (and curious humans) can read
the plotted numbers straight back out of the file.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from xml.sax.saxutils import escape

from .experiment import ExperimentReport

REPORT_JSON = "report.json"
PER_QUERY_CSV = "per_query.csv"
ATTACK_CSV = "attack.csv"
EXPOSURE_CSV = "exposure.csv"
CHART_RETRIEVAL = "retrieved_vs_relevant.svg"
CHART_ATTACK = "attack_accuracy.svg"
CHART_ADS = "ad_categories.svg"

_BAR_W = 14
_GROUP_GAP = 10
_HEIGHT = 320
_PLOT_H = 240
_MARGIN_L = 50
_MARGIN_T = 40

_SERIES_COLORS = ("#4878a8", "#e08214", "#5aae61", "#9970ab")


def _fmt(value: float) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return format(value, "g")


def bar_chart(
    title: str,
    labels: list[str],
    series: dict[str, list[float]],
    y_label: str = "",
) -> str:
    """Render a grouped bar chart as an SVG string.

    Every bar carries its value in a ``<text class="value">`` node tagged
    with ``data-series`` and ``data-label`` attributes.
    """
    if not labels:
        raise ValueError("chart needs at least one label")
    for name, values in series.items():
        if len(values) != len(labels):
            raise ValueError(f"series {name!r} length does not match labels")
    names = list(series)
    group_w = _BAR_W * len(names) + _GROUP_GAP
    width = _MARGIN_L + group_w * len(labels) + 20
    peak = max((v for vs in series.values() for v in vs), default=0.0)
    scale = (_PLOT_H / peak) if peak > 0 else 0.0
    base_y = _MARGIN_T + _PLOT_H

    out = io.StringIO()
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{_HEIGHT}" '
        f'viewBox="0 0 {width} {_HEIGHT}" font-family="sans-serif" font-size="10">\n'
    )
    out.write(f'  <title>{escape(title)}</title>\n')
    out.write(
        f'  <text x="{_MARGIN_L}" y="20" font-size="14" class="title">{escape(title)}</text>\n'
    )
    if y_label:
        out.write(
            f'  <text x="12" y="{_MARGIN_T + _PLOT_H // 2}" class="axis" '
            f'transform="rotate(-90 12 {_MARGIN_T + _PLOT_H // 2})">{escape(y_label)}</text>\n'
        )
    out.write(
        f'  <line x1="{_MARGIN_L}" y1="{base_y}" x2="{width - 10}" y2="{base_y}" '
        'stroke="#333" stroke-width="1"/>\n'
    )
    for gi, label in enumerate(labels):
        gx = _MARGIN_L + gi * group_w
        for si, name in enumerate(names):
            value = series[name][gi]
            h = max(0.0, value) * scale
            x = gx + si * _BAR_W
            y = base_y - h
            color = _SERIES_COLORS[si % len(_SERIES_COLORS)]
            out.write(
                f'  <rect x="{x:.2f}" y="{y:.2f}" width="{_BAR_W - 2}" height="{h:.2f}" '
                f'fill="{color}"/>\n'
            )
            out.write(
                f'  <text class="value" data-series="{escape(name)}" '
                f'data-label="{escape(label)}" x="{x:.2f}" y="{y - 2:.2f}">'
                f"{_fmt(value)}</text>\n"
            )
        out.write(
            f'  <text class="tick" x="{gx:.2f}" y="{base_y + 12}">{escape(label)}</text>\n'
        )
    lx = _MARGIN_L
    for si, name in enumerate(names):
        color = _SERIES_COLORS[si % len(_SERIES_COLORS)]
        out.write(f'  <rect x="{lx}" y="28" width="9" height="9" fill="{color}"/>\n')
        out.write(f'  <text x="{lx + 12}" y="36" class="legend">{escape(name)}</text>\n')
        lx += 12 + 7 * len(name) + 18
    out.write("</svg>\n")
    return out.getvalue()


def _per_query_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["query_id", "pattern", "retrieved", "relevant", "precision"])
    for row in report.per_query:
        precision = row["precision"]
        writer.writerow(
            [
                row["query_id"],
                row["pattern"],
                row["retrieved"],
                row["relevant"],
                "" if precision is None else _fmt(precision),
            ]
        )
    return buf.getvalue()


def _attack_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["classifier", "fold", "accuracy"])
    for name in sorted(report.attack):
        rep = report.attack[name]
        for fold, acc in enumerate(rep["per_fold"]):
            writer.writerow([name, fold, _fmt(acc)])
        writer.writerow([name, "overall", _fmt(rep["overall_accuracy"])])
    return buf.getvalue()


def _exposure_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["category", "ads"])
    breakdown = report.exposure["conceptual_breakdown"]
    for category in sorted(breakdown):
        writer.writerow([category, breakdown[category]])
    writer.writerow(["(specific)", report.exposure["specific_ads"]])
    writer.writerow(["(total)", report.exposure["total_ads"]])
    return buf.getvalue()


def render_report_files(report: ExperimentReport) -> dict[str, str]:
    """Build every artifact as an in-memory string, file name → content."""
    files: dict[str, str] = {}
    files[REPORT_JSON] = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    files[PER_QUERY_CSV] = _per_query_csv(report)
    files[ATTACK_CSV] = _attack_csv(report)
    files[EXPOSURE_CSV] = _exposure_csv(report)

    labels = [row["query_id"] for row in report.per_query]
    files[CHART_RETRIEVAL] = bar_chart(
        "Retrieved vs relevant documents per query",
        labels,
        {
            "retrieved": [float(row["retrieved"]) for row in report.per_query],
            "relevant": [float(row["relevant"]) for row in report.per_query],
        },
        y_label="documents",
    )
    attack_names = sorted(report.attack)
    files[CHART_ATTACK] = bar_chart(
        "Distinguishability attack accuracy",
        attack_names,
        {"accuracy": [float(report.attack[n]["overall_accuracy"]) for n in attack_names]},
        y_label="accuracy",
    )
    breakdown = report.exposure["conceptual_breakdown"]
    categories = sorted(breakdown)
    files[CHART_ADS] = bar_chart(
        "Served ads per category",
        categories,
        {"ads": [float(breakdown[c]) for c in categories]},
        y_label="impressions",
    )
    return files


def emit_report(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    """Write the data files and charts into ``out_dir``.

    All contents are rendered before the first byte hits disk, so a
    rendering failure leaves the directory untouched.
    """
    out_dir = Path(out_dir)
    files = render_report_files(report)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for name, content in files.items():
        path = out_dir / name
        path.write_text(content, encoding="utf-8")
        written.append(path)
    return written


def load_report(path: str | Path) -> ExperimentReport:
    """Load a previously written report.json."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return ExperimentReport.from_dict(raw)
