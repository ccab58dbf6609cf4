"""Hand-written SVG renderings of the confusion matrix and the ROC curve."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .metrics import ConfusionMatrix2, RocCurve

# matplotlib "Blues" end points
LIGHT = (247, 251, 255)
DARK = (8, 48, 107)

WIDTH, HEIGHT = 500, 400
# ROC plot area in pixels
ROC_LEFT, ROC_TOP, ROC_SIZE = 70, 40, 300


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def blues(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    r, g, b = (round(lo + (hi - lo) * t) for lo, hi in zip(LIGHT, DARK))
    return f"#{r:02x}{g:02x}{b:02x}"


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:g}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]


def confusion_svg(cm: ConfusionMatrix2, title: str = "Confusion Matrix (Naive Bayes)") -> str:
    """Heatmap with counts in the cells; rows are true labels.

    Cell text is white when the count exceeds half the largest count.
    """
    m = cm.as_array()
    lo, hi = int(m.min()), int(m.max())
    span = hi - lo or 1
    cell, x0, y0 = 130, 90, 50
    out = _header(title)
    for i in range(2):
        for j in range(2):
            v = int(m[i, j])
            x, y = x0 + j * cell, y0 + i * cell
            out.append(f'<rect class="cell" x="{x}" y="{y}" width="{cell}" height="{cell}" '
                       f'fill="{blues((v - lo) / span)}" stroke="white"/>')
            color = "white" if v > hi / 2.0 else "black"
            out.append(f'<text class="count" x="{x + cell // 2}" y="{y + cell // 2 + 6}" '
                       f'text-anchor="middle" font-size="18" fill="{color}">{v}</text>')
    for k in range(2):
        out.append(f'<text x="{x0 + k * cell + cell // 2}" y="{y0 + 2 * cell + 18}" '
                   f'text-anchor="middle" font-size="12">{k}</text>')
        out.append(f'<text x="{x0 - 10}" y="{y0 + k * cell + cell // 2 + 4}" '
                   f'text-anchor="end" font-size="12">{k}</text>')
    out.append(f'<text x="{x0 + cell}" y="{y0 + 2 * cell + 40}" text-anchor="middle" '
               f'font-size="13">Predicted label</text>')
    cy = y0 + cell
    out.append(f'<text x="30" y="{cy}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 30 {cy})">True label</text>')

    # colour bar
    bx, bh = x0 + 2 * cell + 30, 2 * cell
    out.append('<defs><linearGradient id="bar" x1="0" y1="1" x2="0" y2="0">'
               f'<stop offset="0" stop-color="{blues(0)}"/>'
               f'<stop offset="1" stop-color="{blues(1)}"/></linearGradient></defs>')
    out.append(f'<rect x="{bx}" y="{y0}" width="18" height="{bh}" fill="url(#bar)" stroke="#999"/>')
    out.append(f'<text class="bar-label" x="{bx + 24}" y="{y0 + 10}" font-size="11">{hi}</text>')
    out.append(f'<text class="bar-label" x="{bx + 24}" y="{y0 + bh}" font-size="11">{lo}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def roc_to_pixels(fpr, tpr) -> tuple[np.ndarray, np.ndarray]:
    fpr = np.asarray(fpr, dtype=float)
    tpr = np.asarray(tpr, dtype=float)
    return ROC_LEFT + fpr * ROC_SIZE, ROC_TOP + (1.0 - tpr) * ROC_SIZE


def pixels_to_roc(px, py) -> tuple[np.ndarray, np.ndarray]:
    return (np.asarray(px) - ROC_LEFT) / ROC_SIZE, 1.0 - (np.asarray(py) - ROC_TOP) / ROC_SIZE


def roc_svg(curve: RocCurve, label: str = "Naive Bayes", title: str = "ROC Curve (Naive Bayes)") -> str:
    """Solid model curve, dashed chance diagonal, AUC in the legend."""
    out = _header(title)
    L, T, S = ROC_LEFT, ROC_TOP, ROC_SIZE
    out.append(f'<rect x="{L}" y="{T}" width="{S}" height="{S}" fill="none" stroke="black"/>')
    for k in range(6):
        v = k / 5
        px, py = L + v * S, T + (1 - v) * S
        out.append(f'<text x="{_fmt(px)}" y="{T + S + 16}" text-anchor="middle" font-size="11">{v:.1f}</text>')
        out.append(f'<text x="{L - 6}" y="{_fmt(py + 4)}" text-anchor="end" font-size="11">{v:.1f}</text>')
    out.append(f'<text x="{L + S / 2:g}" y="{T + S + 36}" text-anchor="middle" '
               f'font-size="13">False Positive Rate</text>')
    cy = T + S / 2
    out.append(f'<text x="20" y="{cy:g}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 20 {cy:g})">True Positive Rate</text>')

    out.append(f'<line id="baseline" x1="{L}" y1="{T + S}" x2="{L + S}" y2="{T}" '
               f'stroke="gray" stroke-width="1.5" stroke-dasharray="6,4"/>')
    xs, ys = roc_to_pixels(curve.fpr, curve.tpr)
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    out.append(f'<polyline id="roc-curve" points="{pts}" fill="none" stroke="#1f77b4" stroke-width="2"/>')

    lx, ly = L + S - 190, T + S - 44
    out.append(f'<rect x="{lx}" y="{ly}" width="185" height="38" fill="white" stroke="#ccc"/>')
    out.append(f'<line x1="{lx + 8}" y1="{ly + 13}" x2="{lx + 30}" y2="{ly + 13}" stroke="#1f77b4" stroke-width="2"/>')
    out.append(f'<text id="legend-model" x="{lx + 36}" y="{ly + 17}" font-size="11">'
               f'{escape(label)} (AUC = {curve.auc:.3f})</text>')
    out.append(f'<line x1="{lx + 8}" y1="{ly + 29}" x2="{lx + 30}" y2="{ly + 29}" stroke="gray" '
               f'stroke-dasharray="6,4"/>')
    out.append(f'<text x="{lx + 36}" y="{ly + 33}" font-size="11">Random baseline</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
