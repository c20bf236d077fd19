"""Overlay rendering and table/summary emission.

Output formatting is fixed so repeated runs are byte-identical: CSV uses
LF line endings and 3-decimal centroids; JSON uses two-space indentation
with keys in a documented stable order.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .change import ChangeMap, ChangeSummary
from .raster import BinaryMask, ColorRaster

__all__ = [
    "render_overlay",
    "render_change",
    "write_region_csv",
    "write_summary_json",
    "summary_record",
]

RED = (255, 0, 0)
GREEN = (0, 255, 0)
GRAY = (128, 128, 128)

REGION_CSV_HEADER = "label,area,centroid_x,centroid_y"


def _blend(pixels: np.ndarray, where: np.ndarray, color, alpha: float) -> np.ndarray:
    """Blend masked pixels toward color with weight alpha, half-up rounding."""
    out = pixels.astype(np.float64)
    target = np.array(color, dtype=np.float64)
    out[where] = alpha * target + (1.0 - alpha) * out[where]
    return np.floor(out + 0.5).clip(0, 255).astype(np.uint8)


def render_overlay(
    img: ColorRaster,
    mask: BinaryMask,
    color=RED,
    alpha: float = 0.6,
) -> ColorRaster:
    """Blend masked pixels toward color; unmasked pixels stay untouched."""
    if (mask.height, mask.width) != (img.height, img.width):
        raise ValueError(
            f"mask {mask.width}x{mask.height} does not match image {img.width}x{img.height}"
        )
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return ColorRaster(_blend(img.pixels, mask.bits, color, alpha))


def render_change(cm: ChangeMap, base: ColorRaster, alpha: float = 0.6) -> ColorRaster:
    """Paint change classes over a base image: lost red, gained green,
    unchanged gray; unclassified pixels untouched."""
    if (cm.gained.height, cm.gained.width) != (base.height, base.width):
        raise ValueError(
            f"change map {cm.gained.width}x{cm.gained.height} does not match "
            f"image {base.width}x{base.height}"
        )
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    out = _blend(base.pixels, cm.lost.bits, RED, alpha)
    out = _blend(out, cm.gained.bits, GREEN, alpha)
    out = _blend(out, cm.unchanged.bits, GRAY, alpha)
    return ColorRaster(out)


def write_region_csv(regions: list, path) -> None:
    """Region table: one row per region in ascending label order,
    centroids printed with 3 decimal places."""
    p = Path(path)
    lines = [REGION_CSV_HEADER]
    for st in regions:
        lines.append(f"{st.label},{st.area},{st.centroid_x:.3f},{st.centroid_y:.3f}")
    try:
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {p}: {exc}") from None


def summary_record(cm: ChangeMap, cs: ChangeSummary) -> dict:
    """Stable-keyed JSON record for one change pair."""
    return {
        "earlier": cm.earlier.isoformat(),
        "later": cm.later.isoformat(),
        "earlier_area": cs.earlier_area,
        "later_area": cs.later_area,
        "gained": cs.gained_area,
        "lost": cs.lost_area,
        "unchanged": cs.unchanged_area,
        "net": cs.net_change,
        "percent": cs.percent_change,
        "percent_defined": cs.percent_defined,
    }


def write_summary_json(date_totals: dict, changes: list, path) -> None:
    """Summary document: per-date open-space totals plus one record per
    change pair.

    date_totals maps dates (datetime.date or ISO strings) to pixel
    areas; changes is a list of (ChangeMap, ChangeSummary) pairs.
    """
    dates = {
        (d.isoformat() if hasattr(d, "isoformat") else str(d)): int(total)
        for d, total in date_totals.items()
    }
    doc = {
        "dates": dict(sorted(dates.items())),
        "changes": [summary_record(cm, cs) for cm, cs in changes],
    }
    p = Path(path)
    try:
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {p}: {exc}") from None
