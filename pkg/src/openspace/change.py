"""Multi-date change detection over co-registered open-space masks.

Change is pure per-pixel set algebra: lost = earlier and not later,
gained = later and not earlier, unchanged = both. An optional despeckle
step drops small change blobs to absorb imperfect co-registration.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .raster import BinaryMask, ImageMeta
from .segment import Connectivity, label_components

__all__ = [
    "DatedMask",
    "ChangeMap",
    "ChangeSummary",
    "diff_masks",
    "despeckle_changes",
    "summarize",
    "change_series",
]


@dataclass(frozen=True)
class DatedMask:
    meta: ImageMeta
    mask: BinaryMask

    @property
    def date(self) -> dt.date:
        return self.meta.acquisition_date


@dataclass(frozen=True)
class ChangeMap:
    """Disjoint gained/lost/unchanged masks for a dated pair."""

    gained: BinaryMask
    lost: BinaryMask
    unchanged: BinaryMask
    earlier: dt.date
    later: dt.date

    def __post_init__(self):
        dims = (self.gained.height, self.gained.width)
        for name in ("lost", "unchanged"):
            m = getattr(self, name)
            if (m.height, m.width) != dims:
                raise ValueError(f"{name} mask dimensions do not match gained mask")
        if (self.gained.bits & self.lost.bits).any() or (
            self.gained.bits & self.unchanged.bits
        ).any() or (self.lost.bits & self.unchanged.bits).any():
            raise ValueError("gained/lost/unchanged masks must be pairwise disjoint")
        if self.earlier >= self.later:
            raise ValueError(f"earlier date {self.earlier} must precede later date {self.later}")


@dataclass(frozen=True)
class ChangeSummary:
    """Pixel accounting for one dated pair.

    Identities hold by construction: earlier_area = lost + unchanged,
    later_area = gained + unchanged, net = later - earlier.
    percent_change is relative to earlier_area and is reported as 0 with
    percent_defined False when earlier_area is 0.
    """

    earlier_area: int
    later_area: int
    gained_area: int
    lost_area: int
    unchanged_area: int
    net_change: int
    percent_change: float
    percent_defined: bool = True


def diff_masks(earlier: DatedMask, later: DatedMask) -> ChangeMap:
    """Per-pixel change classes between two co-registered dated masks."""
    a, b = earlier.mask, later.mask
    if (a.height, a.width) != (b.height, b.width):
        raise ValueError(
            f"mask dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    if earlier.date >= later.date:
        raise ValueError(
            f"earlier date {earlier.date} must precede later date {later.date}"
        )
    return ChangeMap(
        gained=BinaryMask(~a.bits & b.bits),
        lost=BinaryMask(a.bits & ~b.bits),
        unchanged=BinaryMask(a.bits & b.bits),
        earlier=earlier.date,
        later=later.date,
    )


def despeckle_changes(cm: ChangeMap, min_blob: int) -> ChangeMap:
    """Drop gained/lost blobs (8-connected) smaller than min_blob pixels.

    min_blob 0 is the identity. Dropped pixels leave the change map
    entirely; summary identities still hold on the result.
    """
    if min_blob <= 0:
        return cm

    def prune(mask: BinaryMask) -> BinaryMask:
        lm = label_components(mask, Connectivity.EIGHT)
        if lm.region_count == 0:
            return mask
        areas = np.bincount(lm.labels.ravel(), minlength=lm.region_count + 1)
        keep = areas >= min_blob
        keep[0] = False
        return BinaryMask(keep[lm.labels])

    return ChangeMap(
        gained=prune(cm.gained),
        lost=prune(cm.lost),
        unchanged=cm.unchanged,
        earlier=cm.earlier,
        later=cm.later,
    )


def summarize(cm: ChangeMap) -> ChangeSummary:
    """Areas, net change, and percent change for one change map."""
    gained = cm.gained.count()
    lost = cm.lost.count()
    unchanged = cm.unchanged.count()
    earlier_area = lost + unchanged
    later_area = gained + unchanged
    net = later_area - earlier_area
    if earlier_area == 0:
        return ChangeSummary(
            earlier_area, later_area, gained, lost, unchanged, net,
            percent_change=0.0, percent_defined=False,
        )
    return ChangeSummary(
        earlier_area, later_area, gained, lost, unchanged, net,
        percent_change=100.0 * net / earlier_area,
    )


def change_series(masks: list) -> list:
    """Change maps for every consecutive date pair, plus the
    (first, last) endpoints pair when three or more dates are present.

    With dates d1 < d2 < d3 this yields (d1,d2), (d2,d3), (d1,d3).
    """
    if not masks:
        raise ValueError("change_series needs at least one dated mask")
    dims = (masks[0].mask.height, masks[0].mask.width)
    for m in masks:
        if (m.mask.height, m.mask.width) != dims:
            raise ValueError("all masks in a series must share dimensions")
    dates = [m.date for m in masks]
    if len(set(dates)) != len(dates):
        raise ValueError("series dates must be distinct")
    ordered = sorted(masks, key=lambda m: m.date)
    pairs = [(a, b) for a, b in zip(ordered, ordered[1:])]
    if len(ordered) >= 3:
        pairs.append((ordered[0], ordered[-1]))
    return [diff_masks(a, b) for a, b in pairs]
