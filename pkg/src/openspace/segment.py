"""Connected-component labeling, region statistics, and candidate filters.

Labels are assigned 1..N in order of first encounter in a row-major scan,
so outputs are deterministic and downstream tables are reproducible
byte-for-byte. Label 0 is background.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .raster import BinaryMask

__all__ = [
    "Connectivity",
    "LabelMap",
    "RegionStats",
    "RegionFilterConfig",
    "label_components",
    "region_stats",
    "central_pixels",
    "region_width",
    "shape_ratio",
    "filter_regions",
]

RATIO_DIRECTIONS = ("atleast", "atmost")


class Connectivity(enum.IntEnum):
    FOUR = 4
    EIGHT = 8


@dataclass(frozen=True)
class LabelMap:
    """Grid of region identifiers: 0 = background, 1..region_count = regions."""

    labels: np.ndarray
    region_count: int

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"LabelMap needs a (h, w) grid, got shape {arr.shape}")
        arr = arr.astype(np.int32)
        if arr.min() < 0 or (self.region_count and arr.max() > self.region_count):
            raise ValueError("labels must lie in 0..region_count")
        if self.region_count > 0:
            present = np.bincount(arr.ravel(), minlength=self.region_count + 1)[1:]
            if (present == 0).any():
                raise ValueError("every label in 1..region_count must occur at least once")
        elif (arr != 0).any():
            raise ValueError("region_count 0 requires an all-zero grid")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def mask(self) -> BinaryMask:
        """Mask of all labeled (non-background) pixels."""
        return BinaryMask(self.labels > 0)

    def region_mask(self, label: int) -> BinaryMask:
        if not (1 <= label <= self.region_count):
            raise ValueError(f"label {label} out of range 1..{self.region_count}")
        return BinaryMask(self.labels == label)


@dataclass(frozen=True)
class RegionStats:
    """Per-region measurements; centroid uses (x=column, y=row), 0-based."""

    label: int
    area: int
    centroid_x: float
    centroid_y: float
    bbox: tuple  # (min_x, min_y, max_x, max_y), inclusive
    width_estimate: float
    central_pixel_count: int


@dataclass(frozen=True)
class RegionFilterConfig:
    """Candidate-region acceptance rules.

    min_width 0 disables the width test (the stage-two relaxation).
    ratio_direction 'atmost' keeps compact regions and rejects strips;
    'atleast' does the opposite.
    """

    min_area: int = 25
    min_width: float = 8.0
    ratio_threshold: float = 1.0
    ratio_direction: str = "atmost"
    max_vegetation_fraction: float = 0.5
    max_texture_fraction: float = 0.5

    def __post_init__(self):
        if self.min_area < 1:
            raise ValueError(f"min_area must be >= 1, got {self.min_area}")
        if self.min_width < 0:
            raise ValueError(f"min_width must be >= 0, got {self.min_width}")
        if self.ratio_direction not in RATIO_DIRECTIONS:
            raise ValueError(
                f"ratio_direction must be one of {RATIO_DIRECTIONS}, got {self.ratio_direction!r}"
            )
        for name in ("max_vegetation_fraction", "max_texture_fraction"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


# ---------------------------------------------------------------------------
# labeling


def label_components(mask: BinaryMask, conn: Connectivity = Connectivity.EIGHT) -> LabelMap:
    """Partition true bits into maximal connected regions.

    Classic two-pass scan with union-find equivalence resolution, then a
    renumbering pass that orders final labels by first row-major
    encounter.
    """
    bits = mask.bits
    h, w = bits.shape
    labels = np.zeros((h, w), dtype=np.int32)
    parent = [0]  # parent[i] = union-find parent of provisional label i

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    diagonal = conn == Connectivity.EIGHT
    next_label = 1
    for r in range(h):
        row = bits[r]
        lab_row = labels[r]
        above = labels[r - 1] if r > 0 else None
        for c in range(w):
            if not row[c]:
                continue
            neighbors = []
            if c > 0 and lab_row[c - 1]:
                neighbors.append(lab_row[c - 1])
            if above is not None:
                if above[c]:
                    neighbors.append(above[c])
                if diagonal:
                    if c > 0 and above[c - 1]:
                        neighbors.append(above[c - 1])
                    if c + 1 < w and above[c + 1]:
                        neighbors.append(above[c + 1])
            if not neighbors:
                lab_row[c] = next_label
                parent.append(next_label)
                next_label += 1
            else:
                roots = {find(int(n)) for n in neighbors}
                best = min(roots)
                lab_row[c] = best
                for other in roots:
                    if other != best:
                        parent[other] = best

    if next_label == 1:
        return LabelMap(labels, 0)

    # Dense renumber in row-major first-encounter order.
    remap = np.zeros(next_label, dtype=np.int32)
    seen = {}
    flat = labels.ravel()
    roots = np.array([find(i) for i in range(next_label)], dtype=np.int32)
    for v in flat:
        if v:
            root = roots[v]
            if root not in seen:
                seen[root] = len(seen) + 1
    for i in range(1, next_label):
        remap[i] = seen[roots[i]]
    return LabelMap(remap[labels], len(seen))


# ---------------------------------------------------------------------------
# skeletons and widths


def _neighbor_views(img: np.ndarray) -> tuple:
    """Shifted views N, NE, E, SE, S, SW, W, NW of a 0/1 array."""
    m = np.pad(img, 1, mode="constant")
    return (
        m[:-2, 1:-1],
        m[:-2, 2:],
        m[1:-1, 2:],
        m[2:, 2:],
        m[2:, 1:-1],
        m[2:, :-2],
        m[1:-1, :-2],
        m[:-2, :-2],
    )


def _thin(mask: np.ndarray) -> np.ndarray:
    """Parallel two-subiteration thinning to fixpoint.

    Uses the Guo-Hall deletion conditions, which preserve 8-connectivity,
    never empty a nonempty region, leave 1-pixel-wide paths untouched,
    and reduce an odd filled square to its single center pixel.
    """
    img = mask.astype(np.uint8)
    while True:
        changed = False
        for step in (0, 1):
            p2, p3, p4, p5, p6, p7, p8, p9 = _neighbor_views(img)
            c = (
                ((1 - p2) & (p3 | p4))
                + ((1 - p4) & (p5 | p6))
                + ((1 - p6) & (p7 | p8))
                + ((1 - p8) & (p9 | p2))
            )
            n1 = (p9 | p2) + (p3 | p4) + (p5 | p6) + (p7 | p8)
            n2 = (p2 | p3) + (p4 | p5) + (p6 | p7) + (p8 | p9)
            nm = np.minimum(n1, n2)
            if step == 0:
                side = ((p6 | p7 | (1 - p9)) & p8) == 0
            else:
                side = ((p2 | p3 | (1 - p5)) & p4) == 0
            cond = (img == 1) & (c == 1) & (nm >= 2) & (nm <= 3) & side
            if cond.any():
                img[cond] = 0
                changed = True
        if not changed:
            return img.astype(bool)


def _chessboard_distance(mask: np.ndarray) -> np.ndarray:
    """Chessboard distance from each true pixel to the nearest false pixel.

    Pixels outside the frame count as false. Computed by iterated 3x3
    erosion: a pixel at distance d survives exactly d - 1 erosions.
    """
    dist = np.zeros(mask.shape, dtype=np.int32)
    cur = mask.copy()
    d = 1
    while cur.any():
        dist[cur] = d
        p = np.pad(cur, 1, mode="constant")
        cur = (
            p[:-2, :-2] & p[:-2, 1:-1] & p[:-2, 2:]
            & p[1:-1, :-2] & p[1:-1, 1:-1] & p[1:-1, 2:]
            & p[2:, :-2] & p[2:, 1:-1] & p[2:, 2:]
        )
        d += 1
    return dist


def _region_crop(lm: LabelMap, label: int) -> tuple:
    region = lm.labels == label
    rows = np.flatnonzero(region.any(axis=1))
    cols = np.flatnonzero(region.any(axis=0))
    r0, r1 = rows[0], rows[-1]
    c0, c1 = cols[0], cols[-1]
    return region, region[r0 : r1 + 1, c0 : c1 + 1], (r0, c0)


def central_pixels(lm: LabelMap, label: int) -> BinaryMask:
    """Skeleton of one region via connectivity-preserving iterative thinning.

    A filled (2k+1) x (2k+1) square reduces to its single center pixel;
    a 1-pixel-wide path maps to itself. The result is always a nonempty
    subset of the region.
    """
    if not (1 <= label <= lm.region_count):
        raise ValueError(f"label {label} out of range 1..{lm.region_count}")
    region, crop, (r0, c0) = _region_crop(lm, label)
    thin = _thin(crop)
    out = np.zeros(region.shape, dtype=bool)
    out[r0 : r0 + crop.shape[0], c0 : c0 + crop.shape[1]] = thin
    return BinaryMask(out)


def region_width(lm: LabelMap, label: int) -> float:
    """Widest inscribed extent: twice the maximum chessboard distance
    from a region pixel to the region's complement (frame border counts
    as complement)."""
    if not (1 <= label <= lm.region_count):
        raise ValueError(f"label {label} out of range 1..{lm.region_count}")
    _, crop, _ = _region_crop(lm, label)
    return 2.0 * float(_chessboard_distance(crop).max())


def shape_ratio(stats: RegionStats) -> float:
    """Central-pixel count over sqrt(area): low for compact regions,
    high for long narrow strips."""
    if stats.area < 1:
        raise ValueError("shape_ratio needs area >= 1")
    return stats.central_pixel_count / math.sqrt(stats.area)


# ---------------------------------------------------------------------------
# statistics


def region_stats(lm: LabelMap) -> list:
    """RegionStats for every region, in ascending label order."""
    n = lm.region_count
    if n == 0:
        return []
    labels = lm.labels
    h, w = labels.shape
    flat = labels.ravel()
    ys, xs = np.divmod(np.arange(h * w, dtype=np.int64), w)

    areas = np.bincount(flat, minlength=n + 1)
    sx = np.bincount(flat, weights=xs, minlength=n + 1)
    sy = np.bincount(flat, weights=ys, minlength=n + 1)

    min_x = np.full(n + 1, w, dtype=np.int64)
    max_x = np.full(n + 1, -1, dtype=np.int64)
    min_y = np.full(n + 1, h, dtype=np.int64)
    max_y = np.full(n + 1, -1, dtype=np.int64)
    np.minimum.at(min_x, flat, xs)
    np.maximum.at(max_x, flat, xs)
    np.minimum.at(min_y, flat, ys)
    np.maximum.at(max_y, flat, ys)

    out = []
    for label in range(1, n + 1):
        area = int(areas[label])
        crop = labels[min_y[label] : max_y[label] + 1, min_x[label] : max_x[label] + 1] == label
        skeleton = _thin(crop)
        width = 2.0 * float(_chessboard_distance(crop).max())
        out.append(
            RegionStats(
                label=label,
                area=area,
                centroid_x=float(sx[label]) / area,
                centroid_y=float(sy[label]) / area,
                bbox=(int(min_x[label]), int(min_y[label]), int(max_x[label]), int(max_y[label])),
                width_estimate=width,
                central_pixel_count=int(skeleton.sum()),
            )
        )
    return out


# ---------------------------------------------------------------------------
# filtering


def filter_regions(
    lm: LabelMap,
    stats: list,
    cfg: RegionFilterConfig,
    veg: BinaryMask,
    tex: BinaryMask,
) -> LabelMap:
    """Keep regions passing area, width, shape-ratio, vegetation, and
    texture rules; relabel survivors densely 1..M preserving encounter
    order."""
    if (veg.height, veg.width) != (lm.height, lm.width):
        raise ValueError(
            f"vegetation mask {veg.width}x{veg.height} does not match label map {lm.width}x{lm.height}"
        )
    if (tex.height, tex.width) != (lm.height, lm.width):
        raise ValueError(
            f"texture mask {tex.width}x{tex.height} does not match label map {lm.width}x{lm.height}"
        )
    n = lm.region_count
    if n == 0:
        return lm

    flat = lm.labels.ravel()
    veg_counts = np.bincount(flat[veg.bits.ravel()], minlength=n + 1)
    tex_counts = np.bincount(flat[tex.bits.ravel()], minlength=n + 1)

    remap = np.zeros(n + 1, dtype=np.int32)
    kept = 0
    for st in stats:
        ratio = shape_ratio(st)
        if st.area < cfg.min_area:
            continue
        if cfg.min_width > 0 and st.width_estimate < cfg.min_width:
            continue
        if cfg.ratio_direction == "atleast" and ratio < cfg.ratio_threshold:
            continue
        if cfg.ratio_direction == "atmost" and ratio > cfg.ratio_threshold:
            continue
        if veg_counts[st.label] / st.area > cfg.max_vegetation_fraction:
            continue
        if tex_counts[st.label] / st.area > cfg.max_texture_fraction:
            continue
        kept += 1
        remap[st.label] = kept
    return LabelMap(remap[lm.labels], kept)
