"""Pixel filtering kernels: edge detection, outlier removal, thresholding.

Every windowed operation uses replicate padding at the image border, so
output dimensions always equal input dimensions and no phantom edges
appear at the frame. All functions are pure; none mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import BinaryMask, ColorRaster, GrayRaster, ScalarField

__all__ = [
    "OutlierParams",
    "CannyParams",
    "BandThreshold",
    "sobel_magnitude",
    "canny_edges",
    "remove_outliers",
    "threshold_band",
    "vegetation_mask",
    "texture_mask",
]

DIRECTIONS = ("bright", "dark", "both")

# Sobel kernel pair: Gx responds to horizontal change, Gy to vertical.
SOBEL_GX = np.array([[1, 0, -1], [2, 0, -2], [1, 0, -1]], dtype=np.float64)
SOBEL_GY = np.array([[1, 2, 1], [0, 0, 0], [-1, -2, -1]], dtype=np.float64)


@dataclass(frozen=True)
class OutlierParams:
    """Disc-median outlier removal parameters.

    radius is the Euclidean radius in pixels of the disc used to compute
    the median; threshold is the minimum deviation (intensity units) for
    a pixel to be replaced; direction selects which deviations count:
    'bright' (pixel above median), 'dark' (below), or 'both'.
    """

    radius: float = 10.0
    threshold: float = 2.0
    direction: str = "bright"

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError(f"outlier radius must be >= 1, got {self.radius}")
        if self.threshold < 0:
            raise ValueError(f"outlier threshold must be >= 0, got {self.threshold}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"outlier direction must be one of {DIRECTIONS}, got {self.direction!r}")


@dataclass(frozen=True)
class CannyParams:
    gaussian_sigma: float = 1.4
    low_threshold: float = 40.0
    high_threshold: float = 90.0

    def __post_init__(self):
        if self.gaussian_sigma <= 0:
            raise ValueError(f"gaussian_sigma must be > 0, got {self.gaussian_sigma}")
        if self.low_threshold < 0 or self.low_threshold > self.high_threshold:
            raise ValueError(
                f"need 0 <= low <= high, got low={self.low_threshold} high={self.high_threshold}"
            )


@dataclass(frozen=True)
class BandThreshold:
    """Inclusive intensity band [lower, upper] marking features of interest."""

    lower: int = 0
    upper: int = 48

    def __post_init__(self):
        if not (0 <= self.lower <= self.upper <= 255):
            raise ValueError(f"need 0 <= lower <= upper <= 255, got ({self.lower}, {self.upper})")


def _correlate3(arr: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """3x3 correlation with replicate padding, float64."""
    p = np.pad(arr, 1, mode="edge").astype(np.float64)
    h, w = arr.shape
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(3):
        for j in range(3):
            k = kernel[i, j]
            if k != 0.0:
                out += k * p[i : i + h, j : j + w]
    return out


def sobel_magnitude(img: GrayRaster) -> ScalarField:
    """Gradient magnitude sqrt(gx^2 + gy^2) from the 3x3 Sobel kernel pair."""
    if img.width < 3 or img.height < 3:
        raise ValueError(f"sobel_magnitude needs at least 3x3, got {img.width}x{img.height}")
    gx = _correlate3(img.pixels, SOBEL_GX)
    gy = _correlate3(img.pixels, SOBEL_GY)
    return ScalarField(np.sqrt(gx * gx + gy * gy))


def _gaussian_blur(arr: np.ndarray, sigma: float) -> np.ndarray:
    radius = max(1, int(round(3.0 * sigma)))
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    kernel /= kernel.sum()
    h, w = arr.shape
    tmp = np.zeros((h, w), dtype=np.float64)
    p = np.pad(arr, ((0, 0), (radius, radius)), mode="edge").astype(np.float64)
    for t, k in enumerate(kernel):
        tmp += k * p[:, t : t + w]
    out = np.zeros((h, w), dtype=np.float64)
    p = np.pad(tmp, ((radius, radius), (0, 0)), mode="edge")
    for t, k in enumerate(kernel):
        out += k * p[t : t + h, :]
    return out


def canny_edges(img: GrayRaster, p: CannyParams = CannyParams()) -> BinaryMask:
    """Canny edge detection: Gaussian smoothing, Sobel gradient,
    non-maximum suppression, double-threshold hysteresis.

    Suppression quantizes the gradient direction to four bins and keeps a
    pixel only if its magnitude beats the neighbor on one side strictly,
    which makes a clean step produce a single-pixel-wide line.
    """
    if img.width < 3 or img.height < 3:
        raise ValueError(f"canny_edges needs at least 3x3, got {img.width}x{img.height}")
    smoothed = _gaussian_blur(img.pixels, p.gaussian_sigma)
    gx = _correlate3(smoothed, SOBEL_GX)
    gy = _correlate3(smoothed, SOBEL_GY)
    mag = np.sqrt(gx * gx + gy * gy)

    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    mp = np.pad(mag, 1, mode="edge")
    h, w = mag.shape
    west, east = mp[1 : 1 + h, 0:w], mp[1 : 1 + h, 2 : 2 + w]
    north, south = mp[0:h, 1 : 1 + w], mp[2 : 2 + h, 1 : 1 + w]
    nw, se = mp[0:h, 0:w], mp[2 : 2 + h, 2 : 2 + w]
    ne, sw = mp[0:h, 2 : 2 + w], mp[2 : 2 + h, 0:w]

    bin0 = (angle < 22.5) | (angle >= 157.5)  # horizontal gradient: E-W pair
    bin45 = (angle >= 22.5) & (angle < 67.5)  # NE-SW pair
    bin90 = (angle >= 67.5) & (angle < 112.5)  # vertical gradient: N-S pair
    bin135 = (angle >= 112.5) & (angle < 157.5)  # NW-SE pair

    keep = np.zeros((h, w), dtype=bool)
    keep |= bin0 & (mag > west) & (mag >= east)
    keep |= bin45 & (mag > sw) & (mag >= ne)
    keep |= bin90 & (mag > north) & (mag >= south)
    keep |= bin135 & (mag > nw) & (mag >= se)
    nms = np.where(keep, mag, 0.0)

    strong = nms >= p.high_threshold
    weak = nms >= p.low_threshold
    edges = strong.copy()
    stack = list(zip(*np.nonzero(strong)))
    while stack:
        r, c = stack.pop()
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                rr, cc = r + dr, c + dc
                if 0 <= rr < h and 0 <= cc < w and weak[rr, cc] and not edges[rr, cc]:
                    edges[rr, cc] = True
                    stack.append((rr, cc))
    return BinaryMask(edges)


def _disc_offsets(radius: float) -> list:
    """Integer offsets (dy, dx) with dy^2 + dx^2 <= radius^2, center included."""
    r = int(np.floor(radius))
    r2 = radius * radius
    return [
        (dy, dx)
        for dy in range(-r, r + 1)
        for dx in range(-r, r + 1)
        if dy * dy + dx * dx <= r2
    ]


def remove_outliers(img: GrayRaster, p: OutlierParams = OutlierParams()) -> GrayRaster:
    """Replace pixels deviating from their disc median beyond the threshold.

    The median is taken over all pixels within Euclidean distance
    p.radius of the center (center included, replicate padding at the
    border); ties use the lower median so byte arithmetic stays exact.
    Every replacement is computed from the original image, so the result
    is independent of scan order.
    """
    offsets = _disc_offsets(p.radius)
    r = int(np.floor(p.radius))
    padded = np.pad(img.pixels, r, mode="edge")
    h, w = img.pixels.shape
    stack = np.empty((len(offsets), h, w), dtype=np.uint8)
    for i, (dy, dx) in enumerate(offsets):
        stack[i] = padded[r + dy : r + dy + h, r + dx : r + dx + w]
    mid = (len(offsets) - 1) // 2
    median = np.partition(stack, mid, axis=0)[mid]

    src = img.pixels.astype(np.int16)
    med = median.astype(np.int16)
    if p.direction == "bright":
        replace = (src - med) > p.threshold
    elif p.direction == "dark":
        replace = (med - src) > p.threshold
    else:
        replace = np.abs(src - med) > p.threshold
    return GrayRaster(np.where(replace, median, img.pixels))


def threshold_band(img: GrayRaster, b: BandThreshold = BandThreshold()) -> BinaryMask:
    """Mark pixels with lower <= value <= upper (inclusive both ends).

    True bits are the features of interest; the extraction pipeline
    treats the complement as candidate open space.
    """
    v = img.pixels
    return BinaryMask((v >= b.lower) & (v <= b.upper))


def vegetation_mask(img: ColorRaster, exg_threshold: float = 40.0) -> BinaryMask:
    """Mark greenish pixels via the excess-green index 2g - r - b."""
    rgb = img.pixels.astype(np.int32)
    exg = 2 * rgb[:, :, 1] - rgb[:, :, 0] - rgb[:, :, 2]
    return BinaryMask(exg > exg_threshold)


def texture_mask(img: GrayRaster, window: int = 5, var_threshold: float = 300.0) -> BinaryMask:
    """Mark pixels whose windowed population variance exceeds the threshold.

    The window is window x window, replicate padded. Variance is computed
    from exact integer sums, so results are deterministic.
    """
    if window % 2 == 0 or window < 3:
        raise ValueError(f"texture window must be odd and >= 3, got {window}")
    r = window // 2
    padded = np.pad(img.pixels, r, mode="edge").astype(np.int64)
    h, w = img.pixels.shape
    n = window * window
    s = np.zeros((h, w), dtype=np.int64)
    s2 = np.zeros((h, w), dtype=np.int64)
    for dy in range(window):
        for dx in range(window):
            block = padded[dy : dy + h, dx : dx + w]
            s += block
            s2 += block * block
    var = (s2.astype(np.float64) - s.astype(np.float64) ** 2 / n) / n
    return BinaryMask(var > var_threshold)
