"""Core raster grid types and image file I/O.

All grids are numpy-backed, row-major, with coordinate convention
(x, y) = (column, row), origin at the top-left, 0-based. Types are
immutable after construction; every operation returns a new value.

Supported interchange formats: PNG (8-bit gray or RGB, via Pillow) and
plain-text PGM (P2) / PPM (P3) for hand-authored fixtures. Round-trips
through these formats are bit-exact.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

__all__ = [
    "ColorRaster",
    "GrayRaster",
    "ScalarField",
    "BinaryMask",
    "ImageMeta",
    "load_color",
    "to_gray",
    "invert",
    "clamp_to_gray",
    "mask_to_gray",
    "save_gray",
    "save_color",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ColorRaster:
    """RGB byte image, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"ColorRaster needs (h, w, 3) pixels, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("ColorRaster needs width >= 1 and height >= 1")
        if arr.dtype != np.uint8:
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("ColorRaster values must lie in 0..255")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", _frozen(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class GrayRaster:
    """Single-channel byte image, shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2:
            raise ValueError(f"GrayRaster needs (h, w) pixels, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("GrayRaster needs width >= 1 and height >= 1")
        if arr.dtype != np.uint8:
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("GrayRaster values must lie in 0..255")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", _frozen(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class ScalarField:
    """Non-negative real-valued grid, shape (height, width).

    Holds intermediate gradient magnitudes at full precision; values are
    quantized to bytes only at pipeline boundaries via clamp_to_gray.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"ScalarField needs (h, w) values, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("ScalarField needs width >= 1 and height >= 1")
        if not np.isfinite(arr).all():
            raise ValueError("ScalarField values must be finite")
        if (arr < 0).any():
            raise ValueError("ScalarField values must be >= 0")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class BinaryMask:
    """Boolean pixel-set grid, shape (height, width)."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 2:
            raise ValueError(f"BinaryMask needs (h, w) bits, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("BinaryMask needs width >= 1 and height >= 1")
        object.__setattr__(self, "bits", _frozen(arr.astype(bool)))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def count(self) -> int:
        """Number of true bits."""
        return int(self.bits.sum())


@dataclass(frozen=True)
class ImageMeta:
    """Acquisition metadata attached to dated imagery."""

    acquisition_date: dt.date
    source_label: str = ""

    def __post_init__(self):
        if isinstance(self.acquisition_date, str):
            object.__setattr__(
                self, "acquisition_date", dt.date.fromisoformat(self.acquisition_date)
            )
        elif not isinstance(self.acquisition_date, dt.date):
            raise ValueError("acquisition_date must be a date or ISO-8601 string")


# ---------------------------------------------------------------------------
# conversions


def to_gray(img: ColorRaster) -> GrayRaster:
    """Convert RGB to luma bytes: round(0.299 r + 0.587 g + 0.114 b).

    Rounding is half-up so the result is deterministic across platforms.
    """
    rgb = img.pixels.astype(np.float64)
    luma = 0.299 * rgb[:, :, 0] + 0.587 * rgb[:, :, 1] + 0.114 * rgb[:, :, 2]
    out = np.floor(luma + 0.5)
    return GrayRaster(np.clip(out, 0, 255).astype(np.uint8))


def invert(img: GrayRaster) -> GrayRaster:
    """Map every pixel v to 255 - v."""
    return GrayRaster(255 - img.pixels)


def clamp_to_gray(f: ScalarField) -> GrayRaster:
    """Quantize a scalar field to bytes: min(round(v), 255), half-up."""
    out = np.floor(f.values + 0.5)
    return GrayRaster(np.minimum(out, 255.0).astype(np.uint8))


def mask_to_gray(mask: BinaryMask) -> GrayRaster:
    """Render a mask as a 0/255 gray image (true = 255)."""
    return GrayRaster(np.where(mask.bits, 255, 0).astype(np.uint8))


def gray_to_color(img: GrayRaster) -> ColorRaster:
    """Expand a gray image to (v, v, v) triples."""
    return ColorRaster(np.repeat(img.pixels[:, :, None], 3, axis=2))


# ---------------------------------------------------------------------------
# file I/O

_PNM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _read_pnm_tokens(data: bytes, count: int, path) -> list[int]:
    tokens = []
    pos = 0
    while len(tokens) < count:
        m = _PNM_TOKEN.match(data, pos)
        if m is None:
            raise ValueError(f"{path}: truncated PGM/PPM data")
        tokens.append(m.group(1))
        pos = m.end()
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ValueError(f"{path}: non-integer token in PGM/PPM data") from None


def _load_pnm(path: Path, data: bytes) -> ColorRaster:
    magic = data[:2]
    channels = 1 if magic == b"P2" else 3
    header = _read_pnm_tokens(data[2:], 3, path)
    w, h, maxval = header
    if w < 1 or h < 1:
        raise ValueError(f"{path}: bad PGM/PPM dimensions {w}x{h}")
    if maxval != 255:
        raise ValueError(f"{path}: unsupported PGM/PPM maxval {maxval} (need 255)")
    # Re-scan from the start so comment handling stays uniform.
    vals = _read_pnm_tokens(data[2:], 3 + w * h * channels, path)[3:]
    if any(v < 0 or v > 255 for v in vals):
        raise ValueError(f"{path}: PGM/PPM sample out of 0..255 range")
    arr = np.array(vals, dtype=np.uint8)
    if channels == 1:
        gray = arr.reshape(h, w)
        return ColorRaster(np.repeat(gray[:, :, None], 3, axis=2))
    return ColorRaster(arr.reshape(h, w, 3))


def load_color(path) -> ColorRaster:
    """Load a PNG / PGM (P2) / PPM (P3) file as an RGB raster.

    Grayscale sources are expanded to (v, v, v) triples. Raises
    FileNotFoundError for a missing path and ValueError for an
    unsupported or corrupt file, naming the path and cause.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"file not found: {p}")
    data = p.read_bytes()
    if data[:2] in (b"P2", b"P3"):
        return _load_pnm(p, data)
    try:
        with Image.open(p) as im:
            if im.mode == "L":
                gray = np.asarray(im, dtype=np.uint8)
                return ColorRaster(np.repeat(gray[:, :, None], 3, axis=2))
            if im.mode != "RGB":
                im = im.convert("RGB")
            return ColorRaster(np.asarray(im, dtype=np.uint8))
    except UnidentifiedImageError:
        raise ValueError(f"{p}: unsupported or corrupt image format") from None
    except OSError as exc:
        raise ValueError(f"{p}: cannot decode image ({exc})") from None


def _check_extension(path: Path, allowed: tuple, kind: str):
    if path.suffix.lower() not in allowed:
        raise ValueError(
            f"{path}: unsupported extension for {kind} output (use one of {', '.join(allowed)})"
        )


def save_gray(img: GrayRaster, path) -> None:
    """Write a gray raster as PNG (.png) or ASCII PGM (.pgm), losslessly."""
    p = Path(path)
    _check_extension(p, (".png", ".pgm"), "grayscale")
    try:
        if p.suffix.lower() == ".pgm":
            lines = [f"P2\n{img.width} {img.height}\n255\n"]
            for row in img.pixels:
                lines.append(" ".join(str(int(v)) for v in row) + "\n")
            p.write_text("".join(lines), encoding="ascii")
        else:
            Image.fromarray(img.pixels, mode="L").save(p, format="PNG")
    except OSError as exc:
        raise OSError(f"cannot write {p}: {exc}") from None


def save_color(img: ColorRaster, path) -> None:
    """Write a color raster as PNG (.png) or ASCII PPM (.ppm), losslessly."""
    p = Path(path)
    _check_extension(p, (".png", ".ppm"), "color")
    try:
        if p.suffix.lower() == ".ppm":
            lines = [f"P3\n{img.width} {img.height}\n255\n"]
            for row in img.pixels:
                lines.append(" ".join(str(int(v)) for v in row.ravel()) + "\n")
            p.write_text("".join(lines), encoding="ascii")
        else:
            Image.fromarray(img.pixels, mode="RGB").save(p, format="PNG")
    except OSError as exc:
        raise OSError(f"cannot write {p}: {exc}") from None
