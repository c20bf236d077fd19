"""Synthetic urban scene generator for demos and verification.

Builds a deterministic 256x256 scene with known ground truth: one large
bright open area, a small same-spectrum patch below the stage-one width
limit, a 3-pixel-wide road of the same material, dark building blocks,
high-variance green tree patches, and one off-spectrum decoy patch.

The matching extraction config disables the edge-filter stages so that
the band threshold operates on the raw grayscale; every region filter
keeps its default value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pipeline import PipelineConfig
from .raster import BinaryMask, ColorRaster

__all__ = ["SceneTruth", "build_scene", "scene_config"]

OPEN_COLOR = (168, 160, 150)
BACKGROUND_COLOR = (32, 30, 28)
BUILDING_COLOR = (44, 42, 48)
TREE_COLOR = (55, 110, 50)
DECOY_COLOR = (60, 80, 200)


@dataclass(frozen=True)
class SceneTruth:
    """Planted pixel sets of a synthetic scene."""

    open_region: BinaryMask
    small_patch: BinaryMask
    road: BinaryMask
    trees: BinaryMask
    decoy: BinaryMask


def _fill(img, rows, cols, color, rng, sigma):
    r0, r1 = rows
    c0, c1 = cols
    block = np.array(color, dtype=np.float64) + rng.normal(
        0.0, sigma, size=(r1 - r0, c1 - c0, 3)
    )
    img[r0:r1, c0:c1] = np.clip(np.floor(block + 0.5), 0, 255)


def build_scene(seed: int = 0, open_rows=(60, 150), open_cols=(40, 140), size: int = 256):
    """Return (ColorRaster, SceneTruth) for one scene variant.

    open_rows/open_cols shrink across dates to mimic a city losing open
    ground over time.
    """
    rng = np.random.default_rng(seed)
    img = np.zeros((size, size, 3), dtype=np.float64)
    _fill(img, (0, size), (0, size), BACKGROUND_COLOR, rng, 5.0)

    truth = {name: np.zeros((size, size), dtype=bool) for name in
             ("open_region", "small_patch", "road", "trees", "decoy")}

    _fill(img, open_rows, open_cols, OPEN_COLOR, rng, 6.0)
    truth["open_region"][open_rows[0]:open_rows[1], open_cols[0]:open_cols[1]] = True

    # Tree patches: green, high variance (uniform +-60 per channel).
    for rows, cols in (((15, 55), (15, 55)), ((155, 195), (150, 190))):
        base = np.array(TREE_COLOR, dtype=np.float64)
        block = base + rng.uniform(-60, 60, size=(rows[1] - rows[0], cols[1] - cols[0], 3))
        img[rows[0]:rows[1], cols[0]:cols[1]] = np.clip(np.floor(block + 0.5), 0, 255)
        truth["trees"][rows[0]:rows[1], cols[0]:cols[1]] = True

    _fill(img, (20, 45), (170, 210), BUILDING_COLOR, rng, 2.0)
    _fill(img, (100, 130), (180, 220), BUILDING_COLOR, rng, 2.0)

    _fill(img, (200, 203), (10, 240), OPEN_COLOR, rng, 6.0)
    truth["road"][200:203, 10:240] = True

    _fill(img, (170, 176), (60, 66), OPEN_COLOR, rng, 6.0)
    truth["small_patch"][170:176, 60:66] = True

    _fill(img, (170, 176), (200, 206), DECOY_COLOR, rng, 6.0)
    truth["decoy"][170:176, 200:206] = True

    raster = ColorRaster(img.astype(np.uint8))
    return raster, SceneTruth(**{k: BinaryMask(v) for k, v in truth.items()})


def scene_config() -> PipelineConfig:
    """Extraction config for build_scene imagery: band threshold applied
    directly to the grayscale (edge stages off), all region filters at
    their defaults."""
    return PipelineConfig(
        enable_canny=False,
        enable_invert=False,
        enable_sobel=False,
        enable_outlier_removal=False,
    )
