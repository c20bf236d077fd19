"""Two-stage open-space extraction.

Stage one runs the filtering chain (edge detection, inversion, gradient,
outlier removal, band thresholding) and keeps high-confidence regions,
including a minimum-width constraint. Stage two reuses the color
statistics of the stage-one mask to admit smaller regions of matching
spectrum, with the width constraint relaxed, then recomputes labels and
statistics on the union.

Each chain stage can be toggled off through PipelineConfig, and the
band polarity ('complement' treats out-of-band pixels as open space,
'band' the opposite) is configurable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .filters import (
    BandThreshold,
    CannyParams,
    OutlierParams,
    canny_edges,
    remove_outliers,
    sobel_magnitude,
    texture_mask,
    threshold_band,
    vegetation_mask,
)
from .raster import BinaryMask, ColorRaster, clamp_to_gray, invert, mask_to_gray, to_gray
from .segment import (
    Connectivity,
    LabelMap,
    RegionFilterConfig,
    filter_regions,
    label_components,
    region_stats,
)

__all__ = [
    "SpectrumStats",
    "PipelineConfig",
    "ExtractionResult",
    "stage_one",
    "spectrum_stats",
    "stage_two",
    "extract",
]

POLARITIES = ("complement", "band")


@dataclass(frozen=True)
class SpectrumStats:
    """Per-channel population mean and standard deviation over a mask."""

    mean: tuple  # (r, g, b)
    std: tuple  # (r, g, b)
    sample_count: int


@dataclass(frozen=True)
class PipelineConfig:
    canny: CannyParams = field(default_factory=CannyParams)
    outlier: OutlierParams = field(default_factory=OutlierParams)
    band: BandThreshold = field(default_factory=BandThreshold)
    connectivity: Connectivity = Connectivity.EIGHT
    # Stage two drops the width constraint and waives the texture rule:
    # the 5x5 variance window always flags the rim of a small region
    # against its surroundings, and the spectrum test is the stage-two
    # discriminator anyway.
    stage1_filter: RegionFilterConfig = field(default_factory=RegionFilterConfig)
    stage2_filter: RegionFilterConfig = field(
        default_factory=lambda: RegionFilterConfig(min_width=0.0, max_texture_fraction=1.0)
    )
    spectrum_k: float = 2.0
    polarity: str = "complement"
    vegetation_exg_threshold: float = 40.0
    texture_window: int = 5
    texture_var_threshold: float = 300.0
    enable_canny: bool = True
    enable_invert: bool = True
    enable_sobel: bool = True
    enable_outlier_removal: bool = True

    def __post_init__(self):
        if self.spectrum_k < 0:
            raise ValueError(f"spectrum_k must be >= 0, got {self.spectrum_k}")
        if self.polarity not in POLARITIES:
            raise ValueError(f"polarity must be one of {POLARITIES}, got {self.polarity!r}")
        if not isinstance(self.connectivity, Connectivity):
            object.__setattr__(self, "connectivity", Connectivity(self.connectivity))


@dataclass(frozen=True)
class ExtractionResult:
    open_mask: BinaryMask
    label_map: LabelMap
    regions: list
    spectrum: SpectrumStats | None
    stage1_mask: BinaryMask
    warning: str | None = None


def _require_size(img: ColorRaster):
    if img.width < 3 or img.height < 3:
        raise ValueError(f"extraction needs at least a 3x3 image, got {img.width}x{img.height}")


def _candidate_mask(img: ColorRaster, cfg: PipelineConfig) -> BinaryMask:
    """Run the filtering chain and return the open-space candidate mask."""
    cur = to_gray(img)
    if cfg.enable_canny:
        cur = mask_to_gray(canny_edges(cur, cfg.canny))
    if cfg.enable_invert:
        cur = invert(cur)
    if cfg.enable_sobel:
        cur = clamp_to_gray(sobel_magnitude(cur))
    if cfg.enable_outlier_removal:
        cur = remove_outliers(cur, cfg.outlier)
    band = threshold_band(cur, cfg.band)
    if cfg.polarity == "complement":
        return BinaryMask(~band.bits)
    return band


def _reject_masks(img: ColorRaster, cfg: PipelineConfig) -> tuple:
    veg = vegetation_mask(img, cfg.vegetation_exg_threshold)
    tex = texture_mask(to_gray(img), cfg.texture_window, cfg.texture_var_threshold)
    return veg, tex


def stage_one(img: ColorRaster, cfg: PipelineConfig | None = None) -> tuple:
    """High-confidence extraction: filtering chain, labeling, and the full
    region filter including the minimum-width constraint.

    Returns (LabelMap, BinaryMask) of surviving regions.
    """
    cfg = cfg or PipelineConfig()
    _require_size(img)
    candidates = _candidate_mask(img, cfg)
    lm = label_components(candidates, cfg.connectivity)
    veg, tex = _reject_masks(img, cfg)
    filtered = filter_regions(lm, region_stats(lm), cfg.stage1_filter, veg, tex)
    return filtered, filtered.mask()


def spectrum_stats(img: ColorRaster, mask: BinaryMask) -> SpectrumStats:
    """Per-channel population mean/std of the masked pixels."""
    if (mask.height, mask.width) != (img.height, img.width):
        raise ValueError(
            f"mask {mask.width}x{mask.height} does not match image {img.width}x{img.height}"
        )
    selected = img.pixels[mask.bits]
    if selected.size == 0:
        raise ValueError("spectrum_stats needs at least one masked pixel")
    values = selected.astype(np.float64)
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    return SpectrumStats(
        mean=(float(mean[0]), float(mean[1]), float(mean[2])),
        std=(float(std[0]), float(std[1]), float(std[2])),
        sample_count=int(selected.shape[0]),
    )


def _spectrum_accepts(spectrum: SpectrumStats, candidate_mean, k: float) -> bool:
    for c in range(3):
        tolerance = k * max(spectrum.std[c], 1.0)
        if abs(candidate_mean[c] - spectrum.mean[c]) > tolerance:
            return False
    return True


def stage_two(img: ColorRaster, stage1: tuple, cfg: PipelineConfig | None = None) -> ExtractionResult:
    """Spectrum-guided recovery of regions missed by stage one.

    Relabels the candidate mask under the stage-two filter (no width
    constraint) and admits regions whose mean color lies within
    spectrum_k standard deviations per channel of the stage-one
    spectrum (std floored at 1.0). The final map and statistics are
    recomputed on the union with the stage-one mask.
    """
    cfg = cfg or PipelineConfig()
    lm1, mask1 = stage1
    if mask1.count() == 0:
        return ExtractionResult(
            open_mask=mask1,
            label_map=lm1,
            regions=region_stats(lm1),
            spectrum=None,
            stage1_mask=mask1,
            warning="stage-one mask is empty; no spectrum available, stage two skipped",
        )
    spectrum = spectrum_stats(img, mask1)

    candidates = _candidate_mask(img, cfg)
    lm2 = label_components(candidates, cfg.connectivity)
    veg, tex = _reject_masks(img, cfg)
    survivors = filter_regions(lm2, region_stats(lm2), cfg.stage2_filter, veg, tex)

    final = mask1.bits.copy()
    for label in range(1, survivors.region_count + 1):
        region = survivors.labels == label
        if (region & mask1.bits).any():
            continue  # already extracted in stage one
        mean = img.pixels[region].astype(np.float64).mean(axis=0)
        if _spectrum_accepts(spectrum, mean, cfg.spectrum_k):
            final |= region

    open_mask = BinaryMask(final)
    final_lm = label_components(open_mask, cfg.connectivity)
    return ExtractionResult(
        open_mask=open_mask,
        label_map=final_lm,
        regions=region_stats(final_lm),
        spectrum=spectrum,
        stage1_mask=mask1,
    )


def extract(img: ColorRaster, cfg: PipelineConfig | None = None) -> ExtractionResult:
    """Full two-stage extraction; pure function of (image, config)."""
    cfg = cfg or PipelineConfig()
    _require_size(img)
    return stage_two(img, stage_one(img, cfg), cfg)
