"""Open-space area extraction and change detection for urban raster imagery."""

from .change import (
    ChangeMap,
    ChangeSummary,
    DatedMask,
    change_series,
    despeckle_changes,
    diff_masks,
    summarize,
)
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
from .pipeline import (
    ExtractionResult,
    PipelineConfig,
    SpectrumStats,
    extract,
    spectrum_stats,
    stage_one,
    stage_two,
)
from .raster import (
    BinaryMask,
    ColorRaster,
    GrayRaster,
    ImageMeta,
    ScalarField,
    clamp_to_gray,
    gray_to_color,
    invert,
    load_color,
    mask_to_gray,
    save_color,
    save_gray,
    to_gray,
)
from .report import render_change, render_overlay, write_region_csv, write_summary_json
from .segment import (
    Connectivity,
    LabelMap,
    RegionFilterConfig,
    RegionStats,
    central_pixels,
    filter_regions,
    label_components,
    region_stats,
    region_width,
    shape_ratio,
)

__version__ = "0.1.0"
