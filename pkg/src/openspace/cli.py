"""Batch command-line front end.

Subcommands:
  extract  one image -> mask.png, overlay.png, regions.csv, result.json
  change   two mask images + dates -> change.png, summary.json
  series   dated images -> per-date artifacts, change PNGs, summary.json

Configuration precedence is built-in defaults < JSON config file <
command-line flags, observable via --print-config.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .change import DatedMask, despeckle_changes, diff_masks, summarize
from .filters import BandThreshold, CannyParams, OutlierParams
from .pipeline import PipelineConfig, extract
from .raster import BinaryMask, ColorRaster, ImageMeta, load_color, mask_to_gray, save_color, save_gray
from .report import render_change, render_overlay, write_region_csv, write_summary_json
from .segment import Connectivity, RegionFilterConfig

__all__ = ["RunManifest", "main", "config_to_dict", "config_from_dict"]


@dataclass(frozen=True)
class RunManifest:
    """One CLI invocation: command, dated inputs, config source, output dir."""

    command: str
    inputs: list  # [(Path, ImageMeta | None)]
    config_path: Path | None
    output_dir: Path

    def __post_init__(self):
        if self.command not in ("extract", "change", "series"):
            raise ValueError(f"unknown command {self.command!r}")
        if not self.inputs:
            raise ValueError("at least one input is required")


# ---------------------------------------------------------------------------
# configuration plumbing


def config_to_dict(cfg: PipelineConfig) -> dict:
    def filt(f: RegionFilterConfig) -> dict:
        return {
            "min_area": f.min_area,
            "min_width": f.min_width,
            "ratio_threshold": f.ratio_threshold,
            "ratio_direction": f.ratio_direction,
            "max_vegetation_fraction": f.max_vegetation_fraction,
            "max_texture_fraction": f.max_texture_fraction,
        }

    return {
        "canny": {
            "gaussian_sigma": cfg.canny.gaussian_sigma,
            "low_threshold": cfg.canny.low_threshold,
            "high_threshold": cfg.canny.high_threshold,
        },
        "outlier": {
            "radius": cfg.outlier.radius,
            "threshold": cfg.outlier.threshold,
            "direction": cfg.outlier.direction,
        },
        "band": {"lower": cfg.band.lower, "upper": cfg.band.upper},
        "connectivity": int(cfg.connectivity),
        "polarity": cfg.polarity,
        "spectrum_k": cfg.spectrum_k,
        "vegetation_exg_threshold": cfg.vegetation_exg_threshold,
        "texture_window": cfg.texture_window,
        "texture_var_threshold": cfg.texture_var_threshold,
        "stages": {
            "canny": cfg.enable_canny,
            "invert": cfg.enable_invert,
            "sobel": cfg.enable_sobel,
            "outlier_removal": cfg.enable_outlier_removal,
        },
        "stage1_filter": filt(cfg.stage1_filter),
        "stage2_filter": filt(cfg.stage2_filter),
    }


def _merge(base: dict, override: dict, prefix: str = "") -> dict:
    out = dict(base)
    for key, value in override.items():
        dotted = f"{prefix}{key}"
        if key not in base:
            raise ValueError(f"unknown config key: {dotted}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ValueError(f"config key {dotted} must be an object")
            out[key] = _merge(base[key], value, prefix=f"{dotted}.")
        else:
            out[key] = value
    return out


def config_from_dict(doc: dict) -> PipelineConfig:
    merged = _merge(config_to_dict(PipelineConfig()), doc)
    return _build_config(merged)


def _build_config(d: dict) -> PipelineConfig:
    return PipelineConfig(
        canny=CannyParams(**d["canny"]),
        outlier=OutlierParams(**d["outlier"]),
        band=BandThreshold(**d["band"]),
        connectivity=Connectivity(d["connectivity"]),
        stage1_filter=RegionFilterConfig(**d["stage1_filter"]),
        stage2_filter=RegionFilterConfig(**d["stage2_filter"]),
        spectrum_k=d["spectrum_k"],
        polarity=d["polarity"],
        vegetation_exg_threshold=d["vegetation_exg_threshold"],
        texture_window=d["texture_window"],
        texture_var_threshold=d["texture_var_threshold"],
        enable_canny=d["stages"]["canny"],
        enable_invert=d["stages"]["invert"],
        enable_sobel=d["stages"]["sobel"],
        enable_outlier_removal=d["stages"]["outlier_removal"],
    )


def _load_config_file(path: Path) -> dict:
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ValueError(f"bad config {path}: top level must be an object")
    return doc


def _effective_config(args) -> PipelineConfig:
    doc = config_to_dict(PipelineConfig())
    if getattr(args, "config", None):
        doc = _merge(doc, _load_config_file(Path(args.config)))

    flag_map = {
        "lower": ("band", "lower"),
        "upper": ("band", "upper"),
        "radius": ("outlier", "radius"),
        "outlier_threshold": ("outlier", "threshold"),
        "outlier_direction": ("outlier", "direction"),
        "connectivity": ("connectivity",),
        "spectrum_k": ("spectrum_k",),
        "polarity": ("polarity",),
        "min_width": ("stage1_filter", "min_width"),
        "min_area": ("stage1_filter", "min_area"), # mirrored onto stage 2 below
        "ratio_threshold": ("stage1_filter", "ratio_threshold"),
        "ratio_direction": ("stage1_filter", "ratio_direction"),
    }
    mirrored = {"min_area", "ratio_threshold", "ratio_direction"}
    for flag, keys in flag_map.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        node = doc
        for key in keys[:-1]:
            node = node[key]
        node[keys[-1]] = value
        if flag in mirrored:
            doc["stage2_filter"][keys[-1]] = value
    return _build_config(doc)


# ---------------------------------------------------------------------------
# output helpers


def _mask_from_image(path) -> BinaryMask:
    img = load_color(path)
    return BinaryMask(img.pixels.max(axis=2) > 0)


def _region_json(regions: list) -> list:
    return [
        {
            "label": st.label,
            "area": st.area,
            "centroid_x": st.centroid_x,
            "centroid_y": st.centroid_y,
            "bbox": list(st.bbox),
            "width_estimate": st.width_estimate,
            "central_pixel_count": st.central_pixel_count,
        }
        for st in regions
    ]


def _write_json(doc: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _run_extract_one(img: ColorRaster, cfg: PipelineConfig, out: Path, stem_suffix: str = ""):
    result = extract(img, cfg)
    save_gray(mask_to_gray(result.open_mask), out / f"mask{stem_suffix}.png")
    save_color(render_overlay(img, result.open_mask), out / f"overlay{stem_suffix}.png")
    write_region_csv(result.regions, out / f"regions{stem_suffix}.csv")
    return result


def _result_json(result, input_path, img: ColorRaster) -> dict:
    spectrum = None
    if result.spectrum is not None:
        spectrum = {
            "mean": list(result.spectrum.mean),
            "std": list(result.spectrum.std),
            "sample_count": result.spectrum.sample_count,
        }
    return {
        "input": str(input_path),
        "width": img.width,
        "height": img.height,
        "open_area": result.open_mask.count(),
        "stage1_area": result.stage1_mask.count(),
        "region_count": result.label_map.region_count,
        "regions": _region_json(result.regions),
        "spectrum": spectrum,
        "warning": result.warning,
    }


# ---------------------------------------------------------------------------
# commands


def _cmd_extract(args) -> int:
    cfg = _effective_config(args)
    if args.print_config:
        print(json.dumps(config_to_dict(cfg), indent=2))
        return 0
    if not args.input:
        raise ValueError("extract requires --input")
    manifest = RunManifest(
        command="extract",
        inputs=[(Path(args.input), None)],
        config_path=Path(args.config) if args.config else None,
        output_dir=Path(args.out),
    )
    manifest.output_dir.mkdir(parents=True, exist_ok=True)
    img = load_color(manifest.inputs[0][0])
    result = _run_extract_one(img, cfg, manifest.output_dir)
    _write_json(_result_json(result, manifest.inputs[0][0], img), manifest.output_dir / "result.json")
    if result.warning:
        print(f"warning: {result.warning}", file=sys.stderr)
    print(f"extract: open area {result.open_mask.count()} px in "
          f"{result.label_map.region_count} regions -> {manifest.output_dir}")
    return 0


def _cmd_change(args) -> int:
    before_date = dt.date.fromisoformat(args.before_date)
    after_date = dt.date.fromisoformat(args.after_date)
    manifest = RunManifest(
        command="change",
        inputs=[
            (Path(args.before), ImageMeta(before_date)),
            (Path(args.after), ImageMeta(after_date)),
        ],
        config_path=None,
        output_dir=Path(args.out),
    )
    manifest.output_dir.mkdir(parents=True, exist_ok=True)
    earlier = DatedMask(manifest.inputs[0][1], _mask_from_image(manifest.inputs[0][0]))
    later = DatedMask(manifest.inputs[1][1], _mask_from_image(manifest.inputs[1][0]))
    cm = despeckle_changes(diff_masks(earlier, later), args.min_blob)
    cs = summarize(cm)

    base = ColorRaster(np.zeros((earlier.mask.height, earlier.mask.width, 3), dtype=np.uint8))
    save_color(render_change(cm, base), manifest.output_dir / "change.png")
    write_summary_json(
        {before_date: earlier.mask.count(), after_date: later.mask.count()},
        [(cm, cs)],
        manifest.output_dir / "summary.json",
    )
    print(f"change: {cs.net_change:+d} px net ({cs.gained_area} gained, "
          f"{cs.lost_area} lost) -> {manifest.output_dir}")
    return 0


def _parse_dated_input(value: str) -> tuple:
    date_part, sep, path_part = value.partition("=")
    if not sep or not path_part:
        raise ValueError(f"bad --inputs value {value!r}: expected DATE=PATH")
    try:
        date = dt.date.fromisoformat(date_part)
    except ValueError:
        raise ValueError(f"bad --inputs date {date_part!r}: expected ISO-8601 (YYYY-MM-DD)") from None
    return Path(path_part), ImageMeta(date)


def _cmd_series(args) -> int:
    cfg = _effective_config(args)
    inputs = [_parse_dated_input(value) for value in args.inputs]
    dates = [meta.acquisition_date for _, meta in inputs]
    if len(set(dates)) != len(dates):
        raise ValueError("series dates must be distinct")
    manifest = RunManifest(
        command="series",
        inputs=inputs,
        config_path=Path(args.config) if args.config else None,
        output_dir=Path(args.out),
    )
    manifest.output_dir.mkdir(parents=True, exist_ok=True)

    ordered = sorted(manifest.inputs, key=lambda item: item[1].acquisition_date)
    dated_masks = []
    images = {}
    totals = {}
    for path, meta in ordered:
        img = load_color(path)
        date = meta.acquisition_date
        result = _run_extract_one(img, cfg, manifest.output_dir, stem_suffix=f"_{date.isoformat()}")
        dated_masks.append(DatedMask(meta, result.open_mask))
        images[date] = img
        totals[date] = result.open_mask.count()

    pairs = [(a, b) for a, b in zip(dated_masks, dated_masks[1:])]
    if len(dated_masks) >= 3:
        pairs.append((dated_masks[0], dated_masks[-1]))
    records = []
    for earlier, later in pairs:
        cm = diff_masks(earlier, later)
        records.append((cm, summarize(cm)))
        name = f"change_{cm.earlier.isoformat()}_{cm.later.isoformat()}.png"
        save_color(render_change(cm, images[cm.later]), manifest.output_dir / name)
    write_summary_json(totals, records, manifest.output_dir / "summary.json")
    print(f"series: {len(ordered)} dates, {len(records)} change pairs -> {manifest.output_dir}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openspace",
        description="Open-space area extraction and change detection for urban raster imagery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("extract", help="extract open space from one image")
    ex.add_argument("--input", help="input image (PNG/PGM/PPM)")
    ex.add_argument("--config", help="JSON config file")
    ex.add_argument("--out", default="out", help="output directory (default: out)")
    ex.add_argument("--lower", type=int, help="band lower threshold (default 0)")
    ex.add_argument("--upper", type=int, help="band upper threshold (default 48)")
    ex.add_argument("--radius", type=float, help="outlier disc radius in pixels (default 10)")
    ex.add_argument("--outlier-threshold", type=float, help="outlier deviation threshold (default 2)")
    ex.add_argument("--outlier-direction", choices=["bright", "dark", "both"],
                    help="which deviations to replace (default bright)")
    ex.add_argument("--connectivity", type=int, choices=[4, 8], help="region connectivity (default 8)")
    ex.add_argument("--min-width", type=float, help="stage-one minimum region width")
    ex.add_argument("--min-area", type=int, help="minimum region area in pixels")
    ex.add_argument("--ratio-threshold", type=float, help="shape-ratio threshold")
    ex.add_argument("--ratio-direction", choices=["atleast", "atmost"], help="shape-ratio test direction")
    ex.add_argument("--spectrum-k", type=float, help="stage-two acceptance distance in std units")
    ex.add_argument("--polarity", choices=["band", "complement"],
                    help="which side of the band is open space (default complement)")
    ex.add_argument("--print-config", action="store_true",
                    help="print the effective configuration as JSON and exit")
    ex.set_defaults(func=_cmd_extract)

    ch = sub.add_parser("change", help="diff two previously extracted open-space masks")
    ch.add_argument("--before", required=True, help="earlier mask image (nonzero = open)")
    ch.add_argument("--after", required=True, help="later mask image (nonzero = open)")
    ch.add_argument("--before-date", required=True, help="ISO date of the earlier mask")
    ch.add_argument("--after-date", required=True, help="ISO date of the later mask")
    ch.add_argument("--out", default="out", help="output directory (default: out)")
    ch.add_argument("--min-blob", type=int, default=0,
                    help="drop gained/lost blobs smaller than this many pixels (default 0 = off)")
    ch.set_defaults(func=_cmd_change)

    se = sub.add_parser("series", help="extract dated images and diff the series")
    se.add_argument("--inputs", action="append", required=True, metavar="DATE=PATH",
                    help="dated input image; repeat per date")
    se.add_argument("--config", help="JSON config file")
    se.add_argument("--out", default="out", help="output directory (default: out)")
    se.set_defaults(func=_cmd_series)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
