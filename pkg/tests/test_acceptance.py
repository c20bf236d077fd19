"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured result (run with -s to see them).

Oracle-based criteria compare the library against the naive reference
implementations in oracles.py at the stated tolerances and time limits.
"""

import datetime as dt
import json
import time
from contextlib import contextmanager

import numpy as np

from openspace import (
    BinaryMask,
    Connectivity,
    DatedMask,
    GrayRaster,
    ImageMeta,
    OutlierParams,
    RegionFilterConfig,
    RegionStats,
    central_pixels,
    change_series,
    diff_masks,
    extract,
    label_components,
    region_stats,
    remove_outliers,
    save_color,
    sobel_magnitude,
    summarize,
    write_region_csv,
)
from openspace.cli import main
from openspace.synthetic import build_scene, scene_config
from oracles import (
    flood_fill_partition,
    is_connected8,
    label_partition,
    naive_remove_outliers,
    naive_sobel_magnitude,
    random_blob,
)

D1 = dt.date(2003, 2, 23)
D2 = dt.date(2006, 2, 18)
D3 = dt.date(2008, 1, 11)


@contextmanager
def criterion(number, description):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} FAIL: {description}")
        raise
    elapsed = time.perf_counter() - started
    print(f"ACCEPTANCE {number} PASS: {description} ({elapsed:.2f}s)")


def test_criterion_1_sobel_oracle_equivalence():
    with criterion(1, "sobel matches naive correlation oracle within 1e-9 in < 5 s"):
        rng = np.random.default_rng(101)
        start = time.perf_counter()
        for i in range(50):
            h = int(rng.integers(3, 65))
            w = int(rng.integers(3, 65))
            pixels = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
            got = sobel_magnitude(GrayRaster(pixels)).values
            want = naive_sobel_magnitude(pixels)
            scale = np.maximum(np.abs(want), 1.0)
            assert (np.abs(got - want) / scale).max() <= 1e-9
        constant = sobel_magnitude(GrayRaster(np.full((32, 32), 9, dtype=np.uint8)))
        assert (constant.values == 0.0).all()
        assert time.perf_counter() - start < 5.0


def test_criterion_2_outlier_oracle_equivalence():
    with criterion(2, "disc-median outlier removal is bit-exact vs oracle in < 10 s"):
        rng = np.random.default_rng(202)
        radii = [1.5, 2, 3, 5]
        directions = ["bright", "dark", "both"]
        start = time.perf_counter()
        for i in range(50):
            radius = radii[i % len(radii)]
            direction = directions[(i // len(radii)) % len(directions)]
            pixels = rng.integers(0, 256, size=(32, 32), dtype=np.uint8)
            p = OutlierParams(radius=radius, threshold=2, direction=direction)
            got = remove_outliers(GrayRaster(pixels), p).pixels
            want = naive_remove_outliers(pixels, radius, 2, direction)
            assert np.array_equal(got, want), (radius, direction)
            if direction == "bright":
                assert (got.astype(int) <= pixels.astype(int)).all()
        assert time.perf_counter() - start < 10.0


def test_criterion_3_connected_components_oracle():
    with criterion(3, "labeling matches flood-fill partitions on 100 masks in < 10 s"):
        rng = np.random.default_rng(303)
        start = time.perf_counter()
        for i in range(100):
            bits = rng.random((64, 64)) < rng.uniform(0.15, 0.85)
            for conn in (Connectivity.FOUR, Connectivity.EIGHT):
                lm = label_components(BinaryMask(bits), conn)
                assert label_partition(lm.labels) == flood_fill_partition(
                    bits, conn == Connectivity.EIGHT
                )
                areas = np.bincount(lm.labels.ravel(), minlength=lm.region_count + 1)
                assert areas[1:].sum() == bits.sum()
        assert time.perf_counter() - start < 10.0


def test_criterion_4_region_stats_exactness():
    with criterion(4, "region areas/centroids exact and centroids inside bboxes"):
        single = np.zeros((8, 8), dtype=bool)
        single[3, 5] = True
        st0 = region_stats(label_components(BinaryMask(single)))[0]
        assert (st0.area, st0.centroid_x, st0.centroid_y) == (1, 5.0, 3.0)

        block = np.zeros((4, 4), dtype=bool)
        block[0:2, 0:2] = True
        st0 = region_stats(label_components(BinaryMask(block)))[0]
        assert (st0.area, st0.centroid_x, st0.centroid_y) == (4, 0.5, 0.5)

        rng = np.random.default_rng(404)
        for _ in range(10):
            bits = rng.random((48, 48)) < rng.uniform(0.2, 0.7)
            lm = label_components(BinaryMask(bits))
            for st1 in region_stats(lm):
                ys, xs = np.nonzero(lm.labels == st1.label)
                assert st1.area == len(xs)
                assert abs(st1.centroid_x - xs.mean()) <= 1e-9
                assert abs(st1.centroid_y - ys.mean()) <= 1e-9
                min_x, min_y, max_x, max_y = st1.bbox
                assert min_x <= st1.centroid_x <= max_x
                assert min_y <= st1.centroid_y <= max_y


def test_criterion_5_skeleton_properties():
    with criterion(5, "odd squares thin to their center; paths and blobs behave"):
        for k in range(1, 6):
            n = 2 * k + 1
            grid = np.zeros((n + 4, n + 4), dtype=bool)
            grid[2 : 2 + n, 2 : 2 + n] = True
            skel = central_pixels(label_components(BinaryMask(grid)), 1)
            ys, xs = np.nonzero(skel.bits)
            assert len(ys) == 1 and (ys[0], xs[0]) == (2 + k, 2 + k), f"{n}x{n} square"

        horizontal = np.zeros((5, 26), dtype=bool)
        horizontal[2, 3:23] = True
        diagonal = np.zeros((14, 14), dtype=bool)
        np.fill_diagonal(diagonal[1:13, 1:13], True)
        for path in (horizontal, horizontal.T.copy(), diagonal):
            lm = label_components(BinaryMask(path))
            assert np.array_equal(central_pixels(lm, 1).bits, path)

        for seed in range(60):
            blob = random_blob(np.random.default_rng(seed))
            lm = label_components(BinaryMask(blob))
            skel = central_pixels(lm, 1).bits
            region = lm.labels == 1
            assert skel.any()
            assert not (skel & ~region).any()
            assert is_connected8(skel)


def test_criterion_6_change_algebra():
    with criterion(6, "change algebra exact on 200 random pairs; series pattern matches"):
        rng = np.random.default_rng(606)
        for _ in range(200):
            a = rng.random((32, 32)) < 0.5
            b = rng.random((32, 32)) < 0.5
            cm = diff_masks(
                DatedMask(ImageMeta(D1), BinaryMask(a)),
                DatedMask(ImageMeta(D2), BinaryMask(b)),
            )
            overlap = (
                cm.gained.bits.astype(int) + cm.lost.bits.astype(int) + cm.unchanged.bits.astype(int)
            )
            assert (overlap <= 1).all()
            assert ((overlap == 0) == (~a & ~b)).all()
            cs = summarize(cm)
            assert cs.earlier_area == cs.lost_area + cs.unchanged_area == a.sum()
            assert cs.later_area == cs.gained_area + cs.unchanged_area == b.sum()
            swapped = diff_masks(
                DatedMask(ImageMeta(D1), BinaryMask(b)),
                DatedMask(ImageMeta(D2), BinaryMask(a)),
            )
            assert np.array_equal(swapped.gained.bits, cm.lost.bits)
            assert np.array_equal(swapped.lost.bits, cm.gained.bits)
            same = diff_masks(
                DatedMask(ImageMeta(D1), BinaryMask(a)),
                DatedMask(ImageMeta(D2), BinaryMask(a)),
            )
            assert not same.gained.bits.any() and not same.lost.bits.any()

        bits = BinaryMask(np.ones((4, 4), dtype=bool))
        maps = change_series([
            DatedMask(ImageMeta(D2), bits),
            DatedMask(ImageMeta(D1), bits),
            DatedMask(ImageMeta(D3), bits),
        ])
        assert [(m.earlier, m.later) for m in maps] == [(D1, D2), (D2, D3), (D1, D3)]


def test_criterion_7_end_to_end_synthetic_extraction():
    with criterion(7, "256x256 scene: IoU >= 0.8, road excluded, patch recovered, < 30 s"):
        start = time.perf_counter()
        img, truth = build_scene(seed=0)
        assert img.width == 256 and img.height == 256
        cfg = scene_config()
        # ratio/width filters are the library defaults
        assert cfg.stage1_filter == RegionFilterConfig()
        assert cfg.stage1_filter.min_width == 8.0
        assert cfg.stage1_filter.ratio_threshold == 1.0

        res = extract(img, cfg)
        final = res.open_mask.bits
        gt = truth.open_region.bits | truth.small_patch.bits
        iou = (final & gt).sum() / (final | gt).sum()
        assert iou >= 0.8, f"IoU {iou:.3f}"
        assert not (final & truth.road.bits).any(), "road leaked into open mask"
        assert not (res.stage1_mask.bits & truth.small_patch.bits).any()
        assert (final & truth.small_patch.bits).sum() == truth.small_patch.count()
        assert time.perf_counter() - start < 30.0


def test_criterion_8_defaults_and_table_schema(capsys, tmp_path):
    with criterion(8, "printed defaults match the published parameter values; CSV schema exact"):
        rc = main(["extract", "--print-config"])
        out = capsys.readouterr().out
        assert rc == 0
        doc = json.loads(out)
        assert doc["band"]["lower"] == 0
        assert doc["band"]["upper"] == 48
        assert doc["outlier"]["radius"] == 10.0
        assert doc["outlier"]["threshold"] == 2.0
        assert doc["outlier"]["direction"] == "bright"

        path = tmp_path / "regions.csv"
        write_region_csv(
            [RegionStats(1, 33757, 414.899, 265.154, (0, 0, 899, 530), 100.0, 50)], path
        )
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "label,area,centroid_x,centroid_y"
        assert lines[1] == "1,33757,414.899,265.154"


def test_criterion_9_series_determinism(capsys, tmp_path):
    with criterion(9, "two series runs over the same fixtures are byte-identical"):
        fixtures = {}
        for date, seed, rows, cols in (
            ("2003-02-23", 1, (60, 150), (40, 140)),
            ("2006-02-18", 2, (60, 140), (40, 130)),
            ("2008-01-11", 3, (60, 130), (40, 120)),
        ):
            img, _ = build_scene(seed=seed, open_rows=rows, open_cols=cols)
            p = tmp_path / f"fixture_{date}.png"
            save_color(img, p)
            fixtures[date] = p
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps({
            "stages": {"canny": False, "invert": False, "sobel": False, "outlier_removal": False}
        }))

        outs = []
        for name in ("run_a", "run_b"):
            out = tmp_path / name
            argv = ["series", "--config", str(cfg_path), "--out", str(out)]
            for date, p in fixtures.items():
                argv += ["--inputs", f"{date}={p}"]
            assert main(argv) == 0
            outs.append(out)
        capsys.readouterr()

        a, b = outs
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        compared = 0
        for name in names:
            if name.endswith((".csv", ".json")):
                assert (a / name).read_bytes() == (b / name).read_bytes(), name
                compared += 1
        assert compared >= 4  # three CSVs and one summary at minimum
