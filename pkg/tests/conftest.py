import numpy as np
import pytest

from openspace import ColorRaster, save_color
from openspace.synthetic import build_scene, scene_config


@pytest.fixture(scope="session")
def scene():
    """Full 256x256 synthetic scene with ground truth."""
    img, truth = build_scene(seed=0)
    return img, truth


@pytest.fixture(scope="session")
def scene_cfg():
    return scene_config()


def make_block_image(size, rects, background=(32, 30, 28), seed=1):
    """Flat-color scene: rects is a list of ((r0, r1), (c0, c1), color)."""
    rng = np.random.default_rng(seed)
    img = np.zeros((size, size, 3), dtype=np.float64)
    img[:, :] = background
    img += rng.normal(0, 1.0, size=img.shape)
    for (r0, r1), (c0, c1), color in rects:
        img[r0:r1, c0:c1] = color
    return ColorRaster(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))


@pytest.fixture
def simple_scene_pngs(tmp_path):
    """Three small dated scenes with shrinking bright blocks, saved as PNGs."""
    paths = {}
    for date, extent in (("2003-02-23", 30), ("2006-02-18", 24), ("2008-01-11", 18)):
        img = make_block_image(
            48, [((8, 8 + extent), (8, 8 + extent), (170, 165, 150))], seed=extent
        )
        p = tmp_path / f"scene_{date}.png"
        save_color(img, p)
        paths[date] = p
    return paths


@pytest.fixture
def stages_off_config(tmp_path):
    """Config file disabling the edge-filter stages (band on raw grayscale)."""
    p = tmp_path / "config.json"
    p.write_text(
        '{"stages": {"canny": false, "invert": false, "sobel": false, "outlier_removal": false}}',
        encoding="utf-8",
    )
    return p
