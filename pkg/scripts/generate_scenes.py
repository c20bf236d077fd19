#!/usr/bin/env python3
"""Write the three dated synthetic demo scenes and a matching config.

Usage: python scripts/generate_scenes.py [DEST_DIR]

Produces scene_<date>.png files (open ground shrinking over time) plus
config.json with the edge-filter stages disabled, ready for:

  openspace series --config DEST/config.json \
      --inputs 2003-02-23=DEST/scene_2003-02-23.png \
      --inputs 2006-02-18=DEST/scene_2006-02-18.png \
      --inputs 2008-01-11=DEST/scene_2008-01-11.png \
      --out DEST/results
"""

import json
import sys
from pathlib import Path

from openspace import save_color
from openspace.synthetic import build_scene

VARIANTS = [
    ("2003-02-23", 1, (60, 150), (40, 140)),
    ("2006-02-18", 2, (60, 140), (40, 130)),
    ("2008-01-11", 3, (60, 130), (40, 120)),
]


def main() -> int:
    dest = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_scenes")
    dest.mkdir(parents=True, exist_ok=True)
    for date, seed, rows, cols in VARIANTS:
        img, _ = build_scene(seed=seed, open_rows=rows, open_cols=cols)
        path = dest / f"scene_{date}.png"
        save_color(img, path)
        print(f"wrote {path}")
    config = {
        "stages": {"canny": False, "invert": False, "sobel": False, "outlier_removal": False}
    }
    (dest / "config.json").write_text(json.dumps(config, indent=2) + "\n")
    print(f"wrote {dest / 'config.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
