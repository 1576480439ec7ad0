"""Write the RGB completion fixtures used by the test suite.

Source: scikit-image's bundled ``astronaut`` photograph (NASA, public domain),
reduced by block averaging to 128x128 and 256x256.  Run once; the outputs are
committed.
"""
import argparse
from pathlib import Path

import numpy as np

from tubalcross.imageio import write_image


def block_mean(img, factor):
    h, w, c = img.shape
    h, w = h // factor * factor, w // factor * factor
    img = img[:h, :w].astype(np.float64)
    return img.reshape(h // factor, factor, w // factor, factor, c).mean(axis=(1, 3))


def main():
    from skimage import data

    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default=str(Path(__file__).resolve().parents[1] / "tests" / "data"))
    args = ap.parse_args()
    src = data.astronaut()
    for factor in (4, 2):
        img = block_mean(src, factor)
        path = Path(args.out_dir) / f"astronaut{img.shape[0]}.ppm"
        write_image(img, path)
        print(f"wrote {path} {img.shape}")


if __name__ == "__main__":
    main()
