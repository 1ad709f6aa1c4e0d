#!/usr/bin/env python3
"""Write the eight labeled probe latents for `latentcolor fit`.

Each probe is the toy embedding of a solid plain-color image. The output
directory will contain red.lt .. magenta.lt plus black.lt and white.lt.
"""

import argparse
from pathlib import Path

from latentcolor import ColorGrid, ToyEmbedder, embed_image, write_latents
from latentcolor.toyflow import probe_colors


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="probes", help="output directory")
    ap.add_argument("--toy-seed", type=int, default=0, help="embedder seed")
    ap.add_argument("--dim", type=int, default=16, help="latent dimension")
    ap.add_argument("--grid", type=int, default=8, help="image side in patches")
    args = ap.parse_args()

    e = ToyEmbedder.create(seed=args.toy_seed, d=args.dim)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for label, color in probe_colors().items():
        path = out / f"{label}.lt"
        write_latents(path, embed_image(ColorGrid.solid(color, args.grid, args.grid), e))
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
