"""Reading color out of latents mid-flight, plus grid-level color metrics.

An observation decodes every patch of a latent at timestep t through the
normalization map and arranges the colors in the patch grid. Metrics
compare two grids either cell by cell or through their average color;
averaging always happens in linear RGB so that it matches how light
mixes, not how gamma-encoded bytes do.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensorio
from .bicone import AnchorSet, decode
from .colorspace import (
    HslColor,
    ciede2000,
    hsl_to_rgb,
    linear_channel_to_srgb,
    linear_rgb_to_lab,
    rgb_to_hsl,
    srgb_channel_to_linear,
    srgb_to_lab,
    RgbColor,
)
from .intervene import PatchMask
from .subspace import SubspaceModel, project
from .timestats import StatsTable, normalize

__all__ = [
    "ColorGrid",
    "observe",
    "grid_de00_per_pixel",
    "grid_de00_mean_pixel",
    "masked_mean_color",
    "render_ppm",
]


@dataclass(frozen=True)
class ColorGrid:
    """Immutable height x width grid of HslColor cells, row-major."""

    height: int
    width: int
    cells: tuple[HslColor, ...]

    def __post_init__(self) -> None:
        if self.height < 1 or self.width < 1:
            raise ValueError(f"bad grid dims {self.height}x{self.width}")
        cells = tuple(self.cells)
        if len(cells) != self.height * self.width:
            raise ValueError(f"{self.height}x{self.width} grid needs {self.height * self.width} cells, got {len(cells)}")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def solid(cls, color: HslColor, height: int, width: int) -> "ColorGrid":
        return cls(height, width, (color,) * (height * width))

    def to_json_dict(self) -> dict:
        return {
            "height": self.height,
            "width": self.width,
            "cells": [[c.h, c.s, c.l] for c in self.cells],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ColorGrid":
        return cls(
            height=int(obj["height"]),
            width=int(obj["width"]),
            cells=tuple(HslColor(*c) for c in obj["cells"]),
        )

    def save(self, path) -> None:
        tensorio.write_json(path, self.to_json_dict())

    @classmethod
    def load(cls, path) -> "ColorGrid":
        return cls.from_json_dict(tensorio.read_json(path))


def observe(
    z: np.ndarray,
    t: int,
    model: SubspaceModel,
    anchors: AnchorSet,
    stats: StatsTable,
    grid_dims: tuple[int, int],
) -> ColorGrid:
    """Decode every patch of z at timestep t into a color grid.

    grid_dims is (height, width) with height * width equal to the patch
    count; patches are taken in row-major order.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 2:
        raise ValueError(f"expected an (L, d) latent tensor, got shape {z.shape}")
    height, width = grid_dims
    if height * width != z.shape[0]:
        raise ValueError(f"grid {height}x{width} does not cover {z.shape[0]} patches")
    hat = normalize(project(z, model), t, stats)
    return ColorGrid(height, width, tuple(decode(c, anchors) for c in hat))


def _check_same_dims(a: ColorGrid, b: ColorGrid) -> None:
    if (a.height, a.width) != (b.height, b.width):
        raise ValueError(f"grid dims differ: {a.height}x{a.width} vs {b.height}x{b.width}")


def grid_de00_per_pixel(pred: ColorGrid, ref: ColorGrid) -> float:
    """Mean over cells of the CIEDE2000 difference."""
    _check_same_dims(pred, ref)
    total = 0.0
    for p, r in zip(pred.cells, ref.cells):
        total += ciede2000(srgb_to_lab(hsl_to_rgb(p)), srgb_to_lab(hsl_to_rgb(r)))
    return total / len(pred.cells)


def _mean_linear_rgb(cells) -> tuple[float, float, float]:
    acc = np.zeros(3)
    for c in cells:
        rgb = hsl_to_rgb(c)
        acc += (
            srgb_channel_to_linear(rgb.r),
            srgb_channel_to_linear(rgb.g),
            srgb_channel_to_linear(rgb.b),
        )
    acc /= len(cells)
    return float(acc[0]), float(acc[1]), float(acc[2])


def grid_de00_mean_pixel(pred: ColorGrid, ref: ColorGrid) -> float:
    """CIEDE2000 between the grids' average colors (averaged in linear RGB)."""
    _check_same_dims(pred, ref)
    lab_p = linear_rgb_to_lab(*_mean_linear_rgb(pred.cells))
    lab_r = linear_rgb_to_lab(*_mean_linear_rgb(ref.cells))
    return ciede2000(lab_p, lab_r)


def masked_mean_color(grid: ColorGrid, mask: PatchMask) -> HslColor:
    """Average color of the masked cells, mixed in linear RGB."""
    if mask.L != len(grid.cells):
        raise ValueError(f"mask is for L = {mask.L} cells, grid has {len(grid.cells)}")
    if not mask.selected:
        raise ValueError("empty mask: no cells to average")
    picked = [grid.cells[i] for i in sorted(mask.selected)]
    lin = _mean_linear_rgb(picked)
    return rgb_to_hsl(RgbColor(*(linear_channel_to_srgb(v) for v in lin)))


def render_ppm(grid: ColorGrid, cell_px: int = 1) -> bytes:
    """Render the grid as a binary PPM (P6, maxval 255).

    Each cell becomes a cell_px x cell_px block of its 8-bit sRGB color.
    """
    if cell_px < 1:
        raise ValueError("cell_px must be >= 1")
    w = grid.width * cell_px
    h = grid.height * cell_px
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    rows = bytearray()
    for gy in range(grid.height):
        row = bytearray()
        for gx in range(grid.width):
            px = bytes(hsl_to_rgb(grid.cells[gy * grid.width + gx]).to_8bit())
            row += px * cell_px
        rows += bytes(row) * cell_px
    return header + bytes(rows)
