"""Color geometry of patch-latent spaces.

Discovers the 3-D subspace in which a latent space organizes color,
parameterizes it with an HSL-like bicone built from probe anchors,
corrects per-timestep drift and spread of flow trajectories, and uses
all of that to observe and steer colors mid-generation. A seeded toy
flow model with known geometry backs the test suite end to end.
"""

from .colorspace import (
    HslColor,
    HslError,
    LabColor,
    RgbColor,
    ciede2000,
    hsl_error,
    hsl_to_rgb,
    parse_hex,
    rgb_to_hsl,
    srgb_to_lab,
)
from .subspace import SubspaceModel, average_patches, fit_pca, inject, project
from .bicone import AnchorSet, build_anchors, decode, decode_raw, encode, regular_anchors
from .timestats import StatsTable, builtin_flux_stats, denormalize, fit_stats, normalize
from .intervene import (
    PatchMask,
    Schedule,
    apply_intervention,
    gamma,
    interpolated,
    load_mask,
    type1,
    type2,
)
from .observe import (
    ColorGrid,
    grid_de00_mean_pixel,
    grid_de00_per_pixel,
    masked_mean_color,
    observe,
    render_ppm,
)
from .toyflow import (
    TIMESTEP_PALETTE,
    AttractorField,
    ProbeSet,
    ToyEmbedder,
    embed_hsl,
    embed_image,
    generate,
    initial_noise,
    make_probe_set,
    sample_path,
    solid_attractor,
    toy_decode,
)
from .tensorio import read_latents, write_latents, save_trajectory, load_trajectory

__version__ = "0.1.0"
