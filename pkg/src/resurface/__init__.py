"""Model-agnostic removal of localized high-variation patches from images.

Pipeline: tile the image into k x k blocks per channel, score each block
by its total variation, flag channel-wise IQR outliers, zero the flagged
blocks, inpaint the holes, and compose the cleansed image.
"""

from .blocks import (
    BlockSet,
    ImageTensor,
    Mask,
    MaskSet,
    block_to_image,
    image_to_block,
    mask_to_image,
)
from .detector import DetectorConfig, TvGrid, flag_blocks, iqr_threshold, score_grid, tv_score
from .errors import (
    BridgeError,
    ConfigError,
    DegenerateBlockError,
    DomainError,
    PlacementError,
    ResurfaceError,
    ShapeError,
    StatisticsError,
    TilingError,
)
from .harness import (
    DetectionReport,
    PatchSpec,
    evaluate_detection,
    export_surface,
    inject_patches,
    load_surface,
)
from .pipeline import (
    ResurfaceConfig,
    ResurfaceResult,
    available_inpainters,
    compose,
    crop_and_mask,
    inpaint,
    register_inpainter,
    resurface,
)
from .pngio import load_image, load_pixel_mask, save_image, save_mask, save_pixel_mask

__version__ = "0.1.0"
