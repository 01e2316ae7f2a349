"""PNG ingest and egress.

Images travel as 8-bit RGB PNG.  On ingest an intensity v becomes
v / 255; on egress it becomes round(v * 255) clamped to [0, 255].
Anything that is not square 8-bit RGB (alpha, palette, grayscale) is
rejected rather than silently converted.
"""

from __future__ import annotations

import io
import os
from pathlib import Path

import numpy as np
from PIL import Image

from .blocks import Mask, ImageTensor
from .errors import DomainError, ShapeError

__all__ = [
    "load_image",
    "save_image",
    "image_to_png_bytes",
    "save_mask",
    "load_pixel_mask",
    "save_pixel_mask",
    "write_bytes_atomic",
]


def write_bytes_atomic(path, data: bytes) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def load_image(path) -> ImageTensor:
    with Image.open(path) as im:
        if im.mode != "RGB":
            raise DomainError(
                f"{path}: expected 8-bit RGB PNG, got mode {im.mode!r} "
                "(alpha and non-RGB inputs are rejected)"
            )
        if im.width != im.height:
            raise ShapeError(f"{path}: expected a square image, got {im.width}x{im.height}")
        arr = np.asarray(im, dtype=np.float64) / 255.0  # (n, n, 3)
    return ImageTensor(arr.transpose(2, 0, 1))


def _to_uint8(data: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(data * 255.0), 0, 255).astype(np.uint8)


def image_to_png_bytes(img: ImageTensor) -> bytes:
    arr = _to_uint8(img.data).transpose(1, 2, 0)  # (n, n, 3)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def save_image(img: ImageTensor, path) -> None:
    write_bytes_atomic(path, image_to_png_bytes(img))


def save_mask(mask: Mask, path) -> None:
    """Write a per-channel binary mask as RGB PNG with entries 0 or 255."""
    arr = (mask.data.transpose(1, 2, 0) * 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(arr, mode="RGB").save(buf, format="PNG")
    write_bytes_atomic(path, buf.getvalue())


def save_pixel_mask(mask: np.ndarray, path) -> None:
    """Write a spatial (n, n) binary mask as grayscale PNG, 0 or 255."""
    arr = (np.asarray(mask) != 0).astype(np.uint8) * 255
    if arr.ndim != 2:
        raise ShapeError(f"pixel mask must be 2-D, got shape {arr.shape}")
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L").save(buf, format="PNG")
    write_bytes_atomic(path, buf.getvalue())


def load_pixel_mask(path) -> np.ndarray:
    """Read a grayscale mask PNG back to a {0, 1} uint8 array."""
    with Image.open(path) as im:
        if im.mode != "L":
            raise DomainError(f"{path}: expected grayscale mask PNG, got mode {im.mode!r}")
        arr = np.asarray(im, dtype=np.uint8)
    return (arr >= 128).astype(np.uint8)
