"""Canonical image container, codecs, resizing, clipping, residuals.

Pixel data is float64 in [0, 1], shaped (height, width, channels) with
channels in {1, 3}. Decoding maps 8-bit samples to [0, 1] by dividing by
255; encoding quantizes with round-half-up and always writes lossless PNG
(the trigger lives in high-frequency coefficients that lossy compression
destroys, so JPEG targets are refused).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import DimensionError, FormatError, NumericError, ShapeError

#: Minimum side length accepted by the codecs and pipeline entry points.
MIN_SIDE = 8

_DECODABLE = {"PNG", "BMP", "JPEG"}
_LOSSY_SUFFIXES = {".jpg", ".jpeg"}
_GRAY_MODES = {"1", "L", "LA", "I", "I;16"}


def _validate(arr: np.ndarray, min_side: int) -> np.ndarray:
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ShapeError(f"expected (H, W) or (H, W, 1|3) data, got shape {arr.shape}")
    if arr.shape[0] < min_side or arr.shape[1] < min_side:
        raise DimensionError(
            f"image sides must be >= {min_side}, got {arr.shape[0]}x{arr.shape[1]}"
        )
    if not np.isfinite(arr).all():
        raise NumericError("image data contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise NumericError("image data outside [0, 1]; clip() it first")
    return arr


@dataclass(frozen=True)
class Image:
    """Immutable float64 image, (H, W, C) with values in [0, 1].

    The wrapped array is made read-only, so instances are safe to share
    between threads.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.data, dtype=np.float64))
        arr = _validate(arr, min_side=2)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape


@dataclass(frozen=True)
class Residual:
    """Signed element-wise difference of two equally shaped images."""

    data: np.ndarray


def from_array(arr, min_side: int = MIN_SIDE) -> Image:
    """Construct an Image from array data already inside [0, 1]."""
    out = np.ascontiguousarray(np.asarray(arr, dtype=np.float64))
    _validate(out, min_side)
    return Image(out)


def load(path) -> Image:
    """Decode a PNG, BMP or JPEG file into a [0, 1] float image.

    Grayscale-like modes decode to 1 channel, everything else to 3
    (palette and alpha variants are coerced to 8-bit L/RGB first).
    """
    try:
        with PILImage.open(path) as pil:
            fmt = pil.format
            if fmt not in _DECODABLE:
                raise FormatError(f"unsupported image format {fmt!r}: {path}")
            pil = pil.convert("L" if pil.mode in _GRAY_MODES else "RGB")
            raw = np.asarray(pil, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise FormatError(f"not a decodable image: {path}") from exc
    if raw.shape[0] < MIN_SIDE or raw.shape[1] < MIN_SIDE:
        raise DimensionError(
            f"image sides must be >= {MIN_SIDE}, got {raw.shape[0]}x{raw.shape[1]}: {path}"
        )
    return Image(raw.astype(np.float64) / 255.0)


def quantize(img: Image) -> np.ndarray:
    """Map [0, 1] values to 8-bit with round-half-up, the PNG byte values."""
    return np.clip(np.floor(img.data * 255.0 + 0.5), 0, 255).astype(np.uint8)


def encode_png(img: Image) -> bytes:
    """Lossless PNG bytes for an image (deterministic for equal pixels)."""
    arr = quantize(img)
    pil = PILImage.fromarray(arr[:, :, 0] if arr.shape[2] == 1 else arr)
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def save(img: Image, path) -> None:
    """Write an image losslessly as PNG (lossy suffixes are refused)."""
    path = Path(path)
    if path.suffix.lower() in _LOSSY_SUFFIXES:
        raise FormatError(
            f"refusing lossy output {path.name}: high-frequency trigger content "
            "does not survive JPEG compression; use .png"
        )
    path.write_bytes(encode_png(img))


def clip(data) -> Image:
    """Clamp array-like data to [0, 1] and wrap it as an Image."""
    arr = np.asarray(data, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise NumericError("cannot clip non-finite values")
    return Image(np.clip(arr, 0.0, 1.0))


def residual(a: Image, b: Image) -> Residual:
    """Element-wise a - b; shapes must match."""
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    return Residual(a.data - b.data)


def _resize_axis(arr: np.ndarray, new_len: int, axis: int, method: str) -> np.ndarray:
    old_len = arr.shape[axis]
    centers = (np.arange(new_len) + 0.5) * (old_len / new_len) - 0.5
    if method == "nearest":
        idx = np.clip(np.rint(centers), 0, old_len - 1).astype(int)
        return np.take(arr, idx, axis=axis)
    lo = np.floor(centers)
    frac = centers - lo
    i0 = np.clip(lo, 0, old_len - 1).astype(int)
    i1 = np.clip(lo + 1, 0, old_len - 1).astype(int)
    a0 = np.take(arr, i0, axis=axis)
    a1 = np.take(arr, i1, axis=axis)
    shape = [1] * arr.ndim
    shape[axis] = new_len
    w = frac.reshape(shape)
    return a0 * (1.0 - w) + a1 * w


def resize_plane(plane: np.ndarray, new_h: int, new_w: int, method: str = "bilinear") -> np.ndarray:
    """Resample a 2-D plane with half-pixel-center sampling, edges clamped."""
    if method not in ("bilinear", "nearest"):
        raise FormatError(f"unknown interpolation method {method!r}")
    if new_h < 2 or new_w < 2:
        raise DimensionError(f"resize target must be >= 2x2, got {new_h}x{new_w}")
    out = plane
    if new_h != plane.shape[0]:
        out = _resize_axis(out, new_h, 0, method)
    if new_w != plane.shape[1]:
        out = _resize_axis(out, new_w, 1, method)
    return out


def resize(img: Image, new_h: int, new_w: int, method: str = "bilinear") -> Image:
    """Resize an image (bilinear by default), output clipped to [0, 1].

    Identity-size targets return the pixels untouched.
    """
    out = resize_plane(img.data, new_h, new_w, method)
    return Image(np.clip(out, 0.0, 1.0))


def center_crop(img: Image, new_h: int, new_w: int) -> Image:
    """Crop the centered new_h x new_w window out of an image."""
    if new_h > img.height or new_w > img.width:
        raise DimensionError(
            f"crop {new_h}x{new_w} exceeds image {img.height}x{img.width}"
        )
    top = (img.height - new_h) // 2
    left = (img.width - new_w) // 2
    return Image(img.data[top : top + new_h, left : left + new_w, :])
