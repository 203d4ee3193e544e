from __future__ import annotations

import numpy as np
import pytest
from PIL import Image as PILImage

from duba.imagecore import Image


def random_image(rng: np.random.Generator, h: int, w: int, channels: int = 3) -> Image:
    return Image(rng.random((h, w, channels)))


def byte_image(rng: np.random.Generator, h: int, w: int, channels: int = 3) -> Image:
    """Image whose values sit exactly on the 8-bit grid, like decoded files."""
    return Image(rng.integers(0, 256, size=(h, w, channels)).astype(np.float64) / 255.0)


def write_png(path, array_u8: np.ndarray) -> None:
    arr = np.asarray(array_u8, dtype=np.uint8)
    pil = PILImage.fromarray(arr[:, :, 0] if arr.ndim == 3 and arr.shape[2] == 1 else arr)
    pil.save(path, format="PNG")


def build_dataset(root, classes, per_class: int, size: int = 32, seed: int = 7) -> int:
    """Synthetic class-folder dataset of random byte PNGs; returns N."""
    rng = np.random.default_rng(seed)
    for name in classes:
        cdir = root / name
        cdir.mkdir(parents=True)
        for i in range(per_class):
            write_png(cdir / f"{name}_{i:04d}.png", rng.integers(0, 256, (size, size, 3)))
    return len(classes) * per_class


def _photo_crops() -> list[np.ndarray]:
    from skimage import data

    sources = [
        (data.astronaut(), [(0, 0), (0, 288), (288, 0), (288, 288)]),
        (data.coffee(), [(50, 30), (50, 340)]),
        (data.chelsea(), [(38, 50), (38, 227)]),
        (data.rocket(), [(100, 50), (100, 380)]),
        (data.immunohistochemistry(), [(0, 0), (288, 288)]),
    ]
    crops = []
    for photo, offsets in sources:
        for top, left in offsets:
            crops.append(photo[top : top + 224, left : left + 224, :])
    return crops


@pytest.fixture(scope="session")
def photos_224() -> list[Image]:
    """Twelve natural 224x224 photo crops (byte-grid values)."""
    return [Image(c.astype(np.float64) / 255.0) for c in _photo_crops()]


@pytest.fixture(scope="session")
def natural_trigger() -> Image:
    """A 64x64 textured crop (cat fur) used as the trigger image."""
    from skimage import data

    fur = data.chelsea()[120:184, 240:304, :]
    return Image(fur.astype(np.float64) / 255.0)
