"""Three-stage construction of dual-domain-stealthy poisoned images.

Stage 1 embeds the trigger image's single-level wavelet detail into the
clean image's level-2 and level-3 detail bands (blend weights beta and
alpha). Stage 2 makes the result spectrally inconspicuous: the Fourier
amplitude of the clean image is re-imposed on the embedded image's phase,
then the two are fused twice in the cosine-transform domain with
intensity lam. Stage 3 subtracts the clean image to isolate the trigger
pattern, suppresses it at randomly chosen pixels and wherever the clean
pixels sit near the 8-bit extremes, and re-applies what is left.

Stage outputs are raw float arrays; nothing is clipped until the final
composition, so the transform-domain algebra stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import imagecore, prng, transforms
from .errors import ConfigError, DimensionError, ShapeError
from .imagecore import Image

#: Pipeline stages accepted by ablation_poison.
STAGES = ("dwt-only", "dwt+fft", "full")


@dataclass(frozen=True)
class TriggerProfile:
    """All knobs for one poisoning phase.

    alpha, beta: retention of the clean image's level-3 / level-2 detail
        (1.0 keeps the clean bands, 0.0 replaces them with the trigger's).
    lam: cosine-domain fusing intensity (0.0 returns the clean image).
    mask_ratio: fraction of pixels whose trigger contribution is zeroed
        by the keyed random mask.
    low_threshold / high_threshold: 8-bit clean-pixel bounds; outside
        (low, high) the trigger is suppressed to stay invisible near
        black and white.
    seed: 64-bit stream seed for the random mask.
    """

    alpha: float
    beta: float
    lam: float
    mask_ratio: float
    low_threshold: int
    high_threshold: int
    seed: int = 0

    def __post_init__(self):
        for name in ("alpha", "beta", "lam", "mask_ratio"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if not 0 <= self.low_threshold <= 255 or not 0 <= self.high_threshold <= 255:
            raise ConfigError("thresholds are 8-bit values in [0, 255]")
        if self.low_threshold >= self.high_threshold:
            raise ConfigError(
                f"low_threshold must be < high_threshold, got "
                f"{self.low_threshold} >= {self.high_threshold}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class TriggerPattern:
    """Signed trigger residual (fused image minus clean image)."""

    data: np.ndarray


def builtin_profiles() -> tuple[TriggerProfile, TriggerProfile]:
    """The (train, attack) profile pair.

    The training profile masks far more of the trigger (30% of pixels
    plus wide 30/220 guard bands) so the victim model must learn a
    scattered pattern; the attack profile retains more clean detail per
    band but masks only 10% behind narrow 5/245 guards. Mask ratios are
    ordered defaults, not canonical values.
    """
    train = TriggerProfile(
        alpha=0.4, beta=0.4, lam=0.7, mask_ratio=0.30,
        low_threshold=30, high_threshold=220,
    )
    attack = TriggerProfile(
        alpha=0.6, beta=0.6, lam=0.7, mask_ratio=0.10,
        low_threshold=5, high_threshold=245,
    )
    return train, attack


def _as_array(img) -> np.ndarray:
    if isinstance(img, Image):
        return img.data
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr


def _match_channels(trigger: np.ndarray, channels: int) -> np.ndarray:
    if trigger.shape[2] == channels:
        return trigger
    if trigger.shape[2] == 1:
        return np.repeat(trigger, channels, axis=2)
    return trigger.mean(axis=2, keepdims=True)


def embed_highfreq(clean: Image, trigger: Image, alpha: float, beta: float) -> np.ndarray:
    """Stage 1: blend trigger detail bands into the deep clean bands.

    The clean image gets a three-level wavelet pyramid. The trigger image
    is resized to half and quarter resolution and analysed one level, so
    its detail planes align with the clean pyramid's level-2 and level-3
    bands, which become beta*H2 + (1-beta)*T and alpha*H3 + (1-alpha)*T'.
    Level-1 detail and the deepest approximation pass through untouched.

    Returns the reconstructed (H, W, C) array, not clipped.
    """
    h, w = clean.height, clean.width
    if h % 8 or w % 8:
        raise DimensionError(f"clean image dimensions must be divisible by 8, got {h}x{w}")
    if trigger.height < 8 or trigger.width < 8:
        raise DimensionError(
            f"trigger image sides must be >= 8, got {trigger.height}x{trigger.width}"
        )
    trig = _match_channels(trigger.data, clean.channels)

    out = np.empty_like(clean.data)
    for c in range(clean.channels):
        pyr = transforms.dwt_pyramid_plane(clean.data[:, :, c], levels=3)
        half = imagecore.resize_plane(trig[:, :, c], h // 2, w // 2)
        quarter = imagecore.resize_plane(trig[:, :, c], h // 4, w // 4)
        half_dec = transforms.dwt2(half)
        quarter_dec = transforms.dwt2(quarter)
        level2 = tuple(
            band * beta + tband * (1.0 - beta)
            for band, tband in zip(pyr.levels[1], half_dec.high)
        )
        level3 = tuple(
            band * alpha + tband * (1.0 - alpha)
            for band, tband in zip(pyr.levels[2], quarter_dec.high)
        )
        modified = transforms.WaveletPyramid(
            levels=(pyr.levels[0], level2, level3), low=pyr.low
        )
        out[:, :, c] = transforms.reconstruct_pyramid(modified)
    return out


def fft_smooth(initial, clean) -> np.ndarray:
    """Stage 2a: re-impose the clean amplitude spectrum on the embedded phase.

    Per channel the output inverts amplitude(clean) combined with
    phase(initial), Hermitian-symmetrized so the inverse is exactly real.
    Not clipped.
    """
    initial = _as_array(initial)
    clean = _as_array(clean)
    if initial.shape != clean.shape:
        raise ShapeError(f"shape mismatch: {initial.shape} vs {clean.shape}")
    out = np.empty_like(clean)
    for c in range(clean.shape[2]):
        out[:, :, c] = transforms.amplitude_phase_swap(clean[:, :, c], initial[:, :, c])
    return out


def dct_fuse(smoothed, clean, lam: float) -> np.ndarray:
    """Stage 2b: double cosine-domain fusion with intensity lam.

    Both operands are transformed twice; blending happens at the deepest
    level first and again after one inversion:

        deep = idct2(lam * S2 + (1-lam) * C2)
        out  = idct2(lam * deep + (1-lam) * C1)

    By linearity this equals lam^2 * smoothed + (1-lam^2) * clean, which
    the test suite pins as the oracle. Not clipped.
    """
    smoothed = _as_array(smoothed)
    clean = _as_array(clean)
    if smoothed.shape != clean.shape:
        raise ShapeError(f"shape mismatch: {smoothed.shape} vs {clean.shape}")
    out = np.empty_like(clean)
    for c in range(clean.shape[2]):
        clean1 = transforms.dct2(clean[:, :, c])
        clean2 = transforms.dct2(clean1)
        smooth1 = transforms.dct2(smoothed[:, :, c])
        smooth2 = transforms.dct2(smooth1)
        deep = transforms.idct2(lam * smooth2 + (1.0 - lam) * clean2)
        out[:, :, c] = transforms.idct2(lam * deep + (1.0 - lam) * clean1)
    return out


def make_mask(shape, profile: TriggerProfile, clean: Image, image_key: int) -> np.ndarray:
    """Stage 3 mask: 1.0 keeps the trigger at a pixel, 0.0 suppresses it.

    floor(mask_ratio * H * W) pixels are zeroed by a pseudorandom
    permutation keyed by (profile.seed, image_key), plus every pixel where
    any clean channel falls below low_threshold or above high_threshold
    on the 8-bit scale. One mask plane applies to all channels.
    """
    h, w = shape[:2]
    if (h, w) != (clean.height, clean.width):
        raise ShapeError(f"mask shape {h}x{w} does not match clean {clean.height}x{clean.width}")
    mask = np.ones(h * w, dtype=np.float64)
    count = int(np.floor(profile.mask_ratio * h * w + 1e-9))
    if count:
        key = prng.derive_key("mask", profile.seed, image_key)
        mask[prng.rank_order(key, h * w)[:count]] = 0.0
    mask = mask.reshape(h, w)
    low = profile.low_threshold / 255.0
    high = profile.high_threshold / 255.0
    extreme = (clean.data < low).any(axis=2) | (clean.data > high).any(axis=2)
    mask[extreme] = 0.0
    return mask


def poison_image(
    clean: Image, trigger: Image, profile: TriggerProfile, image_key: int
) -> tuple[Image, TriggerPattern]:
    """Run the full pipeline; returns the poisoned image and the raw pattern.

    The pattern is the unmasked fused-minus-clean residual; the poisoned
    image is clip(clean + mask * pattern), so pixels with mask 0 equal the
    clean image bit-exactly.
    """
    initial = embed_highfreq(clean, trigger, profile.alpha, profile.beta)
    smoothed = fft_smooth(initial, clean.data)
    fused = dct_fuse(smoothed, clean.data, profile.lam)
    pattern = fused - clean.data
    mask = make_mask(pattern.shape, profile, clean, image_key)
    poisoned = imagecore.clip(clean.data + mask[:, :, None] * pattern)
    return poisoned, TriggerPattern(data=pattern)


def ablation_poison(
    clean: Image,
    trigger: Image,
    profile: TriggerProfile,
    stage: str,
    image_key: int = 0,
) -> Image:
    """Stop the pipeline after a named stage for side-by-side comparison.

    "dwt-only" clips the stage-1 embedding, "dwt+fft" clips the
    amplitude-smoothed image, "full" is identical to poison_image
    (masking applies only in full mode).
    """
    if stage not in STAGES:
        raise ConfigError(f"unknown stage {stage!r}; choose from {', '.join(STAGES)}")
    if stage == "full":
        return poison_image(clean, trigger, profile, image_key)[0]
    initial = embed_highfreq(clean, trigger, profile.alpha, profile.beta)
    if stage == "dwt-only":
        return imagecore.clip(initial)
    return imagecore.clip(fft_smooth(initial, clean.data))
