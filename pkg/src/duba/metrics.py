"""Stealthiness quantification: PSNR, SSIM, spectral residuals, HF score.

PSNR and SSIM measure spatial imperceptibility against a reference. The
frequency residual compares log-amplitude spectra (the way spectra are
customarily displayed; raw amplitude would be swamped by the DC bin), and
the high-frequency artifact score is a reference-free statistic: the
share of non-DC cosine-transform energy sitting in the high anti-diagonal
bins, which is what DCT-based poisoning detectors key on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from . import transforms
from .errors import DimensionError, ShapeError
from .imagecore import Image

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


@dataclass(frozen=True)
class StealthReport:
    """One clean/poisoned comparison, spatial and spectral."""

    psnr: float
    ssim: float
    freq_residual_energy: float
    hf_score_clean: float
    hf_score_poisoned: float

    def to_dict(self) -> dict:
        """JSON-safe dict; infinite PSNR becomes the string "inf"."""
        return {
            "psnr": "inf" if math.isinf(self.psnr) else self.psnr,
            "ssim": self.ssim,
            "freq_residual_energy": self.freq_residual_energy,
            "hf_score_clean": self.hf_score_clean,
            "hf_score_poisoned": self.hf_score_poisoned,
        }


def _check_shapes(a: Image, b: Image) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")


def psnr(a: Image, b: Image) -> float:
    """Peak signal-to-noise ratio in dB over [0, 1] data; inf if identical."""
    _check_shapes(a, b)
    mse = float(np.mean((a.data - b.data) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x**2) / (2.0 * sigma**2))
    return g / g.sum()


def _windowed_mean(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    # separable filtering; interior values equal a 'valid' convolution,
    # so the padded border is cropped afterwards
    out = correlate1d(plane, kernel, axis=0, mode="nearest")
    out = correlate1d(out, kernel, axis=1, mode="nearest")
    pad = len(kernel) // 2
    return out[pad:-pad, pad:-pad]


def ssim(a: Image, b: Image) -> float:
    """Mean structural similarity, 11x11 Gaussian window (sigma 1.5).

    Standard constants K1=0.01, K2=0.03 at dynamic range 1.0; local
    statistics are Gaussian-weighted and the map is averaged over the
    valid interior and over channels.
    """
    _check_shapes(a, b)
    if min(a.height, a.width) < _SSIM_WINDOW:
        raise DimensionError(
            f"ssim needs min dimension >= {_SSIM_WINDOW}, got {a.height}x{a.width}"
        )
    c1 = _SSIM_K1**2
    c2 = _SSIM_K2**2
    kernel = _gaussian_window(_SSIM_WINDOW, _SSIM_SIGMA)
    scores = []
    for c in range(a.channels):
        x = a.data[:, :, c]
        y = b.data[:, :, c]
        mu_x = _windowed_mean(x, kernel)
        mu_y = _windowed_mean(y, kernel)
        var_x = _windowed_mean(x * x, kernel) - mu_x**2
        var_y = _windowed_mean(y * y, kernel) - mu_y**2
        cov = _windowed_mean(x * y, kernel) - mu_x * mu_y
        ssim_map = ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / (
            (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
        )
        scores.append(ssim_map.mean())
    return float(np.mean(scores))


def freq_residual(a: Image, b: Image) -> tuple[Image, float]:
    """Log-amplitude spectrum difference: (rendering, mean-square energy).

    Per channel the residual is |log1p(A_a) - log1p(A_b)| over FFT
    amplitude planes, averaged across channels. The scalar energy is the
    mean of its squares; the returned grayscale image is the min-max
    normalized, center-shifted rendering (display only).
    """
    _check_shapes(a, b)
    acc = np.zeros((a.height, a.width), dtype=np.float64)
    for c in range(a.channels):
        amp_a = transforms.fft2(a.data[:, :, c]).amplitude
        amp_b = transforms.fft2(b.data[:, :, c]).amplitude
        acc += np.abs(np.log1p(amp_a) - np.log1p(amp_b))
    plane = acc / a.channels
    energy = float(np.mean(plane**2))
    return render_plane(np.fft.fftshift(plane)), energy


def hf_artifact_score(img: Image) -> float:
    """Share of non-DC cosine energy in bins with u+v > (H+W)/2, per [0, 1].

    Constant images score 0 (all energy is in the excluded DC bin; 0/0 is
    defined as 0). Adding a constant to an image only moves DC energy, so
    the score is unchanged (modulo clipping).
    """
    h, w = img.height, img.width
    u, v = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    high_region = (u + v) > (h + w) / 2.0
    scores = []
    for c in range(img.channels):
        energy = transforms.dct2(img.data[:, :, c]) ** 2
        energy[0, 0] = 0.0
        total = energy.sum()
        scores.append(0.0 if total == 0.0 else float(energy[high_region].sum() / total))
    return float(np.mean(scores))


def stealth_report(clean: Image, poisoned: Image) -> StealthReport:
    """Bundle every stealth metric for one clean/poisoned pair."""
    _, energy = freq_residual(poisoned, clean)
    return StealthReport(
        psnr=psnr(clean, poisoned),
        ssim=ssim(clean, poisoned),
        freq_residual_energy=energy,
        hf_score_clean=hf_artifact_score(clean),
        hf_score_poisoned=hf_artifact_score(poisoned),
    )


def render_plane(arr) -> Image:
    """Min-max normalized grayscale rendering of any real plane or stack.

    Multi-channel input is reduced to per-pixel mean magnitude first.
    Constant input renders as black.
    """
    plane = np.asarray(arr, dtype=np.float64)
    if plane.ndim == 3:
        plane = np.abs(plane).mean(axis=2)
    lo = plane.min()
    span = plane.max() - lo
    if span == 0.0:
        return Image(np.zeros(plane.shape + (1,), dtype=np.float64))
    return Image(((plane - lo) / span)[:, :, None])
