"""Exact, invertible 2-D frequency transforms.

Three transform families, each paired with its inverse:

* single-level orthonormal Haar wavelet analysis (``dwt2``/``idwt2``) and a
  multi-level pyramid built by recursing on the approximation band,
* the discrete Fourier transform split into amplitude and phase planes
  (``fft2``/``ifft2``), with a Hermitian symmetrizer for spectra assembled
  from mismatched amplitude/phase sources,
* the orthonormal type-II cosine transform (``dct2``/``idct2``).

All functions operate on a single 2-D float plane; callers iterate
channels. Round trips reconstruct to 1e-9 max-abs at double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as _sfft

from .errors import DimensionError, NumericError, ShapeError
from .imagecore import Image

#: Largest imaginary residue tolerated when an inverse FFT must be real.
IMAG_TOL = 1e-9


@dataclass(frozen=True)
class WaveletDecomposition:
    """One analysis level: approximation plus (vertical, diagonal, horizontal) detail."""

    low: np.ndarray
    high: tuple[np.ndarray, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class WaveletPyramid:
    """Detail triples for each level (finest first) and the deepest approximation."""

    levels: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]
    low: np.ndarray


@dataclass(frozen=True)
class SpectrumPair:
    """Amplitude (modulus) and phase (argument) planes of a 2-D DFT."""

    amplitude: np.ndarray
    phase: np.ndarray

    def to_complex(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.phase)


def dwt2(plane: np.ndarray) -> WaveletDecomposition:
    """Single-level orthonormal Haar analysis of an even-sized plane.

    For each 2x2 block [a b; c d]:
    low = (a+b+c+d)/2, vertical = (a-b+c-d)/2,
    horizontal = (a+b-c-d)/2, diagonal = (a-b-c+d)/2.
    """
    plane = np.asarray(plane, dtype=np.float64)
    h, w = plane.shape
    if h % 2 or w % 2:
        raise DimensionError(f"dwt2 needs even dimensions, got {h}x{w}")
    a = plane[0::2, 0::2]
    b = plane[0::2, 1::2]
    c = plane[1::2, 0::2]
    d = plane[1::2, 1::2]
    low = (a + b + c + d) / 2.0
    vertical = (a - b + c - d) / 2.0
    horizontal = (a + b - c - d) / 2.0
    diagonal = (a - b - c + d) / 2.0
    return WaveletDecomposition(low=low, high=(vertical, diagonal, horizontal))


def idwt2(dec: WaveletDecomposition) -> np.ndarray:
    """Exact inverse of dwt2."""
    low = np.asarray(dec.low, dtype=np.float64)
    vertical, diagonal, horizontal = (np.asarray(p, dtype=np.float64) for p in dec.high)
    if not (low.shape == vertical.shape == diagonal.shape == horizontal.shape):
        raise ShapeError("all four subband planes must share one shape")
    h, w = low.shape
    out = np.empty((2 * h, 2 * w), dtype=np.float64)
    out[0::2, 0::2] = (low + vertical + horizontal + diagonal) / 2.0
    out[0::2, 1::2] = (low - vertical + horizontal - diagonal) / 2.0
    out[1::2, 0::2] = (low + vertical - horizontal - diagonal) / 2.0
    out[1::2, 1::2] = (low - vertical - horizontal + diagonal) / 2.0
    return out


def dwt_pyramid_plane(plane: np.ndarray, levels: int = 3) -> WaveletPyramid:
    """Multi-level Haar pyramid of one plane (detail triples kept per level)."""
    plane = np.asarray(plane, dtype=np.float64)
    h, w = plane.shape
    div = 1 << levels
    if h % div or w % div:
        raise DimensionError(
            f"pyramid of {levels} levels needs dimensions divisible by {div}, got {h}x{w}"
        )
    highs = []
    low = plane
    for _ in range(levels):
        dec = dwt2(low)
        highs.append(dec.high)
        low = dec.low
    return WaveletPyramid(levels=tuple(highs), low=low)


def dwt_pyramid(img: Image, levels: int = 3) -> list[WaveletPyramid]:
    """Per-channel wavelet pyramids of an image."""
    return [dwt_pyramid_plane(img.data[:, :, c], levels) for c in range(img.channels)]


def reconstruct_pyramid(pyr: WaveletPyramid) -> np.ndarray:
    """Invert a pyramid, deepest level outward. Output is not clipped."""
    low = pyr.low
    for high in reversed(pyr.levels):
        if any(p.shape != low.shape for p in high):
            raise ShapeError(
                f"detail planes {tuple(p.shape for p in high)} do not match "
                f"approximation {low.shape}"
            )
        low = idwt2(WaveletDecomposition(low=low, high=high))
    return low


def fft2(plane: np.ndarray) -> SpectrumPair:
    """Unnormalized forward 2-D DFT as (amplitude, phase) planes."""
    spec = np.fft.fft2(np.asarray(plane, dtype=np.float64))
    return SpectrumPair(amplitude=np.abs(spec), phase=np.angle(spec))


def ifft2(spec: SpectrumPair) -> np.ndarray:
    """Inverse 2-D DFT (1/(HW) normalized); the result must be real.

    Raises NumericError if the imaginary residue exceeds 1e-9; callers
    recombining amplitude and phase from different sources should
    symmetrize() first.
    """
    out = np.fft.ifft2(spec.to_complex())
    residue = np.abs(out.imag).max()
    if residue > IMAG_TOL:
        raise NumericError(
            f"inverse FFT imaginary residue {residue:.3e} exceeds {IMAG_TOL:.0e}; "
            "spectrum is not Hermitian"
        )
    return out.real


def _conjugate_mirror(spec: np.ndarray) -> np.ndarray:
    # index map u -> (-u) mod H, v -> (-v) mod W
    return np.conj(np.roll(spec[::-1, ::-1], shift=(1, 1), axis=(0, 1)))


def symmetrize(spec: SpectrumPair) -> SpectrumPair:
    """Project a spectrum onto the Hermitian subspace (real-image spectra).

    Averages the complex plane with its conjugate mirror, which leaves
    spectra of real images untouched and makes any mixed spectrum exactly
    invertible to a real plane.
    """
    z = spec.to_complex()
    sym = 0.5 * (z + _conjugate_mirror(z))
    return SpectrumPair(amplitude=np.abs(sym), phase=np.angle(sym))


def amplitude_phase_swap(amp_source: np.ndarray, phase_source: np.ndarray) -> np.ndarray:
    """Invert amplitude(DFT(amp_source)) combined with phase(DFT(phase_source)).

    Equivalent to ``ifft2(symmetrize(SpectrumPair(fft2(a).amplitude,
    fft2(b).phase)))`` but stays in the complex domain: the unit-phase
    plane is the normalized spectrum (zero bins get phase 0), so no polar
    round trip is needed. Output is real; not clipped.
    """
    z_amp = np.fft.fft2(np.asarray(amp_source, dtype=np.float64))
    z_phase = np.fft.fft2(np.asarray(phase_source, dtype=np.float64))
    mag = np.abs(z_phase)
    unit = np.where(mag > 0.0, z_phase / np.where(mag > 0.0, mag, 1.0), 1.0 + 0.0j)
    combined = np.abs(z_amp) * unit
    sym = 0.5 * (combined + _conjugate_mirror(combined))
    out = np.fft.ifft2(sym)
    residue = np.abs(out.imag).max()
    if residue > IMAG_TOL:
        raise NumericError(
            f"inverse FFT imaginary residue {residue:.3e} exceeds {IMAG_TOL:.0e}"
        )
    return out.real


def dct2(plane: np.ndarray) -> np.ndarray:
    """Orthonormal type-II 2-D DCT (a linear, energy-preserving map)."""
    return _sfft.dctn(np.asarray(plane, dtype=np.float64), type=2, norm="ortho")


def idct2(plane: np.ndarray) -> np.ndarray:
    """Inverse (type-III) of dct2."""
    return _sfft.idctn(np.asarray(plane, dtype=np.float64), type=2, norm="ortho")
