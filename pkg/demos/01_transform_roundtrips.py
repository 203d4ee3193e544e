"""Tour of the transform layer: wavelet pyramid, Fourier spectra, cosine basis.

Every transform in the package is exactly invertible at double precision.
This script decomposes a real photograph, prints the round-trip and
energy-conservation numbers, and writes a subband montage plus a
log-amplitude spectrum rendering under demo_output/.
"""

import pathlib

import numpy as np
from skimage import data

from duba import (
    Image, dct2, dwt2, dwt_pyramid, fft2, idct2, idwt2, ifft2,
    reconstruct_pyramid, render_plane, save,
)

out_dir = pathlib.Path("demo_output/transforms")
out_dir.mkdir(parents=True, exist_ok=True)

# A 256x256 grayscale crop of a real photo, mapped to [0, 1].
photo = data.camera()[128:384, 128:384].astype(np.float64) / 255.0
img = Image(photo)

# --- single-level wavelet analysis ---------------------------------------
# One Haar step splits the plane into an approximation and three detail
# bands (vertical, diagonal, horizontal), each half the size.
dec = dwt2(photo)
print("subband shapes:", dec.low.shape, [b.shape for b in dec.high])

rebuilt = idwt2(dec)
print(f"dwt2 round-trip max error: {np.abs(rebuilt - photo).max():.2e}")

total = (photo**2).sum()
subbands = (dec.low**2).sum() + sum((b**2).sum() for b in dec.high)
print(f"energy in = {total:.6f}, energy out = {subbands:.6f} (orthonormal)")

# Montage: approximation upper-left, details (rendered to full range)
top = np.hstack([dec.low / 2.0, render_plane(dec.high[0]).data[:, :, 0]])
bottom = np.hstack([render_plane(dec.high[2]).data[:, :, 0],
                    render_plane(dec.high[1]).data[:, :, 0]])
save(Image(np.clip(np.vstack([top, bottom]), 0, 1)[:, :, None]),
     out_dir / "haar_subbands.png")

# --- three-level pyramid ---------------------------------------------------
pyramid = dwt_pyramid(img, levels=3)[0]
print("pyramid detail sizes:", [level[0].shape for level in pyramid.levels],
      "deep approximation:", pyramid.low.shape)
print(f"pyramid round-trip max error: "
      f"{np.abs(reconstruct_pyramid(pyramid) - photo).max():.2e}")

# --- Fourier amplitude and phase ------------------------------------------
spec = fft2(photo)
print(f"DC amplitude = {spec.amplitude[0, 0]:.1f} "
      f"(mean {photo.mean():.4f} x {photo.size} pixels)")
print(f"fft2 round-trip max error: {np.abs(ifft2(spec) - photo).max():.2e}")
save(render_plane(np.fft.fftshift(np.log1p(spec.amplitude))),
     out_dir / "log_amplitude.png")

# --- orthonormal cosine transform ------------------------------------------
coeffs = dct2(photo)
print(f"dct2 Parseval gap: {abs((coeffs**2).sum() - total):.2e}")
print(f"idct2 round-trip max error: {np.abs(idct2(coeffs) - photo).max():.2e}")

print(f"\nwrote renderings to {out_dir}/")
