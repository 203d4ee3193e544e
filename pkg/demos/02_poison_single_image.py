"""Poison one photograph and inspect how invisible the trigger is.

Runs the full pipeline (wavelet embedding, amplitude smoothing, double
cosine fusion, random masking) on a natural photo with a textured trigger
image, then prints the stealth report and writes a clean | poisoned |
residual panel under demo_output/.
"""

import pathlib

import numpy as np
from skimage import data

from duba import (
    Image, builtin_profiles, poison_image, render_plane, residual, save,
    stealth_report,
)

out_dir = pathlib.Path("demo_output/single_image")
out_dir.mkdir(parents=True, exist_ok=True)

clean = Image(data.astronaut()[64:288, 96:320, :].astype(np.float64) / 255.0)
# Any image works as the trigger; high-frequency texture carries best.
trigger = Image(data.chelsea()[120:184, 240:304, :].astype(np.float64) / 255.0)

train, attack = builtin_profiles()
print("attack profile:", attack)

poisoned, pattern = poison_image(clean, trigger, attack, image_key=1)

report = stealth_report(clean, poisoned)
print(f"PSNR                 {report.psnr:.2f} dB")
print(f"SSIM                 {report.ssim:.4f}")
print(f"freq residual energy {report.freq_residual_energy:.5f}")
print(f"hf score clean       {report.hf_score_clean:.5f}")
print(f"hf score poisoned    {report.hf_score_poisoned:.5f}")

# The pattern itself is tiny; render_plane stretches it to full contrast.
spatial = render_plane(residual(poisoned, clean).data)
panel = np.hstack([
    clean.data,
    poisoned.data,
    np.repeat(spatial.data, 3, axis=2),
])
save(Image(panel), out_dir / "clean_poisoned_residual.png")
save(render_plane(pattern.data), out_dir / "pattern.png")

print(f"\nwrote panel to {out_dir}/ "
      "(the residual column is contrast-stretched; at native contrast it is black)")
