"""Why three transforms: compare pipeline stages in both domains.

Stops the pipeline after each stage (wavelet embedding only, plus
amplitude smoothing, full) and measures what each smoothing step buys:
the frequency-domain residual energy and the high-frequency artifact
score drop stage by stage, while spatial quality stays high. Writes a
stage panel and per-stage frequency residuals under demo_output/.
"""

import pathlib

import numpy as np
from skimage import data

from duba import (
    Image, ablation_poison, builtin_profiles, freq_residual,
    hf_artifact_score, psnr, save,
)

out_dir = pathlib.Path("demo_output/stages")
out_dir.mkdir(parents=True, exist_ok=True)

clean = Image(data.coffee()[88:312, 200:424, :].astype(np.float64) / 255.0)
trigger = Image(data.chelsea()[120:184, 240:304, :].astype(np.float64) / 255.0)
_, attack = builtin_profiles()

base_score = hf_artifact_score(clean)
print(f"clean hf score: {base_score:.5f}\n")
print(f"{'stage':<10} {'psnr':>8} {'freq energy':>12} {'hf delta':>10}")

panels = [clean.data]
for stage in ("dwt-only", "dwt+fft", "full"):
    staged = ablation_poison(clean, trigger, attack, stage, image_key=2)
    render, energy = freq_residual(staged, clean)
    delta = hf_artifact_score(staged) - base_score
    print(f"{stage:<10} {psnr(clean, staged):>8.2f} {energy:>12.5f} {delta:>10.6f}")
    panels.append(staged.data)
    save(render, out_dir / f"freq_residual_{stage.replace('+', '_')}.png")

save(Image(np.hstack(panels)), out_dir / "clean_then_stages.png")
print(f"\nwrote stage comparisons to {out_dir}/")
print("embedding alone is loud in the frequency domain; the amplitude swap "
      "silences it almost completely, and the full pipeline (which re-perturbs "
      "pixels through fusion and masking) still stays far below the "
      "embedding-only stage in both frequency columns.")
