"""Poison a class-folder dataset end to end, then audit the manifest.

Builds a small synthetic dataset on disk, poisons 10% of it with the
attack profile and an all-to-one label map, and shows what the manifest
records. The run is fully reproducible: verify_manifest regenerates every
poisoned file from the manifest and byte-compares it, and a corrupted
file is caught immediately.

The CLI equivalent of the library calls below:

    duba poison-dataset --ratio 0.1 --seed 7 --target 0 data/ trigger.png out/
    duba verify out/
"""

import pathlib
import shutil

import numpy as np
from PIL import Image as PILImage

from duba import (
    LabelMap, builtin_profiles, index_dataset, poison_dataset, verify_manifest,
)

work = pathlib.Path("demo_output/dataset")
shutil.rmtree(work, ignore_errors=True)
root = work / "data"

# --- synthesize a 4-class dataset of 32x32 PNGs ---------------------------
rng = np.random.default_rng(7)
for name in ("bird", "car", "cat", "dog"):
    cdir = root / name
    cdir.mkdir(parents=True)
    for i in range(25):
        pixels = rng.integers(0, 256, (32, 32, 3)).astype(np.uint8)
        PILImage.fromarray(pixels).save(cdir / f"{name}_{i:03d}.png")

trigger_path = work / "trigger.png"
PILImage.fromarray(rng.integers(0, 256, (64, 64, 3)).astype(np.uint8)).save(trigger_path)

# --- poison ----------------------------------------------------------------
index = index_dataset(root)
print(f"indexed {len(index)} samples, classes: {index.classes}")

_, attack = builtin_profiles()
manifest = poison_dataset(
    index, trigger_path, attack,
    LabelMap("all-to-one", target=0),
    ratio=0.1, seed=7, out_root=work / "out", jobs=4,
)

poisoned = [e for e in manifest.entries if e.poisoned]
print(f"poisoned {len(poisoned)} of {len(manifest.entries)} "
      f"(stratified: {sorted(e.original_label for e in poisoned)})")
print("a poisoned entry:", poisoned[0])

# --- audit -----------------------------------------------------------------
report = verify_manifest(work / "out")
print(f"verify: {report.poisoned} poisoned files replayed, "
      f"{len(report.mismatches)} mismatches")

# Flip one byte and watch the audit catch it.
victim = work / "out" / poisoned[0].output_path
blob = bytearray(victim.read_bytes())
blob[-1] ^= 0xFF
victim.write_bytes(bytes(blob))
report = verify_manifest(work / "out")
print(f"after corrupting {poisoned[0].output_path}: "
      f"mismatches = {list(report.mismatches)}")
