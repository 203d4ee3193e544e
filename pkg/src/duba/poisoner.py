"""Dataset-level poisoning with reproducible manifests.

Ingests a class-folder image tree, picks a poison subset at the requested
ratio (stratified by class unless disabled), rewrites each chosen sample
through the trigger pipeline into its remapped class folder, copies
everything else byte-for-byte, and records a manifest from which every
poisoned file can be regenerated and audited.
"""

from __future__ import annotations

import hashlib
import json
import math
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import imagecore, prng
from .errors import ConfigError, DatasetError, DimensionError, VerificationError
from .imagecore import Image
from .trigger import TriggerProfile, poison_image

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1

_IMAGE_SUFFIXES = {".png", ".bmp", ".jpg", ".jpeg"}

#: Per-file handling of dimensions not divisible by 8.
CROP_POLICIES = ("error", "center-crop")


@dataclass(frozen=True)
class DatasetIndex:
    """Deterministic listing of a class-folder dataset."""

    root: str
    classes: tuple[str, ...]
    samples: tuple[tuple[str, int], ...]  # (relative posix path, class index)

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class LabelMap:
    """Target-label policy: every class to one target, or each to its successor."""

    mode: str  # "all-to-one" | "all-to-all"
    target: int = 0

    def __post_init__(self):
        if self.mode not in ("all-to-one", "all-to-all"):
            raise ConfigError(f"unknown label map mode {self.mode!r}")
        if self.mode == "all-to-one" and self.target < 0:
            raise ConfigError("all-to-one target must be a class index >= 0")


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    original_label: int
    output_label: int
    poisoned: bool
    image_key: int
    output_path: str


@dataclass(frozen=True)
class PoisonManifest:
    """Everything needed to regenerate and audit one poisoning run."""

    format_version: int
    seed: int
    profile: TriggerProfile
    trigger_path: str
    trigger_sha256: str
    poison_ratio: float
    label_map: LabelMap
    classes: tuple[str, ...]
    input_root: str
    crop_policy: str
    stratified: bool
    entries: tuple[ManifestEntry, ...]

    def to_json(self) -> str:
        payload = asdict(self)
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "PoisonManifest":
        raw = json.loads(text)
        return PoisonManifest(
            format_version=raw["format_version"],
            seed=raw["seed"],
            profile=TriggerProfile(**raw["profile"]),
            trigger_path=raw["trigger_path"],
            trigger_sha256=raw["trigger_sha256"],
            poison_ratio=raw["poison_ratio"],
            label_map=LabelMap(**raw["label_map"]),
            classes=tuple(raw["classes"]),
            input_root=raw["input_root"],
            crop_policy=raw["crop_policy"],
            stratified=raw["stratified"],
            entries=tuple(ManifestEntry(**e) for e in raw["entries"]),
        )


@dataclass(frozen=True)
class VerifyReport:
    """Outcome of replaying a manifest against its output tree."""

    total: int
    poisoned: int
    mismatches: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def index_dataset(root) -> DatasetIndex:
    """Index a tree with one subdirectory per class, images inside.

    Classes are sorted lexicographically and numbered densely; samples are
    sorted by (class, filename) so indexing is deterministic.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root is not a directory: {root}")
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise DatasetError(f"dataset root contains no class directories: {root}")
    classes = tuple(p.name for p in class_dirs)
    samples: list[tuple[str, int]] = []
    for idx, cdir in enumerate(class_dirs):
        files = sorted(
            p.name for p in cdir.iterdir()
            if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
        )
        if not files:
            raise DatasetError(f"class directory holds no image files: {cdir}")
        samples.extend((f"{cdir.name}/{name}", idx) for name in files)
    return DatasetIndex(root=str(root.resolve()), classes=classes, samples=tuple(samples))


def select_poison_set(
    index: DatasetIndex, ratio: float, seed: int, stratified: bool = True
) -> frozenset[int]:
    """Choose round(ratio * N) sample ids by seeded sampling.

    Stratified mode keeps per-class counts proportional (largest-remainder
    rounding, so each count is within 1 of the exact share); plain mode
    samples uniformly over the whole dataset.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ConfigError(f"poison ratio must lie in [0, 1], got {ratio}")
    n = len(index)
    m = _round_half_up(ratio * n)
    if m == 0:
        return frozenset()
    if not stratified:
        order = prng.rank_order(prng.derive_key("select", seed), n)
        return frozenset(int(i) for i in order[:m])

    by_class: dict[int, list[int]] = {}
    for sample_id, (_, label) in enumerate(index.samples):
        by_class.setdefault(label, []).append(sample_id)
    quotas = {c: m * len(ids) / n for c, ids in by_class.items()}
    base = {c: int(math.floor(q)) for c, q in quotas.items()}
    leftover = m - sum(base.values())
    for c in sorted(by_class, key=lambda c: (-(quotas[c] - base[c]), c))[:leftover]:
        base[c] += 1

    chosen: list[int] = []
    for c, ids in sorted(by_class.items()):
        order = prng.rank_order(prng.derive_key("select", seed, c), len(ids))
        chosen.extend(ids[i] for i in order[: base[c]])
    return frozenset(chosen)


def remap_label(y: int, label_map: LabelMap, num_classes: int) -> int:
    """Apply the label policy; all-to-all wraps modulo the class count."""
    if not 0 <= y < num_classes:
        raise ConfigError(f"label {y} outside [0, {num_classes})")
    if label_map.mode == "all-to-one":
        if label_map.target >= num_classes:
            raise ConfigError(
                f"target class {label_map.target} outside [0, {num_classes})"
            )
        return label_map.target
    return (y + 1) % num_classes


def _prepare_clean(path: Path, crop_policy: str) -> Image:
    img = imagecore.load(path)
    if img.height % 8 == 0 and img.width % 8 == 0:
        return img
    if crop_policy == "center-crop":
        new_h = (img.height // 8) * 8
        new_w = (img.width // 8) * 8
        if new_h < 8 or new_w < 8:
            raise DimensionError(f"image too small to crop to a multiple of 8: {path}")
        return imagecore.center_crop(img, new_h, new_w)
    raise DimensionError(
        f"dimensions {img.height}x{img.width} not divisible by 8 "
        f"(pass crop_policy='center-crop' to crop): {path}"
    )


def poison_dataset(
    index: DatasetIndex,
    trigger_path,
    profile: TriggerProfile,
    label_map: LabelMap,
    ratio: float,
    seed: int,
    out_root,
    *,
    jobs: int = 1,
    stratified: bool = True,
    crop_policy: str = "error",
) -> PoisonManifest:
    """Write the poisoned dataset tree plus manifest.json under out_root.

    Poisoned samples land in their remapped class folder as
    ``<origclass>__<stem>.png``; everything else is copied byte-for-byte.
    The output is a pure function of (dataset bytes, trigger bytes,
    profile, label map, ratio, seed) regardless of jobs.
    """
    if crop_policy not in CROP_POLICIES:
        raise ConfigError(f"unknown crop policy {crop_policy!r}")
    out_root = Path(out_root)
    if out_root.exists() and (not out_root.is_dir() or any(out_root.iterdir())):
        raise DatasetError(f"output root exists and is not empty: {out_root}")
    trigger_path = Path(trigger_path).resolve()
    trigger_bytes = trigger_path.read_bytes()
    trigger_digest = hashlib.sha256(trigger_bytes).hexdigest()
    trigger_img = imagecore.load(trigger_path)
    profile = replace(profile, seed=seed)
    num_classes = len(index.classes)
    if label_map.mode == "all-to-one" and label_map.target >= num_classes:
        raise ConfigError(
            f"target class {label_map.target} outside [0, {num_classes})"
        )
    chosen = select_poison_set(index, ratio, seed, stratified)

    in_root = Path(index.root)
    out_root.mkdir(parents=True, exist_ok=True)
    for name in index.classes:
        (out_root / name).mkdir(exist_ok=True)

    def process(item: tuple[int, tuple[str, int]]) -> ManifestEntry:
        sample_id, (relpath, label) = item
        src = in_root / relpath
        key = prng.path_key(relpath)
        if sample_id in chosen:
            clean = _prepare_clean(src, crop_policy)
            out_label = remap_label(label, label_map, num_classes)
            poisoned, _ = poison_image(clean, trigger_img, profile, key)
            out_rel = (
                f"{index.classes[out_label]}/"
                f"{index.classes[label]}__{Path(relpath).stem}.png"
            )
            imagecore.save(poisoned, out_root / out_rel)
            return ManifestEntry(relpath, label, out_label, True, key, out_rel)
        shutil.copyfile(src, out_root / relpath)
        return ManifestEntry(relpath, label, label, False, key, relpath)

    items = list(enumerate(index.samples))
    failures: list[str] = []
    entries: list[ManifestEntry | None] = [None] * len(items)
    if jobs <= 1:
        for i, item in enumerate(items):
            try:
                entries[i] = process(item)
            except Exception as exc:  # noqa: BLE001 - collected into the file report
                failures.append(f"{item[1][0]}: {exc}")
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(process, item) for item in items]
            for i, fut in enumerate(futures):
                try:
                    entries[i] = fut.result()
                except Exception as exc:  # noqa: BLE001
                    failures.append(f"{items[i][1][0]}: {exc}")
    if failures:
        raise DatasetError(
            "poisoning aborted; failing files:\n  " + "\n  ".join(sorted(failures))
        )

    out_paths = [e.output_path for e in entries]
    if len(set(out_paths)) != len(out_paths):
        dupes = sorted({p for p in out_paths if out_paths.count(p) > 1})
        raise DatasetError("output path collision: " + ", ".join(dupes))

    manifest = PoisonManifest(
        format_version=MANIFEST_VERSION,
        seed=seed,
        profile=profile,
        trigger_path=str(trigger_path),
        trigger_sha256=trigger_digest,
        poison_ratio=ratio,
        label_map=label_map,
        classes=index.classes,
        input_root=index.root,
        crop_policy=crop_policy,
        stratified=stratified,
        entries=tuple(entries),
    )
    (out_root / MANIFEST_NAME).write_text(manifest.to_json(), encoding="utf-8")
    return manifest


def read_manifest(out_root) -> PoisonManifest:
    """Load manifest.json from an output tree (FileNotFoundError if absent)."""
    path = Path(out_root) / MANIFEST_NAME
    if not path.is_file():
        raise FileNotFoundError(f"no {MANIFEST_NAME} under {out_root}")
    return PoisonManifest.from_json(path.read_text(encoding="utf-8"))


def verify_manifest(out_root) -> VerifyReport:
    """Recompute every poisoned file from the manifest and byte-compare.

    Raises VerificationError if the trigger or a clean source needed for
    replay is missing, or the trigger bytes no longer match the recorded
    digest. Corrupted or missing outputs are reported as mismatches.
    """
    out_root = Path(out_root)
    manifest = read_manifest(out_root)
    trigger_path = Path(manifest.trigger_path)
    if not trigger_path.is_file():
        raise VerificationError(f"trigger image missing: {trigger_path}")
    digest = hashlib.sha256(trigger_path.read_bytes()).hexdigest()
    if digest != manifest.trigger_sha256:
        raise VerificationError(
            f"trigger digest mismatch: manifest {manifest.trigger_sha256}, file {digest}"
        )
    trigger_img = imagecore.load(trigger_path)
    in_root = Path(manifest.input_root)

    mismatches: list[str] = []
    poisoned_count = 0
    for entry in manifest.entries:
        if not entry.poisoned:
            continue
        poisoned_count += 1
        src = in_root / entry.path
        if not src.is_file():
            raise VerificationError(f"clean source needed for replay missing: {src}")
        clean = _prepare_clean(src, manifest.crop_policy)
        recomputed, _ = poison_image(clean, trigger_img, manifest.profile, entry.image_key)
        expected = imagecore.encode_png(recomputed)
        target = out_root / entry.output_path
        if not target.is_file() or target.read_bytes() != expected:
            mismatches.append(entry.output_path)
    return VerifyReport(
        total=len(manifest.entries),
        poisoned=poisoned_count,
        mismatches=tuple(mismatches),
    )
