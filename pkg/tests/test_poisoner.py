import json
import filecmp
from pathlib import Path

import numpy as np
import pytest

from conftest import build_dataset, write_png
from duba import poisoner, trigger
from duba.errors import ConfigError, DatasetError, DimensionError, VerificationError
from duba.poisoner import LabelMap


def _tree_bytes(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


@pytest.fixture()
def small_dataset(tmp_path):
    root = tmp_path / "data"
    build_dataset(root, ["bird", "car", "cat", "dog"], per_class=10, size=32)
    return root


@pytest.fixture()
def trigger_file(tmp_path):
    rng = np.random.default_rng(55)
    path = tmp_path / "trigger.png"
    write_png(path, rng.integers(0, 256, (64, 64, 3)))
    return path


def _attack_profile():
    return trigger.builtin_profiles()[1]


class TestIndex:
    def test_lexicographic_classes(self, tmp_path):
        root = tmp_path / "d"
        build_dataset(root, ["dog", "cat"], per_class=2)
        index = poisoner.index_dataset(root)
        assert index.classes == ("cat", "dog")
        assert index.samples[0][1] == 0

    def test_sample_count_and_order(self, small_dataset):
        index = poisoner.index_dataset(small_dataset)
        assert len(index) == 40
        assert list(index.samples) == sorted(index.samples)

    def test_empty_root_rejected(self, tmp_path):
        empty = tmp_path / "none"
        empty.mkdir()
        with pytest.raises(DatasetError):
            poisoner.index_dataset(empty)

    def test_empty_class_dir_rejected(self, tmp_path):
        root = tmp_path / "d"
        (root / "void").mkdir(parents=True)
        with pytest.raises(DatasetError):
            poisoner.index_dataset(root)


class TestSelect:
    def test_zero_and_full_ratio(self, small_dataset):
        index = poisoner.index_dataset(small_dataset)
        assert poisoner.select_poison_set(index, 0.0, seed=1) == frozenset()
        assert len(poisoner.select_poison_set(index, 1.0, seed=1)) == 40

    def test_exact_count_and_stratification(self, tmp_path):
        root = tmp_path / "d"
        build_dataset(root, [f"c{i}" for i in range(10)], per_class=100, size=8)
        index = poisoner.index_dataset(root)
        chosen = poisoner.select_poison_set(index, 0.1, seed=3)
        assert len(chosen) == 100
        per_class = {}
        for sid in chosen:
            label = index.samples[sid][1]
            per_class[label] = per_class.get(label, 0) + 1
        assert all(count == 10 for count in per_class.values())

    def test_uneven_classes_within_one_of_share(self, tmp_path):
        root = tmp_path / "d"
        for name, n in [("a", 30), ("b", 50), ("c", 20)]:
            cdir = root / name
            cdir.mkdir(parents=True)
            rng = np.random.default_rng(n)
            for i in range(n):
                write_png(cdir / f"{name}_{i:04d}.png", rng.integers(0, 256, (8, 8, 3)))
        index = poisoner.index_dataset(root)
        chosen = poisoner.select_poison_set(index, 0.25, seed=4)
        assert len(chosen) == 25
        counts = {}
        for sid in chosen:
            label = index.samples[sid][1]
            counts[label] = counts.get(label, 0) + 1
        shares = {0: 30, 1: 50, 2: 20}
        for label, n in shares.items():
            assert abs(counts.get(label, 0) - 25 * n / 100) < 1.0

    def test_uniform_mode_and_determinism(self, small_dataset):
        index = poisoner.index_dataset(small_dataset)
        a = poisoner.select_poison_set(index, 0.3, seed=9, stratified=False)
        b = poisoner.select_poison_set(index, 0.3, seed=9, stratified=False)
        c = poisoner.select_poison_set(index, 0.3, seed=10, stratified=False)
        assert a == b
        assert a != c
        assert len(a) == 12

    def test_invalid_ratio(self, small_dataset):
        index = poisoner.index_dataset(small_dataset)
        with pytest.raises(ConfigError):
            poisoner.select_poison_set(index, 1.5, seed=0)


class TestRemap:
    def test_all_to_one(self):
        assert poisoner.remap_label(5, LabelMap("all-to-one", target=0), 10) == 0

    def test_all_to_all_successor(self):
        assert poisoner.remap_label(3, LabelMap("all-to-all"), 10) == 4

    def test_all_to_all_wraps(self):
        assert poisoner.remap_label(9, LabelMap("all-to-all"), 10) == 0

    def test_bijection(self):
        mapped = {poisoner.remap_label(y, LabelMap("all-to-all"), 7) for y in range(7)}
        assert mapped == set(range(7))

    def test_target_out_of_range(self):
        with pytest.raises(ConfigError):
            poisoner.remap_label(0, LabelMap("all-to-one", target=10), 10)

    def test_bad_mode(self):
        with pytest.raises(ConfigError):
            LabelMap("some-to-some")


class TestPoisonDataset:
    def test_zero_ratio_is_byte_identical_copy(self, small_dataset, trigger_file, tmp_path):
        index = poisoner.index_dataset(small_dataset)
        out = tmp_path / "out"
        manifest = poisoner.poison_dataset(
            index, trigger_file, _attack_profile(), LabelMap("all-to-one", 0),
            ratio=0.0, seed=1, out_root=out,
        )
        assert sum(e.poisoned for e in manifest.entries) == 0
        for relpath, _ in index.samples:
            assert filecmp.cmp(small_dataset / relpath, out / relpath, shallow=False)

    def test_counts_and_relocation(self, small_dataset, trigger_file, tmp_path):
        index = poisoner.index_dataset(small_dataset)
        out = tmp_path / "out"
        manifest = poisoner.poison_dataset(
            index, trigger_file, _attack_profile(), LabelMap("all-to-one", 0),
            ratio=0.25, seed=2, out_root=out,
        )
        poisoned = [e for e in manifest.entries if e.poisoned]
        assert len(poisoned) == 10
        target_class = manifest.classes[0]
        for entry in poisoned:
            assert entry.output_label == 0
            assert entry.output_path.startswith(f"{target_class}/")
            assert (out / entry.output_path).is_file()
        # triggers present: poisoned file differs from its source pixels
        from duba import imagecore

        entry = poisoned[0]
        src = imagecore.load(small_dataset / entry.path)
        dst = imagecore.load(out / entry.output_path)
        assert np.abs(src.data - dst.data).max() > 0

    def test_clean_files_byte_identical(self, small_dataset, trigger_file, tmp_path):
        index = poisoner.index_dataset(small_dataset)
        out = tmp_path / "out"
        manifest = poisoner.poison_dataset(
            index, trigger_file, _attack_profile(), LabelMap("all-to-one", 0),
            ratio=0.25, seed=2, out_root=out,
        )
        for entry in manifest.entries:
            if not entry.poisoned:
                assert filecmp.cmp(
                    small_dataset / entry.path, out / entry.output_path, shallow=False
                )

    def test_rerun_determinism(self, small_dataset, trigger_file, tmp_path):
        index = poisoner.index_dataset(small_dataset)
        for i, jobs in enumerate((1, 3)):
            poisoner.poison_dataset(
                index, trigger_file, _attack_profile(), LabelMap("all-to-all"),
                ratio=0.2, seed=5, out_root=tmp_path / f"out{i}", jobs=jobs,
            )
        assert _tree_bytes(tmp_path / "out0") == _tree_bytes(tmp_path / "out1")

    def test_nonempty_out_root_refused(self, small_dataset, trigger_file, tmp_path):
        index = poisoner.index_dataset(small_dataset)
        out = tmp_path / "busy"
        out.mkdir()
        (out / "leftover.txt").write_text("x")
        with pytest.raises(DatasetError):
            poisoner.poison_dataset(
                index, trigger_file, _attack_profile(), LabelMap("all-to-one", 0),
                ratio=0.1, seed=1, out_root=out,
            )

    def test_manifest_json_roundtrip(self, small_dataset, trigger_file, tmp_path):
        index = poisoner.index_dataset(small_dataset)
        out = tmp_path / "out"
        manifest = poisoner.poison_dataset(
            index, trigger_file, _attack_profile(), LabelMap("all-to-all"),
            ratio=0.1, seed=8, out_root=out,
        )
        again = poisoner.read_manifest(out)
        assert again == manifest

    def test_indivisible_dims_error_and_crop(self, tmp_path, trigger_file):
        root = tmp_path / "odd"
        cdir = root / "only"
        cdir.mkdir(parents=True)
        rng = np.random.default_rng(0)
        write_png(cdir / "a.png", rng.integers(0, 256, (36, 44, 3)))
        index = poisoner.index_dataset(root)
        with pytest.raises(DatasetError) as err:
            poisoner.poison_dataset(
                index, trigger_file, _attack_profile(), LabelMap("all-to-one", 0),
                ratio=1.0, seed=1, out_root=tmp_path / "fail",
            )
        assert "only/a.png" in str(err.value)
        manifest = poisoner.poison_dataset(
            index, trigger_file, _attack_profile(), LabelMap("all-to-one", 0),
            ratio=1.0, seed=1, out_root=tmp_path / "ok", crop_policy="center-crop",
        )
        from duba import imagecore

        out_img = imagecore.load(tmp_path / "ok" / manifest.entries[0].output_path)
        assert (out_img.height, out_img.width) == (32, 40)


class TestVerify:
    def _poison(self, small_dataset, trigger_file, tmp_path, **kwargs):
        index = poisoner.index_dataset(small_dataset)
        out = tmp_path / "out"
        manifest = poisoner.poison_dataset(
            index, trigger_file, _attack_profile(), LabelMap("all-to-one", 0),
            ratio=0.25, seed=6, out_root=out, **kwargs,
        )
        return out, manifest

    def test_fresh_tree_verifies(self, small_dataset, trigger_file, tmp_path):
        out, _ = self._poison(small_dataset, trigger_file, tmp_path)
        report = poisoner.verify_manifest(out)
        assert report.ok
        assert report.poisoned == 10

    def test_single_corruption_reported_once(self, small_dataset, trigger_file, tmp_path):
        out, manifest = self._poison(small_dataset, trigger_file, tmp_path)
        victim = next(e for e in manifest.entries if e.poisoned)
        target = out / victim.output_path
        blob = bytearray(target.read_bytes())
        blob[-1] ^= 0xFF
        target.write_bytes(bytes(blob))
        report = poisoner.verify_manifest(out)
        assert report.mismatches == (victim.output_path,)

    def test_edited_profile_breaks_every_poisoned_file(
        self, small_dataset, trigger_file, tmp_path
    ):
        out, _ = self._poison(small_dataset, trigger_file, tmp_path)
        raw = json.loads((out / "manifest.json").read_text())
        raw["profile"]["alpha"] = 0.9
        (out / "manifest.json").write_text(json.dumps(raw))
        report = poisoner.verify_manifest(out)
        assert len(report.mismatches) == report.poisoned == 10

    def test_missing_manifest(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(FileNotFoundError):
            poisoner.verify_manifest(tmp_path / "empty")

    def test_trigger_digest_mismatch(self, small_dataset, trigger_file, tmp_path):
        out, _ = self._poison(small_dataset, trigger_file, tmp_path)
        write_png(trigger_file, np.zeros((64, 64, 3), dtype=np.uint8))
        with pytest.raises(VerificationError):
            poisoner.verify_manifest(out)

    def test_missing_trigger(self, small_dataset, trigger_file, tmp_path):
        out, _ = self._poison(small_dataset, trigger_file, tmp_path)
        trigger_file.unlink()
        with pytest.raises(VerificationError):
            poisoner.verify_manifest(out)
