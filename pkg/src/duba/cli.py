"""Command-line surface: single-image poisoning, dataset poisoning,
stealth metrics, ablation stages, and manifest verification.

Exit codes: 0 success, 1 processing error, 2 usage error (click),
3 verification mismatch, 4 manifest missing or unreadable.
"""

from __future__ import annotations

import dataclasses
import json
import secrets
import sys
from pathlib import Path

import click

from . import imagecore, metrics, poisoner, trigger
from .errors import DubaError

EXIT_PROCESSING = 1
EXIT_VERIFY_MISMATCH = 3
EXIT_NO_MANIFEST = 4

_PROFILES = dict(zip(("train", "attack"), trigger.builtin_profiles()))


def _fail(message: str, code: int = EXIT_PROCESSING):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def profile_options(fn):
    """Shared profile flags; explicit values override the named profile."""
    opts = [
        click.option("--profile", "profile_name", type=click.Choice(sorted(_PROFILES)),
                     default="attack", show_default=True,
                     help="Named parameter set to start from."),
        click.option("--alpha", type=float, default=None,
                     help="Level-3 detail retention in [0,1]."),
        click.option("--beta", type=float, default=None,
                     help="Level-2 detail retention in [0,1]."),
        click.option("--lambda", "lam", type=float, default=None,
                     help="Cosine-domain fusing intensity in [0,1]."),
        click.option("--mask-ratio", type=float, default=None,
                     help="Fraction of trigger pixels randomly zeroed."),
        click.option("--low", "low_threshold", type=int, default=None,
                     help="8-bit lower clean-pixel threshold for masking."),
        click.option("--high", "high_threshold", type=int, default=None,
                     help="8-bit upper clean-pixel threshold for masking."),
        click.option("--seed", type=int, default=None, envvar="DUBA_SEED",
                     help="Stream seed; falls back to $DUBA_SEED, else random."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _resolve(profile_name: str, seed, **overrides) -> trigger.TriggerProfile:
    if seed is None:
        seed = secrets.randbits(63)
        click.echo(f"seed: {seed} (chosen randomly; pass --seed to reproduce)")
    fields = {k: v for k, v in overrides.items() if v is not None}
    fields["seed"] = seed
    return dataclasses.replace(_PROFILES[profile_name], **fields)


def _emit_residuals(clean, poisoned, pattern, out: Path) -> None:
    spatial = metrics.render_plane(imagecore.residual(poisoned, clean).data)
    freq, _ = metrics.freq_residual(poisoned, clean)
    imagecore.save(spatial, out.with_suffix(".residual.png"))
    imagecore.save(freq, out.with_suffix(".freqres.png"))
    if pattern is not None:
        imagecore.save(metrics.render_plane(pattern.data), out.with_suffix(".pattern.png"))


@click.group()
def main():
    """Dual-domain-stealthy backdoor poisoning toolkit."""


@main.command("poison")
@click.argument("clean_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("trigger_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_path", type=click.Path(dir_okay=False))
@profile_options
@click.option("--image-key", type=int, default=0, show_default=True,
              help="64-bit key mixed into the random mask stream.")
@click.option("--emit-residuals", is_flag=True,
              help="Also write spatial/frequency residual and pattern renderings.")
def cmd_poison(clean_path, trigger_path, out_path, profile_name, seed,
               image_key, emit_residuals, **overrides):
    """Poison one image and write the result as PNG."""
    try:
        profile = _resolve(profile_name, seed, **overrides)
        clean = imagecore.load(clean_path)
        trig = imagecore.load(trigger_path)
        poisoned, pattern = trigger.poison_image(clean, trig, profile, image_key)
        out = Path(out_path)
        imagecore.save(poisoned, out)
        if emit_residuals:
            _emit_residuals(clean, poisoned, pattern, out)
    except (DubaError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"wrote {out_path}")


@main.command("ablate")
@click.argument("clean_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("trigger_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_path", type=click.Path(dir_okay=False))
@click.option("--stage", type=click.Choice(trigger.STAGES), required=True,
              help="Pipeline stage to stop after.")
@profile_options
@click.option("--image-key", type=int, default=0, show_default=True)
def cmd_ablate(clean_path, trigger_path, out_path, stage, profile_name,
               seed, image_key, **overrides):
    """Write the output of a truncated pipeline plus residual renderings."""
    try:
        profile = _resolve(profile_name, seed, **overrides)
        clean = imagecore.load(clean_path)
        trig = imagecore.load(trigger_path)
        staged = trigger.ablation_poison(clean, trig, profile, stage, image_key)
        out = Path(out_path)
        imagecore.save(staged, out)
        _emit_residuals(clean, staged, None, out)
    except (DubaError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"wrote {out_path} ({stage})")


@main.command("poison-dataset")
@click.argument("dataset_root", type=click.Path(exists=True, file_okay=False))
@click.argument("trigger_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_root", type=click.Path(file_okay=False))
@profile_options
@click.option("--ratio", type=float, default=0.1, show_default=True,
              help="Fraction of samples to poison.")
@click.option("--label-mode", type=click.Choice(["all-to-one", "all-to-all"]),
              default="all-to-one", show_default=True)
@click.option("--target", type=int, default=0, show_default=True,
              help="Target class index (all-to-one only).")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Worker threads; outputs are identical for any value.")
@click.option("--center-crop", is_flag=True,
              help="Crop images whose sides are not multiples of 8.")
@click.option("--uniform-sampling", is_flag=True,
              help="Sample the poison subset uniformly instead of per class.")
def cmd_poison_dataset(dataset_root, trigger_path, out_root, profile_name, seed,
                       ratio, label_mode, target, jobs, center_crop,
                       uniform_sampling, **overrides):
    """Poison a class-folder dataset and write a reproducibility manifest."""
    try:
        profile = _resolve(profile_name, seed, **overrides)
        index = poisoner.index_dataset(dataset_root)
        manifest = poisoner.poison_dataset(
            index,
            trigger_path,
            profile,
            poisoner.LabelMap(mode=label_mode, target=target),
            ratio,
            profile.seed,
            out_root,
            jobs=jobs,
            stratified=not uniform_sampling,
            crop_policy="center-crop" if center_crop else "error",
        )
    except (DubaError, OSError) as exc:
        _fail(str(exc))
    poisoned = sum(e.poisoned for e in manifest.entries)
    click.echo(
        f"poisoned {poisoned}/{len(manifest.entries)} samples into {out_root} "
        f"(seed {manifest.seed})"
    )


@main.command("metrics")
@click.argument("path_a", type=click.Path(exists=True, dir_okay=False))
@click.argument("path_b", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def cmd_metrics(path_a, path_b, as_json):
    """Print the stealth report comparing two images (a = clean reference)."""
    try:
        report = metrics.stealth_report(imagecore.load(path_a), imagecore.load(path_b))
    except (DubaError, OSError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps(report.to_dict(), sort_keys=True))
        return
    rows = [
        ("psnr_db", "inf" if report.psnr == float("inf") else f"{report.psnr:.4f}"),
        ("ssim", f"{report.ssim:.6f}"),
        ("freq_residual_energy", f"{report.freq_residual_energy:.6e}"),
        ("hf_score_clean", f"{report.hf_score_clean:.6f}"),
        ("hf_score_poisoned", f"{report.hf_score_poisoned:.6f}"),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        click.echo(f"{name:<{width}}  {value}")


@main.command("verify")
@click.argument("out_root", type=click.Path(exists=True, file_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def cmd_verify(out_root, as_json):
    """Replay a manifest and byte-compare every poisoned output file."""
    try:
        report = poisoner.verify_manifest(out_root)
    except FileNotFoundError as exc:
        _fail(str(exc), EXIT_NO_MANIFEST)
    except (DubaError, OSError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps(
            {"total": report.total, "poisoned": report.poisoned,
             "mismatches": list(report.mismatches), "ok": report.ok},
            sort_keys=True,
        ))
    else:
        click.echo(f"entries: {report.total}, poisoned: {report.poisoned}")
        for path in report.mismatches:
            click.echo(f"MISMATCH {path}")
        click.echo("ok" if report.ok else f"{len(report.mismatches)} mismatches")
    if not report.ok:
        sys.exit(EXIT_VERIFY_MISMATCH)


if __name__ == "__main__":
    main()
