"""Dual-domain-stealthy backdoor poisoning toolkit.

Generates poisoned images whose trigger hides in mid-frequency wavelet
detail and stays inconspicuous in both the spatial and the frequency
domain, poisons class-folder datasets reproducibly, and audits the
results with stealthiness metrics.
"""

from .errors import (
    ConfigError,
    DatasetError,
    DimensionError,
    DubaError,
    FormatError,
    NumericError,
    ShapeError,
    VerificationError,
)
from .imagecore import Image, Residual, center_crop, clip, from_array, load, resize, residual, save
from .metrics import StealthReport, freq_residual, hf_artifact_score, psnr, render_plane, ssim, stealth_report
from .poisoner import (
    DatasetIndex,
    LabelMap,
    PoisonManifest,
    VerifyReport,
    index_dataset,
    poison_dataset,
    read_manifest,
    remap_label,
    select_poison_set,
    verify_manifest,
)
from .transforms import (
    SpectrumPair,
    WaveletDecomposition,
    WaveletPyramid,
    amplitude_phase_swap,
    dct2,
    dwt2,
    dwt_pyramid,
    fft2,
    idct2,
    idwt2,
    ifft2,
    reconstruct_pyramid,
    symmetrize,
)
from .trigger import (
    TriggerPattern,
    TriggerProfile,
    ablation_poison,
    builtin_profiles,
    dct_fuse,
    embed_highfreq,
    fft_smooth,
    make_mask,
    poison_image,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DatasetError", "DimensionError", "DubaError", "FormatError",
    "NumericError", "ShapeError", "VerificationError",
    "Image", "Residual", "center_crop", "clip", "from_array", "load", "resize",
    "residual", "save",
    "StealthReport", "freq_residual", "hf_artifact_score", "psnr", "render_plane",
    "ssim", "stealth_report",
    "DatasetIndex", "LabelMap", "PoisonManifest", "VerifyReport", "index_dataset",
    "poison_dataset", "read_manifest", "remap_label", "select_poison_set",
    "verify_manifest",
    "SpectrumPair", "WaveletDecomposition", "WaveletPyramid", "amplitude_phase_swap",
    "dct2", "dwt2", "dwt_pyramid", "fft2", "idct2", "idwt2", "ifft2",
    "reconstruct_pyramid", "symmetrize",
    "TriggerPattern", "TriggerProfile", "ablation_poison", "builtin_profiles",
    "dct_fuse", "embed_highfreq", "fft_smooth", "make_mask", "poison_image",
    "__version__",
]
