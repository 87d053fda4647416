"""Classifier probing for the texturebias record formats."""

from .dataset import DatasetError, ImageEntry, scan_dataset
from .formats import (FormatError, Registry, load_registry, manifest_path,
                      registry_sha256, write_manifest)
from .models import MODEL_NAMES, RANDOM_INIT_SEED, WEIGHT_MODES, ModelError, build_model
from .pipeline import (CROP_SIZE, IMAGENET_MEAN, IMAGENET_STD, RESIZE_SIZE,
                       build_transform, load_image, preprocess_batch)
from .runner import KINDS, ProbeError, ProbeJob, ProbeResult, run_probe

__version__ = "0.1.0"

__all__ = [
    "CROP_SIZE",
    "DatasetError",
    "FormatError",
    "IMAGENET_MEAN",
    "IMAGENET_STD",
    "ImageEntry",
    "KINDS",
    "MODEL_NAMES",
    "ModelError",
    "ProbeError",
    "ProbeJob",
    "ProbeResult",
    "RANDOM_INIT_SEED",
    "RESIZE_SIZE",
    "Registry",
    "WEIGHT_MODES",
    "build_model",
    "build_transform",
    "load_image",
    "load_registry",
    "manifest_path",
    "preprocess_batch",
    "registry_sha256",
    "run_probe",
    "scan_dataset",
    "write_manifest",
]
