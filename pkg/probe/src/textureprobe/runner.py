"""Probe execution: batched inference with ordered, single-stream output."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import torch

from .dataset import DatasetError, ImageEntry, scan_dataset
from .formats import Registry, load_registry, registry_sha256, write_manifest
from .models import build_model
from .pipeline import build_transform, load_image, preprocess_batch

log = logging.getLogger("textureprobe")

KINDS = ("texture-probe", "image-probe")


class ProbeError(ValueError):
    """Invalid job configuration."""


@dataclass(frozen=True)
class ProbeJob:
    model: str
    data: Path
    kind: str
    registry: Path
    out: Path
    batch: int = 16
    device: str = "cpu"
    weights: str = "default"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProbeError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.batch < 1:
            raise ProbeError("batch size must be at least 1")


@dataclass(frozen=True)
class ProbeResult:
    records_path: Path
    manifest_path: Path
    record_count: int
    skipped_count: int
    weight_id: str


def run_probe(job: ProbeJob) -> ProbeResult:
    """Run the classifier over the dataset and write records plus manifest."""
    reg = load_registry(job.registry)
    folder_names = reg.textures if job.kind == "texture-probe" else reg.objects
    entries = scan_dataset(job.data, folder_names,
                           require_class=job.kind == "texture-probe")

    model, weight_id = build_model(job.model, job.weights, num_classes=reg.m)
    device = _resolve_device(job.device)
    model.to(device)

    dataset_id = Path(job.data).resolve().name
    out = Path(job.out)
    out.parent.mkdir(parents=True, exist_ok=True)

    count = 0
    skipped = 0
    transform = build_transform()
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        for chunk in _chunks(entries, job.batch):
            loaded: list[tuple[ImageEntry, object]] = []
            for entry in chunk:
                try:
                    loaded.append((entry, load_image(entry.path)))
                except OSError as e:
                    skipped += 1
                    log.warning("skipping unreadable image %s: %s",
                                entry.path, e)
            if not loaded:
                continue
            batch = preprocess_batch([img for _, img in loaded], transform)
            with torch.no_grad():
                logits = model(batch.to(device))
                probs = torch.softmax(logits, dim=1).cpu().numpy()
            for (entry, _), p in zip(loaded, probs):
                f.write(json.dumps(_record(job.kind, entry, p, dataset_id))
                        + "\n")
                count += 1

    manifest = write_manifest(
        out,
        dataset_id=dataset_id,
        record_count=count,
        registry_hash=registry_sha256(reg),
        kind=job.kind,
        extra={
            "model": job.model,
            "weights": weight_id,
            "skipped_count": skipped,
        },
    )
    if skipped:
        log.warning("skipped %d unreadable images", skipped)
    return ProbeResult(records_path=out, manifest_path=manifest,
                       record_count=count, skipped_count=skipped,
                       weight_id=weight_id)


def _record(kind: str, entry: ImageEntry, probs, dataset_id: str) -> dict:
    if kind == "texture-probe":
        return {
            "record_id": entry.record_id,
            "texture_class_id": entry.class_id,
            "predicted_object_id": int(probs.argmax()),
            "confidence": float(probs.max()),
        }
    obj: dict[str, object] = {
        "record_id": entry.record_id,
        "dataset_id": dataset_id,
    }
    if entry.class_id is not None:
        obj["true_label_id"] = entry.class_id
    obj["probs"] = [float(p) for p in probs]
    return obj


def _resolve_device(name: str) -> torch.device:
    device = torch.device(name)
    if device.type == "cuda" and not torch.cuda.is_available():
        raise ProbeError("device cuda requested but not available")
    return device


def _chunks(items: list, size: int):
    for i in range(0, len(items), size):
        yield items[i:i + size]
