"""Synthetic probe records with planted texture-object associations.

A planted world maps each texture to one object injectively; generated
records follow that mapping except for a seeded noise fraction. The mapping
is the ground truth an end-to-end test recovers, so generation is fully
deterministic from the seed and the manifest carries both seed and mapping.

Confidence draw ranges are fixed constants chosen to give the confidence
histogram a bimodal shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .schema import (ClassRegistry, DatasetManifest, ImageProbeRecord,
                     TextureProbeRecord, registry_hash, save_registry,
                     write_manifest, write_image_records,
                     write_texture_records)

PLANTED_CONF_RANGE = (0.9, 1.0)
NOISE_CONF_MAX = 0.5


@dataclass(frozen=True)
class PlantedWorld:
    """Ground truth for synthetic generation.

    ``mapping`` sends texture id to object id and must be injective over
    texture ids 0..n-1. ``num_objects`` sizes the object vocabulary; it
    defaults to the smallest size that fits the mapping but may be larger
    to leave some objects unmapped.
    """

    mapping: dict[int, int]
    noise: float
    samples_per_texture: int
    images_per_object: int
    seed: int
    num_objects: int = 0

    def __post_init__(self):
        n = len(self.mapping)
        if n < 2:
            raise ValueError(f"need at least 2 mapped textures, got {n}")
        if sorted(self.mapping) != list(range(n)):
            raise ValueError("mapping keys must be texture ids 0..n-1")
        values = list(self.mapping.values())
        if len(set(values)) != len(values):
            raise ValueError("mapping must be injective")
        if not 0.0 <= self.noise < 1.0:
            raise ValueError(f"noise must be in [0,1), got {self.noise}")
        if self.samples_per_texture < 1 or self.images_per_object < 1:
            raise ValueError("per-texture and per-object counts must be >= 1")
        floor = max(max(values) + 1, 2)
        if self.num_objects == 0:
            object.__setattr__(self, "num_objects", floor)
        elif self.num_objects < floor:
            raise ValueError(
                f"num_objects {self.num_objects} too small for mapping (min {floor})")

    @property
    def n(self) -> int:
        return len(self.mapping)

    @property
    def m(self) -> int:
        return self.num_objects


def registry_for(world: PlantedWorld) -> ClassRegistry:
    return ClassRegistry(
        texture_names=tuple(f"texture{i:02d}" for i in range(world.n)),
        object_names=tuple(f"object{j:02d}" for j in range(world.m)),
    )


def gen_texture_records(world: PlantedWorld) -> Iterator[TextureProbeRecord]:
    """Texture-probe stream following the planted mapping.

    Per texture, each record predicts the mapped object with probability
    1-noise at high confidence, else a uniformly random other object at low
    confidence.
    """
    rng = np.random.default_rng(world.seed)
    lo, hi = PLANTED_CONF_RANGE
    for i in range(world.n):
        planted = world.mapping[i]
        for k in range(world.samples_per_texture):
            if rng.random() < 1.0 - world.noise:
                obj = planted
                conf = rng.uniform(lo, hi)
            else:
                obj = int(rng.integers(0, world.m - 1))
                if obj >= planted:
                    obj += 1
                conf = rng.uniform(1.0 / world.m, NOISE_CONF_MAX)
            yield TextureProbeRecord(
                record_id=f"tex-{i:03d}-{k:05d}",
                texture_class_id=i,
                predicted_object_id=obj,
                confidence=float(conf),
            )


def gen_image_records(world: PlantedWorld) -> Iterator[ImageProbeRecord]:
    """Labeled image-probe stream over the mapped objects.

    Probs put mass 1-noise on the true object and spread the rest
    uniformly; generation is deterministic, ordered by object id.
    """
    dataset_id = image_dataset_id(world)
    off_mass = world.noise / (world.m - 1)
    for j in sorted(world.mapping.values()):
        probs = np.full(world.m, off_mass)
        probs[j] = 1.0 - world.noise
        for k in range(world.images_per_object):
            yield ImageProbeRecord(
                record_id=f"img-{j:03d}-{k:05d}",
                dataset_id=dataset_id,
                probs=probs.copy(),
                true_label_id=j,
            )


def texture_dataset_id(world: PlantedWorld) -> str:
    return f"synth-texture-{world.seed}"


def image_dataset_id(world: PlantedWorld) -> str:
    return f"synth-image-{world.seed}"


def write_world(world: PlantedWorld, out_dir: str | Path) -> dict[str, Path]:
    """Write registry, both record files, and their manifests.

    The manifests carry the seed and the planted mapping so downstream
    checks can recover the ground truth from disk alone.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reg = registry_for(world)
    paths = {
        "registry": out / "registry.json",
        "texture_records": out / "texture_records.jsonl",
        "image_records": out / "image_records.jsonl",
    }
    save_registry(reg, paths["registry"])
    rhash = registry_hash(reg)
    mapping_doc = {str(i): j for i, j in sorted(world.mapping.items())}

    count = write_texture_records(paths["texture_records"],
                                  gen_texture_records(world))
    write_manifest(DatasetManifest(
        dataset_id=texture_dataset_id(world), record_count=count,
        registry_hash=rhash, kind="texture-probe", seed=world.seed,
        extra={"mapping": mapping_doc, "noise": world.noise},
    ), paths["texture_records"])

    count = write_image_records(paths["image_records"],
                                gen_image_records(world))
    write_manifest(DatasetManifest(
        dataset_id=image_dataset_id(world), record_count=count,
        registry_hash=rhash, kind="image-probe", seed=world.seed,
        extra={"mapping": mapping_doc, "noise": world.noise},
    ), paths["image_records"])
    return paths
