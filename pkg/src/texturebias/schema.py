"""On-disk record formats, class registries, and validated streaming readers.

All downstream analytics consume the three file formats defined here:

* registry: JSON object with ``"textures"`` and ``"objects"`` name lists,
* probe records: JSONL, one object per line, UTF-8,
* manifest: JSON sidecar next to a record file (``<records>.manifest.json``).

Readers are strict: any malformed line aborts the stream with a
:class:`SchemaError` carrying the file path and 1-based line number.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

MANIFEST_KINDS = ("texture-probe", "image-probe")

# Absorbs float32 rounding from probe exports.
PROB_SUM_TOLERANCE = 1e-4


class SchemaError(ValueError):
    """Validation failure in a registry, record file, or manifest."""

    def __init__(self, message: str, *, path: str | Path | None = None,
                 line: int | None = None):
        self.message = message
        self.path = str(path) if path is not None else None
        self.line = line
        super().__init__(str(self))

    def __str__(self) -> str:
        prefix = ""
        if self.path is not None:
            prefix = self.path
            if self.line is not None:
                prefix += f":{self.line}"
            prefix += ": "
        return prefix + self.message


@dataclass(frozen=True)
class ClassRegistry:
    """Ordered texture and object class names; ids are 0-based positions."""

    texture_names: tuple[str, ...]
    object_names: tuple[str, ...]

    def __post_init__(self):
        for kind, names in (("texture", self.texture_names),
                            ("object", self.object_names)):
            if len(names) < 2:
                raise SchemaError(f"need at least 2 {kind} names, got {len(names)}")
            seen = set()
            for name in names:
                if not isinstance(name, str) or not name:
                    raise SchemaError(f"{kind} names must be non-empty strings")
                if name in seen:
                    raise SchemaError(f"duplicate {kind} name {name!r}")
                seen.add(name)

    @property
    def n(self) -> int:
        return len(self.texture_names)

    @property
    def m(self) -> int:
        return len(self.object_names)

    def texture_name(self, i: int) -> str:
        return self.texture_names[i]

    def object_name(self, j: int) -> str:
        return self.object_names[j]


def registry_hash(reg: ClassRegistry) -> str:
    """SHA-256 over the canonical JSON form of the registry."""
    canonical = json.dumps(
        {"textures": list(reg.texture_names), "objects": list(reg.object_names)},
        separators=(",", ":"), ensure_ascii=True,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_registry(path: str | Path) -> ClassRegistry:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SchemaError(f"unreadable registry file: {e}", path=path) from e
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise SchemaError(f"malformed JSON: {e.msg}", path=path, line=e.lineno) from e
    if not isinstance(obj, dict):
        raise SchemaError("registry must be a JSON object", path=path, line=1)
    extra = set(obj) - {"textures", "objects"}
    if extra:
        raise SchemaError(f"unexpected registry fields: {sorted(extra)}",
                          path=path, line=1)
    for key in ("textures", "objects"):
        if key not in obj:
            raise SchemaError(f"missing registry field {key!r}", path=path, line=1)
        if not isinstance(obj[key], list):
            raise SchemaError(f"registry field {key!r} must be a list",
                              path=path, line=1)
    try:
        return ClassRegistry(tuple(obj["textures"]), tuple(obj["objects"]))
    except SchemaError as e:
        raise SchemaError(e.message, path=path, line=1) from e


def save_registry(reg: ClassRegistry, path: str | Path) -> None:
    payload = {"textures": list(reg.texture_names),
               "objects": list(reg.object_names)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class TextureProbeRecord:
    """Argmax prediction and its confidence for one texture image."""

    record_id: str
    texture_class_id: int
    predicted_object_id: int
    confidence: float

    def validate(self, reg: ClassRegistry) -> None:
        if not isinstance(self.record_id, str):
            raise SchemaError("record_id must be a string")
        if not _is_int(self.texture_class_id) or not 0 <= self.texture_class_id < reg.n:
            raise SchemaError(
                f"texture id {self.texture_class_id} out of range [0, {reg.n})")
        if not _is_int(self.predicted_object_id) or not 0 <= self.predicted_object_id < reg.m:
            raise SchemaError(
                f"object id {self.predicted_object_id} out of range [0, {reg.m})")
        if not _is_real(self.confidence) or not 0.0 <= self.confidence <= 1.0:
            raise SchemaError(f"confidence {self.confidence!r} outside [0, 1]")


class ImageProbeRecord:
    """Full probability vector over object classes for one real image."""

    __slots__ = ("record_id", "dataset_id", "true_label_id", "probs")

    def __init__(self, record_id: str, dataset_id: str,
                 probs: np.ndarray, true_label_id: int | None = None):
        self.record_id = record_id
        self.dataset_id = dataset_id
        self.true_label_id = true_label_id
        self.probs = np.asarray(probs, dtype=np.float64)

    def __repr__(self) -> str:
        return (f"ImageProbeRecord(record_id={self.record_id!r}, "
                f"dataset_id={self.dataset_id!r}, "
                f"true_label_id={self.true_label_id!r}, m={self.probs.size})")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImageProbeRecord):
            return NotImplemented
        return (self.record_id == other.record_id
                and self.dataset_id == other.dataset_id
                and self.true_label_id == other.true_label_id
                and np.array_equal(self.probs, other.probs))

    def validate(self, reg: ClassRegistry) -> None:
        if not isinstance(self.record_id, str):
            raise SchemaError("record_id must be a string")
        if not isinstance(self.dataset_id, str):
            raise SchemaError("dataset_id must be a string")
        if self.true_label_id is not None:
            if not _is_int(self.true_label_id) or not 0 <= self.true_label_id < reg.m:
                raise SchemaError(
                    f"label id {self.true_label_id} out of range [0, {reg.m})")
        if self.probs.ndim != 1 or self.probs.size != reg.m:
            raise SchemaError(
                f"probs must have length {reg.m}, got {self.probs.size}")
        if np.any(self.probs < 0):
            raise SchemaError("probs must be elementwise nonnegative")
        total = float(np.sum(self.probs))
        if abs(total - 1.0) > PROB_SUM_TOLERANCE:
            raise SchemaError(
                f"probs sum {total!r} outside 1 +/- {PROB_SUM_TOLERANCE}")


@dataclass(frozen=True)
class DatasetManifest:
    """Sidecar metadata binding a record file to the registry that produced it."""

    dataset_id: str
    record_count: int
    registry_hash: str
    kind: str
    seed: int | None = None
    extra: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MANIFEST_KINDS:
            raise SchemaError(f"manifest kind must be one of {MANIFEST_KINDS}, "
                              f"got {self.kind!r}")
        if not _is_int(self.record_count) or self.record_count < 0:
            raise SchemaError("record_count must be a nonnegative integer")


def manifest_path(records_path: str | Path) -> Path:
    p = Path(records_path)
    return p.with_name(p.name + ".manifest.json")


def write_manifest(manifest: DatasetManifest, records_path: str | Path) -> Path:
    payload: dict[str, object] = {
        "dataset_id": manifest.dataset_id,
        "record_count": manifest.record_count,
        "registry_hash": manifest.registry_hash,
        "kind": manifest.kind,
    }
    if manifest.seed is not None:
        payload["seed"] = manifest.seed
    payload.update(manifest.extra)
    out = manifest_path(records_path)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    return out


def read_manifest(records_path: str | Path) -> DatasetManifest:
    path = manifest_path(records_path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise SchemaError(f"unreadable manifest: {e}", path=path) from e
    except json.JSONDecodeError as e:
        raise SchemaError(f"malformed JSON: {e.msg}", path=path, line=e.lineno) from e
    required = {"dataset_id", "record_count", "registry_hash", "kind"}
    missing = required - set(obj)
    if missing:
        raise SchemaError(f"missing manifest fields: {sorted(missing)}", path=path)
    extra = {k: v for k, v in obj.items() if k not in required | {"seed"}}
    try:
        return DatasetManifest(
            dataset_id=obj["dataset_id"], record_count=obj["record_count"],
            registry_hash=obj["registry_hash"], kind=obj["kind"],
            seed=obj.get("seed"), extra=extra)
    except SchemaError as e:
        raise SchemaError(e.message, path=path) from e


TEXTURE_RECORD_FIELDS = ("record_id", "texture_class_id", "predicted_object_id",
                         "confidence")
IMAGE_RECORD_FIELDS = ("record_id", "dataset_id", "true_label_id", "probs")


def read_texture_records(path: str | Path,
                         reg: ClassRegistry) -> Iterator[TextureProbeRecord]:
    """Yield validated texture-probe records in file order."""
    path = Path(path)
    with _open_records(path) as f:
        for lineno, line in enumerate(f, start=1):
            obj = _parse_line(line, path, lineno)
            _check_fields(obj, TEXTURE_RECORD_FIELDS, optional=(),
                          path=path, lineno=lineno)
            record = TextureProbeRecord(
                record_id=obj["record_id"],
                texture_class_id=obj["texture_class_id"],
                predicted_object_id=obj["predicted_object_id"],
                confidence=_as_real(obj["confidence"], "confidence", path, lineno),
            )
            _validate_at(record, reg, path, lineno)
            yield record


def read_image_records(path: str | Path,
                       reg: ClassRegistry) -> Iterator[ImageProbeRecord]:
    """Yield validated image-probe records in file order."""
    path = Path(path)
    with _open_records(path) as f:
        for lineno, line in enumerate(f, start=1):
            obj = _parse_line(line, path, lineno)
            _check_fields(obj, ("record_id", "dataset_id", "probs"),
                          optional=("true_label_id",), path=path, lineno=lineno)
            probs = obj["probs"]
            if not isinstance(probs, list) or not all(_is_real(p) for p in probs):
                raise SchemaError("probs must be a list of numbers",
                                  path=path, line=lineno)
            record = ImageProbeRecord(
                record_id=obj["record_id"],
                dataset_id=obj["dataset_id"],
                probs=np.array(probs, dtype=np.float64),
                true_label_id=obj.get("true_label_id"),
            )
            _validate_at(record, reg, path, lineno)
            yield record


def write_texture_records(path: str | Path,
                          records: Iterable[TextureProbeRecord]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps({
                "record_id": rec.record_id,
                "texture_class_id": rec.texture_class_id,
                "predicted_object_id": rec.predicted_object_id,
                "confidence": rec.confidence,
            }) + "\n")
            count += 1
    return count


def write_image_records(path: str | Path,
                        records: Iterable[ImageProbeRecord]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            obj: dict[str, object] = {
                "record_id": rec.record_id,
                "dataset_id": rec.dataset_id,
            }
            if rec.true_label_id is not None:
                obj["true_label_id"] = rec.true_label_id
            obj["probs"] = [float(p) for p in rec.probs]
            f.write(json.dumps(obj) + "\n")
            count += 1
    return count


def _reject_constant(name: str):
    raise ValueError(f"non-finite constant {name} not allowed")


def _open_records(path: Path):
    try:
        return open(path, "r", encoding="utf-8")
    except OSError as e:
        raise SchemaError(f"unreadable record file: {e}", path=path) from e


def _parse_line(line: str, path: Path, lineno: int) -> dict:
    try:
        obj = json.loads(line, parse_constant=_reject_constant)
    except ValueError as e:
        msg = e.msg if isinstance(e, json.JSONDecodeError) else str(e)
        raise SchemaError(f"malformed JSON line: {msg}",
                          path=path, line=lineno) from e
    if not isinstance(obj, dict):
        raise SchemaError("record line must be a JSON object",
                          path=path, line=lineno)
    return obj


def _check_fields(obj: dict, required: tuple[str, ...], optional: tuple[str, ...],
                  path: Path, lineno: int) -> None:
    missing = [k for k in required if k not in obj]
    if missing:
        raise SchemaError(f"missing fields: {missing}", path=path, line=lineno)
    unexpected = sorted(set(obj) - set(required) - set(optional))
    if unexpected:
        raise SchemaError(f"unexpected fields: {unexpected}",
                          path=path, line=lineno)


def _validate_at(record, reg: ClassRegistry, path: Path, lineno: int) -> None:
    try:
        record.validate(reg)
    except SchemaError as e:
        raise SchemaError(e.message, path=path, line=lineno) from e


def _as_real(value, name: str, path: Path, lineno: int) -> float:
    if not _is_real(value):
        raise SchemaError(f"{name} must be a number, got {value!r}",
                          path=path, line=lineno)
    return float(value)


def _is_int(value) -> bool:
    return type(value) is int


def _is_real(value) -> bool:
    return type(value) in (int, float)
