"""File formats shared with the texturebias toolkit.

The texturebias package is consumed only through its file contracts, so the
registry layout, the manifest sidecar, and the registry hash are replicated
here byte for byte rather than imported.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path


class FormatError(ValueError):
    """A registry or output file violates the shared format."""


@dataclass(frozen=True)
class Registry:
    """Class names for textures and objects; ids are list positions."""

    textures: tuple[str, ...]
    objects: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.textures)

    @property
    def m(self) -> int:
        return len(self.objects)


def load_registry(path: str | Path) -> Registry:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise FormatError(f"cannot read registry {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"registry {path} is not valid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise FormatError(f"registry {path} must be a JSON object")
    extra = sorted(set(obj) - {"textures", "objects"})
    if extra:
        raise FormatError(f"unexpected registry fields: {extra}")
    names = {}
    for key in ("textures", "objects"):
        values = obj.get(key)
        if (not isinstance(values, list) or len(values) < 2
                or not all(isinstance(v, str) and v for v in values)):
            raise FormatError(
                f"registry field {key!r} must list at least 2 nonempty names")
        if len(set(values)) != len(values):
            raise FormatError(f"registry field {key!r} has duplicate names")
        names[key] = tuple(values)
    return Registry(textures=names["textures"], objects=names["objects"])


def registry_sha256(reg: Registry) -> str:
    # Canonical form: compact separators, textures before objects, ASCII.
    canonical = json.dumps(
        {"textures": list(reg.textures), "objects": list(reg.objects)},
        separators=(",", ":"), ensure_ascii=True,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def manifest_path(records_path: str | Path) -> Path:
    p = Path(records_path)
    return p.with_name(p.name + ".manifest.json")


def write_manifest(records_path: str | Path, *, dataset_id: str,
                   record_count: int, registry_hash: str, kind: str,
                   extra: dict[str, object]) -> Path:
    payload: dict[str, object] = {
        "dataset_id": dataset_id,
        "record_count": record_count,
        "registry_hash": registry_hash,
        "kind": kind,
    }
    payload.update(extra)
    out = manifest_path(records_path)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    return out
