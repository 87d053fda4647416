"""Class-folder datasets: one subfolder per registry class name."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


class DatasetError(ValueError):
    """The dataset folder does not map onto the registry."""


@dataclass(frozen=True)
class ImageEntry:
    """One candidate image file; class_id is None for unlabeled entries."""

    path: Path
    record_id: str
    class_id: int | None


def scan_dataset(root: str | Path, class_names: tuple[str, ...],
                 require_class: bool) -> list[ImageEntry]:
    """Map the folder layout onto registry class ids.

    Subfolder names must be registry class names; their files get that
    class id. Top-level files are allowed only when require_class is
    False and carry no class id. Entries come back sorted by record id so
    every run visits files in the same order.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")
    ids = {name: i for i, name in enumerate(class_names)}

    entries: list[ImageEntry] = []
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        if sub.name not in ids:
            raise DatasetError(
                f"registry mismatch: folder {sub.name!r} is not a registry "
                f"class name")
        for f in _files(sub):
            entries.append(ImageEntry(
                path=f,
                record_id=f.relative_to(root).as_posix(),
                class_id=ids[sub.name],
            ))

    loose = _files(root)
    if loose and require_class:
        raise DatasetError(
            f"{len(loose)} top-level files in {root}; this record kind "
            f"requires one subfolder per class")
    for f in loose:
        entries.append(ImageEntry(path=f, record_id=f.name, class_id=None))

    if not entries:
        raise DatasetError(f"no image files under {root}")
    entries.sort(key=lambda e: e.record_id)
    return entries


def _files(folder: Path) -> list[Path]:
    # Dotfiles are editor or OS droppings, not candidate images.
    return sorted(p for p in folder.iterdir()
                  if p.is_file() and not p.name.startswith("."))
