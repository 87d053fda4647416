"""Human-evaluation packaging and agreement scoring.

Builds packages of records for human texture labeling: each item shows the
record's assigned texture plus 3 distractor textures in shuffled order, with
the assigned option's position stored but hidden from display. Responses
come back as CSV and are scored as agreement iff the assigned option is
among the selections.

Package files are JSON with sorted keys; the generator algorithm is recorded
in the file so packages are reproducible. Data volumes are tiny, so
everything here is single-threaded.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .schema import ClassRegistry, SchemaError
from .tid import TidAssignment
from .util import fmt

GENERATOR = "numpy-pcg64"
OPTION_COUNT = 4
RESPONSE_HEADER = ["package_id", "record_id", "selected_indices"]
AGREEMENT_HEADER = ["scope", "texture_id", "texture_name", "answered",
                    "agreeing", "rate"]


@dataclass(frozen=True)
class EvalItem:
    """One record to label: 4 distinct texture options in display order.

    ``tid_option_index`` locates the assigned texture among the options; it
    is stored for scoring but must never be shown to evaluators.
    """

    record_id: str
    image_ref: str
    options: tuple[int, int, int, int]
    tid_option_index: int

    def __post_init__(self):
        if len(self.options) != OPTION_COUNT:
            raise ValueError(f"need {OPTION_COUNT} options, got {len(self.options)}")
        if len(set(self.options)) != OPTION_COUNT:
            raise ValueError(f"options must be distinct, got {self.options}")
        if not 0 <= self.tid_option_index < OPTION_COUNT:
            raise ValueError(f"tid_option_index {self.tid_option_index} out of range")

    @property
    def tid_texture_id(self) -> int:
        return self.options[self.tid_option_index]


@dataclass(frozen=True)
class EvalPackage:
    """A set of items for one evaluation session.

    ``texture_names`` covers every texture referenced by any option so the
    package is displayable without the registry.
    """

    package_id: str
    items: tuple[EvalItem, ...]
    seed: int
    texture_names: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        ids = [it.record_id for it in self.items]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate record ids in package")
        for it in self.items:
            for t in it.options:
                if t not in self.texture_names:
                    raise ValueError(f"texture {t} missing from texture_names")


@dataclass(frozen=True)
class EvalResponse:
    """Selections per answered record; indices refer to display positions."""

    package_id: str
    selections: Mapping[str, tuple[int, ...]]

    def __post_init__(self):
        for record_id, sel in self.selections.items():
            if not sel:
                raise ValueError(f"record {record_id!r} has no selections")
            for idx in sel:
                if not 0 <= idx < OPTION_COUNT:
                    raise ValueError(
                        f"selection index {idx} out of range for record {record_id!r}")


@dataclass(frozen=True)
class TextureAgreement:
    answered: int
    agreeing: int
    rate: float


@dataclass(frozen=True)
class ScoreReport:
    overall_rate: float
    answered: int
    agreeing: int
    per_texture: Mapping[int, TextureAgreement]


def pack(assignments: Sequence[TidAssignment],
         image_refs: Mapping[str, str] | None,
         count: int,
         seed: int,
         reg: ClassRegistry,
         package_id: str | None = None) -> EvalPackage:
    """Sample ``count`` assignments and build their labeling items.

    Sampling is uniform without replacement; distractors are drawn uniformly
    from the other textures; option order is shuffled. All randomness comes
    from one seeded PCG64 generator, so identical inputs and seed give an
    identical package. ``image_refs`` of None uses each record id as its own
    image reference.
    """
    if reg.n < OPTION_COUNT:
        raise ValueError(f"need at least {OPTION_COUNT} textures, got {reg.n}")
    if count > len(assignments):
        raise ValueError(f"count {count} exceeds {len(assignments)} assignments")
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(assignments), size=count, replace=False)
    all_textures = np.arange(reg.n)
    items = []
    for i in chosen:
        a = assignments[int(i)]
        others = all_textures[all_textures != a.texture_id]
        distractors = rng.choice(others, size=OPTION_COUNT - 1, replace=False)
        options = np.concatenate(([a.texture_id], distractors))
        options = options[rng.permutation(OPTION_COUNT)]
        tid_index = int(np.nonzero(options == a.texture_id)[0][0])
        ref = a.record_id if image_refs is None else image_refs.get(a.record_id)
        if ref is None:
            raise ValueError(f"no image ref for record {a.record_id!r}")
        items.append(EvalItem(record_id=a.record_id, image_ref=ref,
                              options=tuple(int(t) for t in options),
                              tid_option_index=tid_index))
    names = {i: reg.texture_name(i) for i in range(reg.n)}
    return EvalPackage(package_id=package_id or f"eval-{seed}",
                       items=tuple(items), seed=seed, texture_names=names)


def score(package: EvalPackage, response: EvalResponse) -> ScoreReport:
    """Agreement rates: an item agrees iff its hidden option was selected.

    Per-texture rates group items by their assigned texture. The response
    must reference this package and only records it contains.
    """
    if response.package_id != package.package_id:
        raise ValueError(f"response is for package {response.package_id!r}, "
                         f"not {package.package_id!r}")
    by_record = {it.record_id: it for it in package.items}
    tallies: dict[int, list[int]] = {}
    answered = agreeing = 0
    for record_id, sel in response.selections.items():
        item = by_record.get(record_id)
        if item is None:
            raise ValueError(f"record {record_id!r} not in package")
        agree = item.tid_option_index in sel
        entry = tallies.setdefault(item.tid_texture_id, [0, 0])
        entry[0] += 1
        entry[1] += int(agree)
        answered += 1
        agreeing += int(agree)
    if answered == 0:
        raise ValueError("response answers no items")
    per_texture = {
        t: TextureAgreement(answered=n, agreeing=k, rate=k / n)
        for t, (n, k) in sorted(tallies.items())
    }
    return ScoreReport(overall_rate=agreeing / answered, answered=answered,
                       agreeing=agreeing, per_texture=per_texture)


def write_package(package: EvalPackage, path: str | Path) -> None:
    """Serialize to JSON. Sorted keys and fixed layout keep output stable."""
    doc = {
        "package_id": package.package_id,
        "seed": package.seed,
        "generator": GENERATOR,
        "texture_names": {str(t): name
                          for t, name in sorted(package.texture_names.items())},
        "items": [
            {"record_id": it.record_id, "image_ref": it.image_ref,
             "options": list(it.options),
             "tid_option_index": it.tid_option_index}
            for it in package.items
        ],
    }
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


_PACKAGE_FIELDS = {"package_id", "seed", "generator", "texture_names", "items"}
_ITEM_FIELDS = {"record_id", "image_ref", "options", "tid_option_index"}


def read_package(path: str | Path) -> EvalPackage:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e.msg}", path=path, line=e.lineno)
    if not isinstance(doc, dict):
        raise SchemaError("package must be a JSON object", path=path)
    _check_keys(doc, _PACKAGE_FIELDS, "package", path)
    if doc["generator"] != GENERATOR:
        raise SchemaError(f"unsupported generator {doc['generator']!r}", path=path)
    try:
        names = {int(t): str(name) for t, name in doc["texture_names"].items()}
        items = []
        for raw in doc["items"]:
            _check_keys(raw, _ITEM_FIELDS, "item", path)
            items.append(EvalItem(record_id=raw["record_id"],
                                  image_ref=raw["image_ref"],
                                  options=tuple(raw["options"]),
                                  tid_option_index=raw["tid_option_index"]))
        return EvalPackage(package_id=doc["package_id"], items=tuple(items),
                           seed=doc["seed"], texture_names=names)
    except (TypeError, ValueError, AttributeError) as e:
        raise SchemaError(f"invalid package: {e}", path=path)


def _check_keys(doc: Mapping, expected: set, kind: str, path) -> None:
    missing = expected - set(doc)
    unexpected = set(doc) - expected
    if missing:
        raise SchemaError(f"{kind} missing fields {sorted(missing)}", path=path)
    if unexpected:
        raise SchemaError(f"{kind} has unexpected fields {sorted(unexpected)}",
                          path=path)


def write_responses_csv(response: EvalResponse, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(RESPONSE_HEADER)
        for record_id, sel in response.selections.items():
            w.writerow([response.package_id, record_id,
                        ";".join(str(i) for i in sel)])


def read_responses_csv(path: str | Path) -> EvalResponse:
    """Parse a response CSV; all rows must share one package id."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != RESPONSE_HEADER:
            raise SchemaError(f"expected header {RESPONSE_HEADER}, got {header}",
                              path=path, line=1)
        package_id = None
        selections: dict[str, tuple[int, ...]] = {}
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise SchemaError("expected 3 columns", path=path, line=lineno)
            pkg, record_id, raw_sel = row
            if package_id is None:
                package_id = pkg
            elif pkg != package_id:
                raise SchemaError(f"mixed package ids {package_id!r} and {pkg!r}",
                                  path=path, line=lineno)
            if record_id in selections:
                raise SchemaError(f"duplicate record {record_id!r}",
                                  path=path, line=lineno)
            try:
                sel = tuple(int(part) for part in raw_sel.split(";"))
            except ValueError:
                raise SchemaError(f"bad selection list {raw_sel!r}",
                                  path=path, line=lineno)
            selections[record_id] = sel
    if package_id is None:
        raise SchemaError("no response rows", path=path)
    try:
        return EvalResponse(package_id=package_id, selections=selections)
    except ValueError as e:
        raise SchemaError(str(e), path=path)


def write_agreement_csv(report: ScoreReport, package: EvalPackage,
                        path: str | Path) -> None:
    """Overall row first, then per-texture rows by ascending texture id."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(AGREEMENT_HEADER)
        w.writerow(["overall", "", "", report.answered, report.agreeing,
                    fmt(report.overall_rate)])
        for t, ta in sorted(report.per_texture.items()):
            w.writerow(["texture", t, package.texture_names.get(t, ""),
                        ta.answered, ta.agreeing, fmt(ta.rate)])


def simulate_uniform_responses(package: EvalPackage, seed: int) -> EvalResponse:
    """Single uniform random selection per item; the guessing baseline."""
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, OPTION_COUNT, size=len(package.items))
    return EvalResponse(
        package_id=package.package_id,
        selections={it.record_id: (int(p),)
                    for it, p in zip(package.items, picks)},
    )
