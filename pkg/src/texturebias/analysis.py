"""Aggregate analyses over texture assignments.

Covers the per-class texture groupings (by true label and by prediction),
dominant-texture splits of accuracy and confidence, ratio/metric
correlations, texture-count statistics, the four-way alignment breakdown of
adversarial samples against dominant textures, per-label agreement rates on
the disagreement subset, and mean-magnitude comparison between record sets.

Counts merge exactly; means are accumulated as (sum, count) pairs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .schema import ClassRegistry, SchemaError
from .tid import TidAssignment
from .util import fmt

MODES = ("label", "prediction")


@dataclass(frozen=True)
class AnalysisGroup:
    """One (class, texture) bucket.

    ``mean_metric`` is accuracy in label mode and mean confidence in
    prediction mode; ``count_ratio`` is normalized within the class.
    """

    class_id: int
    texture_id: int
    sample_count: int
    count_ratio: float
    mean_metric: float


@dataclass(frozen=True)
class DominantEntry:
    """Most frequent texture within one class."""

    texture_id: int
    sample_count: int
    tie: bool


@dataclass(frozen=True)
class DominanceSplit:
    """Metric means for samples with vs. without their class's dominant texture."""

    dominant_mean: float | None
    nondominant_mean: float | None
    overall_mean: float | None
    dominant_count: int
    nondominant_count: int


@dataclass(frozen=True)
class AlignmentReport:
    """Four-way split of samples by dominant-texture agreement.

    Ratios are over categorizable samples; samples whose predicted or label
    class is missing from the dominant maps are tallied as uncovered and
    excluded.
    """

    both_ratio: float
    pred_only_ratio: float
    label_only_ratio: float
    neither_ratio: float
    sample_count: int
    uncovered_count: int


@dataclass(frozen=True)
class LabelAgreement:
    """Agreement rates over one label's disagreement-subset samples."""

    pred_agree_rate: float
    label_agree_rate: float
    sample_count: int


def group_by_label(assignments: Iterable[TidAssignment]) -> list[AnalysisGroup]:
    """Texture groupings per true label; metric is accuracy.

    Every assignment must carry a true label.
    """
    tallies: dict[tuple[int, int], list[float]] = {}
    class_totals: dict[int, int] = {}
    for a in assignments:
        if a.true_label_id is None:
            raise ValueError(f"record {a.record_id!r} has no true label")
        key = (a.true_label_id, a.texture_id)
        metric = 1.0 if a.predicted_object_id == a.true_label_id else 0.0
        _accumulate(tallies, key, metric)
        class_totals[a.true_label_id] = class_totals.get(a.true_label_id, 0) + 1
    return _to_groups(tallies, class_totals)


def group_by_prediction(assignments: Iterable[TidAssignment]) -> list[AnalysisGroup]:
    """Texture groupings per predicted class; metric is mean confidence."""
    tallies: dict[tuple[int, int], list[float]] = {}
    class_totals: dict[int, int] = {}
    for a in assignments:
        key = (a.predicted_object_id, a.texture_id)
        _accumulate(tallies, key, a.confidence)
        class_totals[a.predicted_object_id] = \
            class_totals.get(a.predicted_object_id, 0) + 1
    return _to_groups(tallies, class_totals)


def _accumulate(tallies, key, metric: float) -> None:
    entry = tallies.setdefault(key, [0.0, 0])
    entry[0] += metric
    entry[1] += 1


def _to_groups(tallies, class_totals) -> list[AnalysisGroup]:
    return [
        AnalysisGroup(class_id=class_id, texture_id=texture_id,
                      sample_count=count, count_ratio=count / class_totals[class_id],
                      mean_metric=metric_sum / count)
        for (class_id, texture_id), (metric_sum, count) in sorted(tallies.items())
    ]


def dominant_textures(groups: Sequence[AnalysisGroup]) -> dict[int, DominantEntry]:
    """Per class, the texture with the most samples (lowest id on ties)."""
    best: dict[int, DominantEntry] = {}
    for g in sorted(groups, key=lambda g: (g.class_id, g.texture_id)):
        cur = best.get(g.class_id)
        if cur is None or g.sample_count > cur.sample_count:
            best[g.class_id] = DominantEntry(g.texture_id, g.sample_count, False)
        elif g.sample_count == cur.sample_count:
            best[g.class_id] = DominantEntry(cur.texture_id, cur.sample_count, True)
    return best


def dominance_split(assignments: Iterable[TidAssignment],
                    dom: Mapping[int, DominantEntry],
                    mode: str) -> DominanceSplit:
    """Partition samples by whether they carry their class's dominant texture.

    Label mode reports mean accuracy keyed by true label; prediction mode
    reports mean confidence keyed by predicted class.
    """
    _check_mode(mode)
    sums = {True: 0.0, False: 0.0}
    counts = {True: 0, False: 0}
    for a in assignments:
        if mode == "label":
            if a.true_label_id is None:
                raise ValueError(f"record {a.record_id!r} has no true label")
            class_id = a.true_label_id
            metric = 1.0 if a.predicted_object_id == a.true_label_id else 0.0
        else:
            class_id = a.predicted_object_id
            metric = a.confidence
        entry = dom.get(class_id)
        if entry is None:
            raise ValueError(f"class {class_id} missing from dominant-texture map")
        side = a.texture_id == entry.texture_id
        sums[side] += metric
        counts[side] += 1
    total = counts[True] + counts[False]
    return DominanceSplit(
        dominant_mean=sums[True] / counts[True] if counts[True] else None,
        nondominant_mean=sums[False] / counts[False] if counts[False] else None,
        overall_mean=(sums[True] + sums[False]) / total if total else None,
        dominant_count=counts[True],
        nondominant_count=counts[False],
    )


def ratio_metric_correlation(groups: Sequence[AnalysisGroup]) -> float | None:
    """Pearson correlation between group count ratios and metric means.

    Returns None when either variable has zero variance; raises on fewer
    than two groups.
    """
    if len(groups) < 2:
        raise ValueError(f"need at least 2 groups, got {len(groups)}")
    x = np.array([g.count_ratio for g in groups])
    y = np.array([g.mean_metric for g in groups])
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    return float(np.corrcoef(x, y)[0, 1])


def avg_textures_per_class(groups: Sequence[AnalysisGroup]) -> float:
    """Mean number of distinct textures across the classes present."""
    if not groups:
        raise ValueError("no groups")
    per_class: dict[int, set[int]] = {}
    for g in groups:
        per_class.setdefault(g.class_id, set()).add(g.texture_id)
    return sum(len(t) for t in per_class.values()) / len(per_class)


def alignment_categories(adv_assignments: Iterable[TidAssignment],
                         label_dom: Mapping[int, DominantEntry],
                         pred_dom: Mapping[int, DominantEntry]) -> AlignmentReport:
    """Categorize samples by dominant-texture agreement with prediction/label.

    A sample's texture is compared against the dominant texture of its
    predicted class and of its label class; the four outcomes partition the
    categorizable samples.
    """
    counts = {"both": 0, "pred": 0, "label": 0, "neither": 0}
    uncovered = 0
    for a in adv_assignments:
        category = _alignment_category(a, label_dom, pred_dom)
        if category is None:
            uncovered += 1
        else:
            counts[category] += 1
    total = sum(counts.values())
    if total == 0:
        raise ValueError("no categorizable samples")
    return AlignmentReport(
        both_ratio=counts["both"] / total,
        pred_only_ratio=counts["pred"] / total,
        label_only_ratio=counts["label"] / total,
        neither_ratio=counts["neither"] / total,
        sample_count=total,
        uncovered_count=uncovered,
    )


def per_label_agreement(adv_assignments: Iterable[TidAssignment],
                        label_dom: Mapping[int, DominantEntry],
                        pred_dom: Mapping[int, DominantEntry],
                        ) -> dict[int, LabelAgreement]:
    """Agreement rates per label over its pred-only and label-only samples.

    Labels with no such samples are omitted.
    """
    tallies: dict[int, list[int]] = {}
    for a in adv_assignments:
        category = _alignment_category(a, label_dom, pred_dom)
        if category not in ("pred", "label"):
            continue
        entry = tallies.setdefault(a.true_label_id, [0, 0])
        entry[0 if category == "pred" else 1] += 1
    return {
        label: LabelAgreement(
            pred_agree_rate=pred / (pred + lab),
            label_agree_rate=lab / (pred + lab),
            sample_count=pred + lab,
        )
        for label, (pred, lab) in sorted(tallies.items())
    }


def _alignment_category(a: TidAssignment,
                        label_dom: Mapping[int, DominantEntry],
                        pred_dom: Mapping[int, DominantEntry]) -> str | None:
    if a.true_label_id is None:
        raise ValueError(f"record {a.record_id!r} has no true label")
    pred_entry = pred_dom.get(a.predicted_object_id)
    label_entry = label_dom.get(a.true_label_id)
    if pred_entry is None or label_entry is None:
        return None
    pred_match = a.texture_id == pred_entry.texture_id
    label_match = a.texture_id == label_entry.texture_id
    if pred_match and label_match:
        return "both"
    if pred_match:
        return "pred"
    if label_match:
        return "label"
    return "neither"


def magnitude_comparison(set_a: Sequence[TidAssignment],
                         set_b: Sequence[TidAssignment]) -> tuple[float, float]:
    """Mean similarity magnitude of two assignment sets."""
    if not set_a or not set_b:
        raise ValueError("both assignment sets must be nonempty")
    return (sum(a.similarity for a in set_a) / len(set_a),
            sum(b.similarity for b in set_b) / len(set_b))


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


GROUPS_HEADER = ["mode", "class_id", "class_name", "texture_id", "texture_name",
                 "count", "ratio", "metric"]
DOMINANCE_HEADER = ["mode", "class_id", "class_name", "texture_id",
                    "texture_name", "count", "tie"]
DOMINANCE_SPLIT_HEADER = ["mode", "dominant_count", "nondominant_count",
                          "dominant_mean", "nondominant_mean", "overall_mean"]
ALIGNMENT_HEADER = ["both_ratio", "pred_only_ratio", "label_only_ratio",
                    "neither_ratio", "sample_count", "uncovered_count"]
PER_LABEL_AGREEMENT_HEADER = ["label_id", "label_name", "pred_agree_rate",
                              "label_agree_rate", "sample_count"]
MAGNITUDE_HEADER = ["dataset", "mean_similarity", "sample_count"]
CORRELATIONS_HEADER = ["mode", "group_count", "pearson_r", "avg_textures"]


def write_groups_csv(groups_by_mode: Mapping[str, Sequence[AnalysisGroup]],
                     reg: ClassRegistry, path: str | Path) -> None:
    with _csv_writer(path, GROUPS_HEADER) as w:
        for mode in MODES:
            for g in groups_by_mode.get(mode, ()):
                w.writerow([mode, g.class_id, reg.object_name(g.class_id),
                            g.texture_id, reg.texture_name(g.texture_id),
                            g.sample_count, fmt(g.count_ratio),
                            fmt(g.mean_metric)])


def write_dominance_csv(dom_by_mode: Mapping[str, Mapping[int, DominantEntry]],
                        reg: ClassRegistry, path: str | Path) -> None:
    with _csv_writer(path, DOMINANCE_HEADER) as w:
        for mode in MODES:
            for class_id, entry in sorted(dom_by_mode.get(mode, {}).items()):
                w.writerow([mode, class_id, reg.object_name(class_id),
                            entry.texture_id, reg.texture_name(entry.texture_id),
                            entry.sample_count, int(entry.tie)])


def write_dominance_split_csv(split_by_mode: Mapping[str, DominanceSplit],
                              path: str | Path) -> None:
    with _csv_writer(path, DOMINANCE_SPLIT_HEADER) as w:
        for mode in MODES:
            s = split_by_mode.get(mode)
            if s is None:
                continue
            w.writerow([mode, s.dominant_count, s.nondominant_count,
                        _opt(s.dominant_mean), _opt(s.nondominant_mean),
                        _opt(s.overall_mean)])


def write_alignment_csv(report: AlignmentReport, path: str | Path) -> None:
    with _csv_writer(path, ALIGNMENT_HEADER) as w:
        w.writerow([fmt(report.both_ratio), fmt(report.pred_only_ratio),
                    fmt(report.label_only_ratio), fmt(report.neither_ratio),
                    report.sample_count, report.uncovered_count])


def write_per_label_agreement_csv(rates: Mapping[int, LabelAgreement],
                                  reg: ClassRegistry, path: str | Path) -> None:
    with _csv_writer(path, PER_LABEL_AGREEMENT_HEADER) as w:
        for label, r in sorted(rates.items()):
            w.writerow([label, reg.object_name(label), fmt(r.pred_agree_rate),
                        fmt(r.label_agree_rate), r.sample_count])


def write_magnitude_csv(rows: Sequence[tuple[str, float, int]],
                        path: str | Path) -> None:
    with _csv_writer(path, MAGNITUDE_HEADER) as w:
        for dataset, mean, count in rows:
            w.writerow([dataset, fmt(mean), count])


def write_correlations_csv(rows: Sequence[tuple[str, int, float | None, float]],
                           path: str | Path) -> None:
    with _csv_writer(path, CORRELATIONS_HEADER) as w:
        for mode, group_count, r, avg_textures in rows:
            w.writerow([mode, group_count, _opt(r), fmt(avg_textures)])


def _opt(value: float | None) -> str:
    return "" if value is None else fmt(value)


class _csv_writer:
    """Context manager writing a fixed header then rows with \\n line ends."""

    def __init__(self, path: str | Path, header: Sequence[str]):
        self._path = path
        self._header = header

    def __enter__(self):
        self._f = open(self._path, "w", encoding="utf-8", newline="")
        w = csv.writer(self._f, lineterminator="\n")
        w.writerow(self._header)
        return w

    def __exit__(self, *exc):
        self._f.close()
        return False


def read_table(path: str | Path,
               header: Sequence[str]) -> list[list[str]]:
    """Read a CSV produced by this module, checking its declared header."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        actual = next(reader, None)
        if actual != list(header):
            raise SchemaError(f"expected header {list(header)}, got {actual}",
                              path=path, line=1)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaError(f"expected {len(header)} columns",
                                  path=path, line=lineno)
            rows.append(row)
    return rows
