"""Texture association values from texture-probe prediction counts.

The association matrix is built in two steps: tally how often each texture
class is predicted as each object class, then combine row- and
column-conditional probabilities with entropy complements into a single
score per (texture, object) pair:

    value[i][j] = pt[i][j] * (1 - th[i]) * po[i][j] * (1 - oh[j])

Entropies are normalized by the log of their support size so every factor
stays in [0, 1] (the "normalized" mode); the unnormalized natural-log
variant is kept as an option for fidelity experiments.

Entropy sums are performed over sorted terms, which makes row/column
permutations of the count matrix permute the output bit-exactly.
"""

from __future__ import annotations

import concurrent.futures
import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .schema import ClassRegistry, SchemaError, TextureProbeRecord
from .util import chunked, fmt

ENTROPY_MODES = ("normalized", "raw")

# Records tallied per numpy scatter-add; also the shard size for workers.
_TALLY_CHUNK = 8192


@dataclass(frozen=True, eq=False)
class CountMatrix:
    """Prediction tally: counts[i][j] = texture-i records predicted as object j."""

    counts: np.ndarray
    total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.ndim != 2:
            raise ValueError("counts must be a 2-d matrix")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        if int(counts.sum()) != self.total:
            raise ValueError(f"total {self.total} != sum of entries {counts.sum()}")

    @property
    def n(self) -> int:
        return self.counts.shape[0]

    @property
    def m(self) -> int:
        return self.counts.shape[1]


@dataclass(frozen=True, eq=False)
class TavComponents:
    """The four factors combined into association values.

    pt: row-conditional probabilities (texture -> object)
    po: column-conditional probabilities (object -> texture)
    th: normalized entropy of each texture's prediction distribution
    oh: normalized entropy of each object's source-texture distribution
    """

    pt: np.ndarray
    po: np.ndarray
    th: np.ndarray
    oh: np.ndarray


@dataclass(frozen=True, eq=False)
class TavMatrix:
    """Association values, one row per texture class, one column per object."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise ValueError("values must be a 2-d matrix")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ConfidenceHistogram:
    """Uniform-bin histogram of prediction confidences over [0, 1]."""

    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    total: int


def count_matrix(records: Iterable[TextureProbeRecord],
                 reg: ClassRegistry) -> CountMatrix:
    """Tally texture -> predicted-object counts in a single pass.

    ``reg`` only needs ``n`` and ``m`` attributes, so any registry-shaped
    object works.
    """
    counts = np.zeros((reg.n, reg.m), dtype=np.int64)
    total = 0
    for chunk in chunked(records, _TALLY_CHUNK):
        _tally_into(counts, chunk)
        total += len(chunk)
    return CountMatrix(counts=counts, total=total)


def parallel_count_matrix(records: Iterable[TextureProbeRecord],
                          reg: ClassRegistry, workers: int = 1) -> CountMatrix:
    """Sharded tally with exact integer merges.

    Shard boundaries are fixed by chunk size, not worker count, and integer
    addition is order-independent, so the result is identical for any
    ``workers`` value.
    """
    if workers <= 1:
        return count_matrix(records, reg)
    shape = (reg.n, reg.m)

    def tally_chunk(chunk: Sequence[TextureProbeRecord]) -> np.ndarray:
        part = np.zeros(shape, dtype=np.int64)
        _tally_into(part, chunk)
        return part

    counts = np.zeros(shape, dtype=np.int64)
    total = 0
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        chunks = list(chunked(records, _TALLY_CHUNK))
        for chunk, part in zip(chunks, pool.map(tally_chunk, chunks)):
            counts += part
            total += len(chunk)
    return CountMatrix(counts=counts, total=total)


def _tally_into(counts: np.ndarray, chunk: Sequence[TextureProbeRecord]) -> None:
    if not chunk:
        return
    ti = np.fromiter((r.texture_class_id for r in chunk), dtype=np.int64,
                     count=len(chunk))
    oi = np.fromiter((r.predicted_object_id for r in chunk), dtype=np.int64,
                     count=len(chunk))
    np.add.at(counts, (ti, oi), 1)


def tav_components(N: CountMatrix, entropy: str = "normalized") -> TavComponents:
    """Conditional probabilities and entropies of the count matrix.

    Zero rows/columns yield all-zero probabilities and zero entropy.
    """
    _check_entropy_mode(entropy)
    counts = N.counts.astype(np.float64)
    row = counts.sum(axis=1)
    col = counts.sum(axis=0)
    pt = np.divide(counts, row[:, None], out=np.zeros_like(counts),
                   where=row[:, None] > 0)
    po = np.divide(counts, col[None, :], out=np.zeros_like(counts),
                   where=col[None, :] > 0)
    th = _entropy(pt, axis=1, support=N.m, normalized=entropy == "normalized")
    oh = _entropy(po, axis=0, support=N.n, normalized=entropy == "normalized")
    return TavComponents(pt=pt, po=po, th=th, oh=oh)


def tav(N: CountMatrix, entropy: str = "normalized") -> TavMatrix:
    """Association value for every (texture, object) pair."""
    c = tav_components(N, entropy=entropy)
    values = c.pt * (1.0 - c.th)[:, None] * c.po * (1.0 - c.oh)[None, :]
    return TavMatrix(values=values)


def _entropy(p: np.ndarray, axis: int, support: int, normalized: bool) -> np.ndarray:
    # 0*log(0) taken as 0.
    terms = np.where(p > 0, -p * np.log(p, out=np.zeros_like(p), where=p > 0), 0.0)
    # Sorting before the sum makes the reduction invariant to permutations
    # of the opposite axis.
    h = np.sort(terms, axis=axis).sum(axis=axis)
    if not normalized:
        return h
    if support < 2:
        return np.zeros_like(h)
    # Normalized entropy lies in [0, 1]; clip float dust so the complement
    # never goes negative.
    return np.clip(h / np.log(support), 0.0, 1.0)


def _check_entropy_mode(entropy: str) -> None:
    if entropy not in ENTROPY_MODES:
        raise ValueError(f"entropy mode must be one of {ENTROPY_MODES}, "
                         f"got {entropy!r}")


def top_pairs(tavm: TavMatrix, k: int,
              reg: ClassRegistry) -> list[tuple[str, str, float]]:
    """The k strongest (object name, texture name, value) associations.

    Ordered by non-increasing value; ties broken by (texture id, object id)
    ascending.
    """
    n, m = tavm.n, tavm.m
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if k > n * m:
        raise ValueError(f"k={k} exceeds number of pairs {n * m}")
    flat = tavm.values.ravel()
    # Stable sort on the negated values keeps ties in ravel order, which is
    # exactly (texture id, object id) ascending.
    order = np.argsort(-flat, kind="stable")[:k]
    out = []
    for idx in order:
        i, j = divmod(int(idx), m)
        out.append((reg.object_name(j), reg.texture_name(i), float(flat[idx])))
    return out


def confidence_histogram(records: Iterable[TextureProbeRecord],
                         bins: int) -> ConfidenceHistogram:
    """Uniform histogram of record confidences over [0, 1].

    Bins are half-open [lo, hi) except the last, which is closed so a
    confidence of exactly 1.0 is counted.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    total = 0
    for chunk in chunked(records, _TALLY_CHUNK):
        if not chunk:
            continue
        conf = np.fromiter((r.confidence for r in chunk), dtype=np.float64,
                           count=len(chunk))
        idx = np.searchsorted(edges, conf, side="right") - 1
        np.add.at(counts, np.clip(idx, 0, bins - 1), 1)
        total += len(chunk)
    return ConfidenceHistogram(bin_edges=tuple(float(e) for e in edges),
                               counts=tuple(int(c) for c in counts),
                               total=total)


def write_tav_csv(tavm: TavMatrix, reg: ClassRegistry, path: str | Path) -> None:
    """Matrix CSV: header row of object names, leading texture-name column."""
    if (tavm.n, tavm.m) != (reg.n, reg.m):
        raise ValueError(f"matrix shape {(tavm.n, tavm.m)} does not match "
                         f"registry ({reg.n}, {reg.m})")
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["texture", *reg.object_names])
        for i in range(tavm.n):
            w.writerow([reg.texture_name(i),
                        *(fmt(v) for v in tavm.values[i])])


def read_tav_csv(path: str | Path, reg: ClassRegistry) -> TavMatrix:
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != ["texture", *reg.object_names]:
        raise SchemaError("matrix CSV header does not match registry",
                          path=path, line=1)
    if len(rows) - 1 != reg.n:
        raise SchemaError(f"expected {reg.n} texture rows, got {len(rows) - 1}",
                          path=path)
    values = np.zeros((reg.n, reg.m), dtype=np.float64)
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != reg.m + 1 or row[0] != reg.texture_name(i - 2):
            raise SchemaError("row does not match registry texture order",
                              path=path, line=i)
        try:
            values[i - 2] = [float(v) for v in row[1:]]
        except ValueError as e:
            raise SchemaError(f"bad value: {e}", path=path, line=i) from e
    return TavMatrix(values=values)


def write_top_pairs_csv(pairs: Sequence[tuple[str, str, float]],
                        path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["rank", "object", "texture", "value"])
        for rank, (obj, tex, value) in enumerate(pairs, start=1):
            w.writerow([rank, obj, tex, fmt(value)])


def write_histogram_csv(hist: ConfidenceHistogram, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["bin_index", "bin_lo", "bin_hi", "count"])
        for b, count in enumerate(hist.counts):
            w.writerow([b, fmt(hist.bin_edges[b]), fmt(hist.bin_edges[b + 1]),
                        count])


def iter_top_pairs_rows(path: str | Path) -> Iterator[tuple[int, str, str, float]]:
    """Parse a top-pairs CSV back into typed rows."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["rank", "object", "texture", "value"]:
            raise SchemaError("bad top-pairs header", path=path, line=1)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise SchemaError("expected 4 columns", path=path, line=lineno)
            yield int(row[0]), row[1], row[2], float(row[3])
