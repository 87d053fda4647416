"""Texture identification: match image probability vectors to association rows.

Each real image is assigned the texture class whose association-matrix row
has the highest cosine similarity with the image's probability vector.  The
maximum cosine itself doubles as a "textureness" magnitude.

All per-record math goes through the same scalar path (``np.einsum`` with
no BLAS dispatch), so batch results are byte-identical no matter how the
record stream is sharded across workers.
"""

from __future__ import annotations

import concurrent.futures
import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .schema import ClassRegistry, ImageProbeRecord, SchemaError
from .tav import TavMatrix
from .util import chunked, fmt

_BATCH_CHUNK = 1024


class TidError(ValueError):
    """Degenerate input to texture identification."""


@dataclass(frozen=True)
class TidAssignment:
    """Chosen texture for one image plus the prediction it came with."""

    record_id: str
    texture_id: int
    similarity: float
    predicted_object_id: int
    confidence: float
    true_label_id: int | None = None


def tid_assign(probs: np.ndarray, tavm: TavMatrix) -> tuple[int, float]:
    """Texture with the highest cosine similarity to ``probs``.

    All-zero association rows are excluded from the argmax; ties break to
    the lowest texture id.  Raises :class:`TidError` for an all-zero probs
    vector or an all-zero matrix.
    """
    probs = _check_probs(probs, tavm)
    cos, valid = _cosines(probs, tavm)
    # Invalid rows sit below every cosine (which are >= 0 for nonnegative
    # vectors), so argmax lands on the first best valid row.
    masked = np.where(valid, cos, -1.0)
    winner = int(np.argmax(masked))
    return winner, float(masked[winner])


def tid_magnitude(probs: np.ndarray, tavm: TavMatrix) -> float:
    """The maximum cosine similarity itself."""
    probs = _check_probs(probs, tavm)
    cos, valid = _cosines(probs, tavm)
    return float(np.max(np.where(valid, cos, -1.0)))


def batch_assign(records: Iterable[ImageProbeRecord], tavm: TavMatrix,
                 workers: int = 1) -> Iterator[TidAssignment]:
    """One assignment per record, in record order.

    Fills the predicted object (argmax of probs, lowest id on ties) and the
    confidence (max of probs) alongside the chosen texture.  Identification
    errors are re-raised with the record id attached.
    """
    if workers <= 1:
        for chunk in chunked(records, _BATCH_CHUNK):
            yield from (_assign_one(rec, tavm) for rec in chunk)
        return

    def assign_chunk(chunk: Sequence[ImageProbeRecord]) -> list[TidAssignment]:
        return [_assign_one(rec, tavm) for rec in chunk]

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
        yield from (a for part in pool.map(assign_chunk,
                                           chunked(records, _BATCH_CHUNK))
                    for a in part)


def _assign_one(rec: ImageProbeRecord, tavm: TavMatrix) -> TidAssignment:
    try:
        texture_id, similarity = tid_assign(rec.probs, tavm)
    except TidError as e:
        raise TidError(f"record {rec.record_id!r}: {e}") from e
    return TidAssignment(
        record_id=rec.record_id,
        texture_id=texture_id,
        similarity=similarity,
        predicted_object_id=int(np.argmax(rec.probs)),
        confidence=float(np.max(rec.probs)),
        true_label_id=rec.true_label_id,
    )


def _check_probs(probs: np.ndarray, tavm: TavMatrix) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1 or probs.size != tavm.m:
        raise TidError(f"probs must have length {tavm.m}, got {probs.size}")
    if np.any(probs < 0):
        raise TidError("probs must be nonnegative")
    if not np.any(probs > 0):
        raise TidError("all-zero probs vector")
    return probs


def _cosines(probs: np.ndarray, tavm: TavMatrix) -> tuple[np.ndarray, np.ndarray]:
    # einsum keeps the reduction in plain C loops: per-record results do not
    # depend on batch shape or BLAS threading.
    dots = np.einsum("nm,m->n", tavm.values, probs)
    row_sq = np.einsum("nm,nm->n", tavm.values, tavm.values)
    valid = np.any(tavm.values != 0, axis=1)
    if not np.any(valid):
        raise TidError("all association rows are zero")
    # Entries below about 1e-154 square to zero in float64; refuse them so a
    # nonzero row is never silently masked and no division by zero happens.
    if np.any(valid & (row_sq == 0)):
        raise TidError("association row magnitude underflows")
    p_sq = np.einsum("m,m->", probs, probs)
    if p_sq == 0:
        raise TidError("probs magnitude underflows")
    p_norm = np.sqrt(p_sq)
    denom = np.sqrt(row_sq, out=np.ones_like(row_sq), where=valid) * p_norm
    cos = np.divide(dots, denom, out=np.zeros_like(dots), where=valid)
    return cos, valid


ASSIGNMENT_HEADER = ["record_id", "texture_id", "texture_name", "similarity",
                     "predicted_object_id", "confidence", "true_label_id"]


def write_assignments_csv(assignments: Iterable[TidAssignment],
                          reg: ClassRegistry, path: str | Path) -> int:
    """Write the assignment export; unlabeled records leave the label empty."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(ASSIGNMENT_HEADER)
        for a in assignments:
            w.writerow([
                a.record_id, a.texture_id, reg.texture_name(a.texture_id),
                fmt(a.similarity), a.predicted_object_id, fmt(a.confidence),
                "" if a.true_label_id is None else a.true_label_id,
            ])
            count += 1
    return count


def read_assignments_csv(path: str | Path,
                         reg: ClassRegistry) -> list[TidAssignment]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ASSIGNMENT_HEADER:
            raise SchemaError("bad assignments header", path=path, line=1)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(ASSIGNMENT_HEADER):
                raise SchemaError(f"expected {len(ASSIGNMENT_HEADER)} columns",
                                  path=path, line=lineno)
            try:
                texture_id = int(row[1])
                if row[2] != reg.texture_name(texture_id):
                    raise ValueError(f"texture name {row[2]!r} does not match "
                                     f"id {texture_id}")
                out.append(TidAssignment(
                    record_id=row[0],
                    texture_id=texture_id,
                    similarity=float(row[3]),
                    predicted_object_id=int(row[4]),
                    confidence=float(row[5]),
                    true_label_id=None if row[6] == "" else int(row[6]),
                ))
            except (ValueError, IndexError) as e:
                raise SchemaError(f"bad assignment row: {e}",
                                  path=path, line=lineno) from e
    return out
