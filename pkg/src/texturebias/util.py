"""Small shared helpers: float printing and stream chunking."""

from __future__ import annotations

from itertools import islice
from typing import Iterable, Iterator, Sequence, TypeVar

T = TypeVar("T")


def fmt(value: float) -> str:
    """Format a float with 17 significant digits (lossless round-trip)."""
    return "%.17g" % value


def sigfig(value: float, digits: int = 6) -> float:
    """Round to a number of significant digits, for report summaries."""
    return float(f"%.{digits}g" % value)


def chunked(items: Iterable[T], size: int) -> Iterator[Sequence[T]]:
    """Split a stream into lists of at most ``size`` items, preserving order."""
    if size < 1:
        raise ValueError(f"chunk size must be >= 1, got {size}")
    it = iter(items)
    while True:
        chunk = list(islice(it, size))
        if not chunk:
            return
        yield chunk
