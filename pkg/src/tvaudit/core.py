"""Year-of-birth histograms over a fixed integer bin domain, and their DTV."""
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import NegativeCount, OutOfDomainYear


@dataclass(frozen=True)
class BinDomain:
    """Inclusive integer year range; one bin per year."""

    min_year: int = 1850
    max_year: int = 1945

    def __post_init__(self):
        if self.min_year > self.max_year:
            raise ValueError(f"min_year {self.min_year} > max_year {self.max_year}")

    @property
    def n_bins(self) -> int:
        return self.max_year - self.min_year + 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.min_year, self.max_year + 1, dtype=np.int64)

    def __contains__(self, year) -> bool:
        return self.min_year <= year <= self.max_year

    @classmethod
    def parse(cls, text: str) -> "BinDomain":
        """Parse ``"1850:1945"``."""
        lo, sep, hi = text.partition(":")
        if not sep:
            raise ValueError(f"domain must look like MIN:MAX, got {text!r}")
        return cls(int(lo), int(hi))

    def __str__(self):
        return f"{self.min_year}:{self.max_year}"


DEFAULT_DOMAIN = BinDomain()


class Histogram:
    """Immutable per-list histogram of birth-year counts.

    ``counts[i]`` is the number of records born in ``domain.min_year + i``.
    """

    __slots__ = ("list_id", "domain", "counts", "size_n")

    def __init__(self, list_id: str, domain: BinDomain, counts: Sequence[int]):
        arr = np.array(counts, dtype=np.int64)
        if arr.ndim != 1 or arr.shape[0] != domain.n_bins:
            raise ValueError(
                f"counts for {list_id!r} must have length {domain.n_bins}, got shape {arr.shape}"
            )
        if arr.size and arr.min() < 0:
            raise NegativeCount(f"negative count in histogram {list_id!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "list_id", str(list_id))
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "counts", arr)
        object.__setattr__(self, "size_n", int(arr.sum()))

    def __setattr__(self, name, value):
        raise AttributeError("Histogram is immutable")

    def __eq__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        return (
            self.list_id == other.list_id
            and self.domain == other.domain
            and np.array_equal(self.counts, other.counts)
        )

    __hash__ = None

    def __repr__(self):
        return f"Histogram({self.list_id!r}, domain={self.domain}, N={self.size_n})"

    def with_id(self, list_id: str) -> "Histogram":
        return Histogram(list_id, self.domain, self.counts)

    def year_counts(self) -> dict:
        """Nonzero bins as ``{year: count}``."""
        nz = np.flatnonzero(self.counts)
        return {int(self.domain.min_year + i): int(self.counts[i]) for i in nz}


def dtv(h: Histogram) -> int:
    """Discrete total variation: sum of |counts[i] - counts[i-1]|, exact."""
    c = h.counts
    if c.shape[0] < 2:
        return 0
    return int(np.abs(np.diff(c)).sum())


def dtv_many(histograms: Iterable[Histogram]) -> np.ndarray:
    """Batch DTV for histograms sharing one domain."""
    hs = list(histograms)
    if not hs:
        return np.zeros(0, dtype=np.int64)
    mat = np.stack([h.counts for h in hs]).astype(np.int64)
    return _kernels.dtv_rows(np.ascontiguousarray(mat))


def from_year_counts(list_id: str, pairs: Mapping[int, int],
                     domain: BinDomain = DEFAULT_DOMAIN) -> Histogram:
    counts = np.zeros(domain.n_bins, dtype=np.int64)
    for year, count in pairs.items():
        year = int(year)
        if year not in domain:
            raise OutOfDomainYear(
                f"year {year} outside {domain} in list {list_id!r}; filter with filter_year_range first"
            )
        if count < 0:
            raise NegativeCount(f"negative count {count} for year {year} in list {list_id!r}")
        counts[year - domain.min_year] += int(count)
    return Histogram(list_id, domain, counts)
