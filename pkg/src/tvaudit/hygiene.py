"""Data-quality checks run before scoring.

Year filtering, count-vector duplicate and sublist detection, and
terminal-digit (age heaping) profiles.  Everything works on birth-year
count vectors because the lists carry no other per-record fields.
"""
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .core import DEFAULT_DOMAIN, BinDomain, Histogram
from .errors import DomainMismatch, EmptyHistogram, EmptySublist, InvalidParams

DEFAULT_SIM_THRESHOLD = 0.999
DEFAULT_CONT_THRESHOLD = 0.999
DEFAULT_FLAG_THRESHOLD = 1.25
MID_DECADE_DIGITS = (4, 5, 6, 7, 8)

DUPLICATE = "duplicate"
NEAR_DUPLICATE = "near_duplicate"
CONTAINED = "contained"
DISTINCT = "distinct"


@dataclass(frozen=True)
class RawRecordSet:
    list_id: str
    years: Tuple[int, ...]
    source_note: Optional[str] = None


@dataclass(frozen=True)
class DuplicatePair:
    id_a: str
    id_b: str
    similarity: float
    containment_ab: float
    containment_ba: float
    verdict: str


@dataclass(frozen=True)
class DuplicationReport:
    pairs: Tuple[DuplicatePair, ...]
    sim_threshold: float = DEFAULT_SIM_THRESHOLD
    cont_threshold: float = DEFAULT_CONT_THRESHOLD


@dataclass(frozen=True)
class DigitProfile:
    list_id: str
    digit_counts: Tuple[int, ...]
    digit_indices: Tuple[float, ...]
    mid_decade_index: float
    chi_square: float
    flagged_digits: FrozenSet[int]


def filter_year_range(raw: RawRecordSet, domain: BinDomain = DEFAULT_DOMAIN
                      ) -> Tuple[Histogram, int]:
    """Bin the in-domain years; return the histogram and how many were dropped."""
    years = np.asarray(raw.years, dtype=np.int64)
    keep = (years >= domain.min_year) & (years <= domain.max_year)
    counts = np.bincount(years[keep] - domain.min_year, minlength=domain.n_bins)
    return Histogram(raw.list_id, domain, counts), int(years.size - keep.sum())


def _same_domain(a: Histogram, b: Histogram):
    if a.domain != b.domain:
        raise DomainMismatch(
            f"lists {a.list_id!r} ({a.domain}) and {b.list_id!r} ({b.domain}) use different domains"
        )


def overlap(a: Histogram, b: Histogram) -> int:
    """Shared mass: sum over bins of min(a_i, b_i)."""
    _same_domain(a, b)
    return int(np.minimum(a.counts, b.counts).sum())


def list_similarity(a: Histogram, b: Histogram) -> float:
    """Shared mass over the larger list size; 1 iff the count vectors match."""
    m = overlap(a, b)
    denom = max(a.size_n, b.size_n)
    if denom == 0:
        return 1.0
    return m / denom


def containment(sub: Histogram, sup: Histogram) -> float:
    """Fraction of ``sub``'s mass that fits bin-wise inside ``sup``."""
    m = overlap(sub, sup)
    if sub.size_n == 0:
        raise EmptySublist(f"sublist {sub.list_id!r} is empty")
    return m / sub.size_n


def _verdict(m, na, nb, sim, cab, cba, sim_threshold, cont_threshold) -> str:
    if m == na == nb:
        return DUPLICATE
    if sim >= sim_threshold:
        return NEAR_DUPLICATE
    if cab >= cont_threshold or cba >= cont_threshold:
        return CONTAINED
    return DISTINCT


def find_duplicates(histograms: Sequence[Histogram],
                    sim_threshold: float = DEFAULT_SIM_THRESHOLD,
                    cont_threshold: float = DEFAULT_CONT_THRESHOLD,
                    check_containment: bool = True,
                    size_ratio_cap: float = 100.0) -> DuplicationReport:
    """Report every non-distinct pair, ordered by (id_a, id_b).

    Empty lists are ignored.  With ``check_containment=False`` pairs whose
    size ratio exceeds ``size_ratio_cap`` are skipped and no pair is
    labelled ``contained``.
    """
    for t in (sim_threshold, cont_threshold):
        if not 0 < t <= 1:
            raise InvalidParams(f"thresholds must lie in (0, 1], got {t}")
    hs = sorted((h for h in histograms if h.size_n > 0), key=lambda h: h.list_id)
    if not hs:
        return DuplicationReport((), sim_threshold, cont_threshold)
    for h in hs[1:]:
        _same_domain(hs[0], h)
    mat = np.ascontiguousarray(np.stack([h.counts for h in hs]).astype(np.int64))
    sizes = np.array([h.size_n for h in hs], dtype=np.int64)
    cont_thr = cont_threshold if check_containment else np.inf
    pairs: List[DuplicatePair] = []
    for i in range(len(hs) - 1):
        js = np.arange(i + 1, len(hs), dtype=np.int64)
        if not check_containment:
            big = np.maximum(sizes[js], sizes[i])
            small = np.minimum(sizes[js], sizes[i])
            js = js[big <= size_ratio_cap * small]
            if js.size == 0:
                continue
        m = _kernels.min_sums(mat, i, js)
        nj = sizes[js]
        sim = m / np.maximum(nj, sizes[i])
        cab = m / sizes[i]
        cba = m / nj
        hit = (sim >= sim_threshold) | (cab >= cont_thr) | (cba >= cont_thr)
        for q in np.flatnonzero(hit):
            j = int(js[q])
            verdict = _verdict(int(m[q]), int(sizes[i]), int(nj[q]), sim[q], cab[q], cba[q],
                               sim_threshold, cont_thr)
            pairs.append(DuplicatePair(hs[i].list_id, hs[j].list_id, float(sim[q]),
                                       float(cab[q]), float(cba[q]), verdict))
    return DuplicationReport(tuple(pairs), sim_threshold, cont_threshold)


def digit_profile(h: Histogram, flag_threshold: float = DEFAULT_FLAG_THRESHOLD) -> DigitProfile:
    """Terminal-digit preference of birth years against a uniform-digit baseline.

    ``digit_indices[d] = 10 * count_d / N`` is 1 for every digit when there
    is no preference; ``mid_decade_index`` is the same ratio pooled over
    digits 4 to 8.
    """
    n = h.size_n
    if n < 1:
        raise EmptyHistogram(f"histogram {h.list_id!r} is empty (N=0)")
    digits = h.domain.years % 10
    counts = np.zeros(10, dtype=np.int64)
    np.add.at(counts, digits, h.counts)
    indices = 10.0 * counts / n
    expected = n / 10.0
    chi2 = float(((counts - expected) ** 2).sum() / expected)
    mid = 2.0 * counts[list(MID_DECADE_DIGITS)].sum() / n
    flagged = frozenset(int(d) for d in np.flatnonzero(indices >= flag_threshold))
    return DigitProfile(
        list_id=h.list_id,
        digit_counts=tuple(int(c) for c in counts),
        digit_indices=tuple(float(x) for x in indices),
        mid_decade_index=float(mid),
        chi_square=chi2,
        flagged_digits=flagged,
    )
