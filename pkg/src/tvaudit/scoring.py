"""TVOR outlier scores and their variants.

``d_prime``      |dtv - m(N)| / sqrt(N), with m fitted over the histogram set
``d_signed``     the same without the absolute value
``d_ren``        d_prime divided by a regression model of d_prime on N
``d_doubleprime`` |dtv - mu_N| / sigma_N from resampled reference subsets
"""
import math
import warnings
from dataclasses import dataclass, replace
from typing import Collection, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from ._seeding import derive_seed
from .core import Histogram, dtv, dtv_many
from .errors import (
    EmptyHistogram,
    EmptyReference,
    InvalidParams,
    NonpositiveExpectedScore,
    SizeMismatch,
    ZeroSigma,
)
from .fitting import BasisFit, ExpectedDtvFit, eval_basis, eval_expected_dtv, fit_expected_dtv

_UNIFORM_BLOCK = 1 << 22


class EmptyHistogramWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ScoreRecord:
    list_id: str
    size_n: int
    dtv: int
    expected_dtv: float
    d_prime: float
    d_signed: float
    d_ren: Optional[float] = None
    d_doubleprime: Optional[float] = None


@dataclass(frozen=True)
class ReferenceStats:
    subset_size: int
    mu_hat: float
    sigma_hat: float
    num_resamples: int
    seed: int


def _require_nonempty(h: Histogram):
    if h.size_n < 1:
        raise EmptyHistogram(f"histogram {h.list_id!r} is empty (N=0)")


def score_from_dtv(dtv_value: float, n: int, fit: ExpectedDtvFit) -> float:
    """Signed score (dtv - m(N)) / sqrt(N) from a precomputed DTV."""
    if n < 1:
        raise EmptyHistogram("score needs N >= 1")
    return (dtv_value - eval_expected_dtv(fit, n)) / math.sqrt(n)


def score_signed(h: Histogram, fit: ExpectedDtvFit) -> float:
    _require_nonempty(h)
    return score_from_dtv(dtv(h), h.size_n, fit)


def score_d_prime(h: Histogram, fit: ExpectedDtvFit) -> float:
    return abs(score_signed(h, fit))


def _record(list_id, n, v, fit) -> ScoreRecord:
    m = eval_expected_dtv(fit, n)
    signed = score_from_dtv(v, n, fit)
    return ScoreRecord(str(list_id), int(n), int(v), float(m), abs(signed), signed)


def score_dataset(histograms: Sequence[Histogram],
                  exclude: Optional[Collection[str]] = None
                  ) -> Tuple[ExpectedDtvFit, List[ScoreRecord]]:
    """Fit m(N) on the non-excluded lists, then score every list against it.

    Excluded lists are still scored.  Empty lists are skipped with an
    ``EmptyHistogramWarning`` naming them.
    """
    exclude = set(exclude or ())
    live = [h for h in histograms if h.size_n >= 1]
    skipped = [h.list_id for h in histograms if h.size_n < 1]
    if skipped:
        warnings.warn(f"skipping empty histograms: {', '.join(skipped)}", EmptyHistogramWarning,
                      stacklevel=2)
    dtvs = dtv_many(live) if live else np.zeros(0, dtype=np.int64)
    points = [(h.size_n, int(v)) for h, v in zip(live, dtvs) if h.list_id not in exclude]
    fit = fit_expected_dtv(points)
    records = [_record(h.list_id, h.size_n, int(v), fit) for h, v in zip(live, dtvs)]
    return fit, records


def _normalized_cdf(h: Histogram) -> np.ndarray:
    # integer cumsum: the last nonzero bin and all after it are exactly 1.0
    return np.cumsum(h.counts) / h.size_n


def resample_dtvs(reference: Histogram, subset_size: int, num_resamples: int,
                  seed: int) -> np.ndarray:
    """DTVs of ``num_resamples`` multinomial subsets drawn from ``reference``.

    Uniforms come from one PCG64 stream seeded by ``seed``; they are drawn in
    row-major blocks, so the result does not depend on the block size.
    """
    if reference.size_n < 1:
        raise EmptyReference(f"reference histogram {reference.list_id!r} is empty")
    if subset_size < 1 or num_resamples < 1:
        raise InvalidParams("subset_size and num_resamples must be positive")
    cdf = _normalized_cdf(reference)
    rng = np.random.default_rng(seed)
    rows_per_block = max(1, _UNIFORM_BLOCK // subset_size)
    out = np.empty(num_resamples, dtype=np.int64)
    done = 0
    while done < num_resamples:
        rows = min(rows_per_block, num_resamples - done)
        u = rng.random((rows, subset_size))
        out[done:done + rows] = _kernels.resample_dtvs(cdf, u)
        done += rows
    return out


def reference_stats(reference: Histogram, subset_size: int, num_resamples: int = 1000,
                    seed: int = 0) -> ReferenceStats:
    if num_resamples < 2:
        raise InvalidParams("num_resamples must be >= 2")
    vals = resample_dtvs(reference, subset_size, num_resamples, seed)
    return ReferenceStats(
        subset_size=int(subset_size),
        mu_hat=float(vals.mean()),
        sigma_hat=float(vals.std(ddof=1)),
        num_resamples=int(num_resamples),
        seed=int(seed),
    )


def score_d_doubleprime(h: Histogram, ref: ReferenceStats) -> float:
    if h.size_n != ref.subset_size:
        raise SizeMismatch(
            f"histogram {h.list_id!r} has N={h.size_n} but reference stats are for N={ref.subset_size}"
        )
    if not ref.sigma_hat > 0:
        raise ZeroSigma("reference DTV standard deviation is zero")
    return abs(dtv(h) - ref.mu_hat) / ref.sigma_hat


def renormalize_scores(records: Sequence[ScoreRecord], model: BasisFit) -> List[ScoreRecord]:
    out = []
    for rec in records:
        expected = eval_basis(model, rec.size_n)
        if not expected > 0:
            raise NonpositiveExpectedScore(
                f"model predicts {expected:.6g} <= 0 at N={rec.size_n} (list {rec.list_id!r})"
            )
        out.append(replace(rec, d_ren=rec.d_prime / expected))
    return out


def attach_doubleprime(records: Sequence[ScoreRecord], reference: Histogram,
                       num_resamples: int = 1000, seed: int = 0) -> List[ScoreRecord]:
    """Fill ``d_doubleprime`` using reference stats for each distinct list size.

    Sizes are processed in ascending order and the k-th size uses the child
    seed ``derive_seed(seed, k)``, so results do not depend on record order.
    """
    sizes = sorted({r.size_n for r in records})
    stats = {
        n: reference_stats(reference, n, num_resamples, derive_seed(seed, k))
        for k, n in enumerate(sizes)
    }
    out = []
    for rec in records:
        ref = stats[rec.size_n]
        if not ref.sigma_hat > 0:
            raise ZeroSigma(f"reference DTV standard deviation is zero at N={rec.size_n}")
        out.append(replace(rec, d_doubleprime=abs(rec.dtv - ref.mu_hat) / ref.sigma_hat))
    return out
