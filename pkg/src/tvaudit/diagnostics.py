"""Audit instruments for TVOR results: size bias, shared-smoothness dispersion, ranking."""
from dataclasses import dataclass, field
from typing import Collection, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import Histogram, dtv_many
from .errors import InsufficientPoints, InvalidParams, MissingKey, TooFewInWindow
from .fitting import AFFINE, BasisFit, ExpectedDtvFit, eval_basis, fit_basis, fit_expected_dtv
from .scoring import ScoreRecord

DEFAULT_PROBES = (10**3, 10**4, 10**5, 10**6)
SCORE_KEYS = ("d_prime", "d_ren", "d_doubleprime")


@dataclass(frozen=True)
class BiasReport:
    model: BasisFit
    slope_like_summary: float
    expected_score_at: Dict[int, float]
    excluded: frozenset = frozenset()


@dataclass(frozen=True)
class DispersionReport:
    size_window: Tuple[int, int]
    selected_ids: Tuple[str, ...]
    signed_scores: Tuple[float, ...]
    window_width: float
    max_fraction_in_window: float
    best_window_location: float
    sizes: Tuple[int, ...] = ()
    fit: Optional[ExpectedDtvFit] = field(default=None, compare=False)


def diagnose_size_bias(records: Sequence[ScoreRecord], basis: Sequence[str] = AFFINE,
                       probes: Sequence[int] = DEFAULT_PROBES,
                       exclude: Optional[Collection[str]] = None) -> BiasReport:
    """Regress d_prime on list size and evaluate the fitted trend at ``probes``.

    A clearly positive N coefficient means the sqrt(N) normalisation of the
    score did not remove its dependence on list size.
    """
    excluded = frozenset(exclude or ())
    points = [(r.size_n, r.d_prime) for r in records if r.list_id not in excluded]
    model = fit_basis(points, basis)
    slope = model.coefficient("N") if "N" in model.basis else float("nan")
    expected = {int(p): eval_basis(model, p) for p in probes}
    return BiasReport(model, slope, expected, excluded)


def bias_table(records: Sequence[ScoreRecord], model: BasisFit) -> List[dict]:
    """Rows of (list_id, N, d', predicted d', d'_ren) in ascending N."""
    rows = []
    for r in sorted(records, key=lambda r: (r.size_n, r.list_id)):
        expected = eval_basis(model, r.size_n)
        rows.append({
            "list_id": r.list_id,
            "size_n": r.size_n,
            "d_prime": r.d_prime,
            "expected_d_prime": expected,
            "d_ren": r.d_prime / expected if expected > 0 else float("nan"),
        })
    return rows


def max_fraction_in_window(values: Sequence[float], width: float) -> Tuple[float, float]:
    """Largest share of ``values`` inside any closed interval of length ``width``.

    Returns ``(fraction, left_end)``.  An optimal interval can always be
    slid right until its left end sits on a value, so only those are tried.
    """
    if width < 0:
        raise InvalidParams("window width must be nonnegative")
    s = np.sort(np.asarray(values, dtype=np.float64))
    if s.size == 0:
        raise TooFewInWindow("no values to place in a window")
    lo = np.searchsorted(s, s, side="left")
    hi = np.searchsorted(s, s + width, side="right")
    counts = hi - lo
    best = int(np.argmax(counts))
    return float(counts[best]) / s.size, float(s[best])


def dispersion_test(histograms: Sequence[Histogram], n_min: int, n_max: int,
                    window_width: float = 10.0) -> DispersionReport:
    """Signed-score spread among lists with ``n_min <= N <= n_max``.

    m(N) is refitted on the selected lists alone.  If they shared one
    smoothness level, nearly all signed scores would fall in a short window.
    """
    selected = [h for h in histograms if n_min <= h.size_n <= n_max and h.size_n >= 1]
    if len(selected) < 2:
        raise TooFewInWindow(
            f"{len(selected)} lists with {n_min} <= N <= {n_max}; need at least 2"
        )
    sizes = np.array([h.size_n for h in selected], dtype=np.float64)
    dtvs = dtv_many(selected)
    try:
        fit = fit_expected_dtv(zip(sizes, dtvs))
    except InsufficientPoints as exc:  # pragma: no cover - guarded above
        raise TooFewInWindow(str(exc)) from exc
    signed = (dtvs - (fit.a * sizes + fit.b * np.sqrt(sizes))) / np.sqrt(sizes)
    frac, where = max_fraction_in_window(signed, window_width)
    return DispersionReport(
        size_window=(int(n_min), int(n_max)),
        selected_ids=tuple(h.list_id for h in selected),
        signed_scores=tuple(float(v) for v in signed),
        window_width=float(window_width),
        max_fraction_in_window=frac,
        best_window_location=where,
        sizes=tuple(int(n) for n in sizes),
        fit=fit,
    )


def rank_records(records: Sequence[ScoreRecord], key: str = "d_prime") -> List[ScoreRecord]:
    """Descending by ``key``; ties go to the smaller list_id."""
    if key not in SCORE_KEYS:
        raise InvalidParams(f"rank key must be one of {SCORE_KEYS}, got {key!r}")
    missing = [r.list_id for r in records if getattr(r, key) is None]
    if missing:
        raise MissingKey(f"{key} not set on {len(missing)} record(s), e.g. {missing[0]!r}")
    return sorted(records, key=lambda r: (-getattr(r, key), r.list_id))
