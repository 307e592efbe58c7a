"""Histogram outlier scoring by discrete total variation, with audit diagnostics."""
__version__ = "0.1.0"

from .core import DEFAULT_DOMAIN, BinDomain, Histogram, dtv, dtv_many, from_year_counts
from .fitting import (
    BasisFit,
    ExpectedDtvFit,
    eval_basis,
    eval_expected_dtv,
    fit_basis,
    fit_expected_dtv,
)
from .scoring import (
    ReferenceStats,
    ScoreRecord,
    reference_stats,
    renormalize_scores,
    score_d_doubleprime,
    score_d_prime,
    score_dataset,
    score_signed,
)
from .diagnostics import diagnose_size_bias, dispersion_test, rank_records
from .hygiene import (
    RawRecordSet,
    containment,
    digit_profile,
    filter_year_range,
    find_duplicates,
    list_similarity,
)
from .synth import (
    GeneratorSpec,
    age_rounding_simulation,
    make_set,
    sample_histogram,
    smooth_base,
)

__all__ = [
    "DEFAULT_DOMAIN", "BinDomain", "Histogram", "dtv", "dtv_many", "from_year_counts",
    "BasisFit", "ExpectedDtvFit", "eval_basis", "eval_expected_dtv", "fit_basis",
    "fit_expected_dtv",
    "ReferenceStats", "ScoreRecord", "reference_stats", "renormalize_scores",
    "score_d_doubleprime", "score_d_prime", "score_dataset", "score_signed",
    "diagnose_size_bias", "dispersion_test", "rank_records",
    "RawRecordSet", "containment", "digit_profile", "filter_year_range", "find_duplicates",
    "list_similarity",
    "GeneratorSpec", "age_rounding_simulation", "make_set", "sample_histogram", "smooth_base",
]
