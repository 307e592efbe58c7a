"""Seeded synthetic histogram corpora.

Histograms are multinomial draws from a probability vector over the bin
domain, sampled one record at a time by inverse-CDF lookup.  Corpus member
``i`` uses the child seed ``derive_seed(seed, i)``, so any member can be
regenerated on its own.
"""
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from . import _kernels
from ._seeding import derive_seed
from .core import DEFAULT_DOMAIN, BinDomain, Histogram
from .errors import InvalidDistribution, InvalidParams

_CHUNK = 1 << 22
PROB_TOL = 1e-12
BASE_KINDS = ("discretized_bell", "linear_ramp", "uniform")
_KIND_ALIASES = {"bell": "discretized_bell", "ramp": "linear_ramp"}


def check_distribution(dist, n_bins: Optional[int] = None) -> np.ndarray:
    p = np.asarray(dist, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistribution("distribution must be a non-empty 1-D vector")
    if n_bins is not None and p.size != n_bins:
        raise InvalidDistribution(f"distribution has {p.size} entries, domain has {n_bins} bins")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise InvalidDistribution("distribution entries must be finite and nonnegative")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise InvalidDistribution(f"distribution sums to {p.sum()!r}, not 1")
    return p


def _cdf(p: np.ndarray) -> np.ndarray:
    c = np.cumsum(p)
    # dividing by the total makes every trailing entry exactly 1.0
    return c / c[-1]


def categorical_counts(dist, n: int, rng: np.random.Generator) -> np.ndarray:
    """Counts per category of ``n`` independent draws from ``dist``."""
    if n < 0:
        raise InvalidParams(f"sample size must be >= 0, got {n}")
    cdf = _cdf(check_distribution(dist))
    counts = np.zeros(cdf.size, dtype=np.int64)
    done = 0
    while done < n:
        k = min(_CHUNK, n - done)
        counts += _kernels.categorical_counts(cdf, rng.random(k))
        done += k
    return counts


def sample_histogram(dist, n: int, seed: int, domain: BinDomain = DEFAULT_DOMAIN,
                     list_id: str = "synthetic") -> Histogram:
    check_distribution(dist, domain.n_bins)
    counts = categorical_counts(dist, int(n), np.random.default_rng(seed))
    return Histogram(list_id, domain, counts)


def _normalize(w: np.ndarray) -> np.ndarray:
    total = w.sum()
    if not total > 0:
        raise InvalidParams("base weights sum to zero")
    return w / total


def smooth_base(domain: BinDomain = DEFAULT_DOMAIN, kind: str = "discretized_bell",
                **params) -> np.ndarray:
    """Smooth probability vector over the domain.

    discretized_bell: ``center`` (year, default mid-domain), ``width`` (years, default n/6)
    linear_ramp: ``start`` and ``end`` weights at the first and last bin
    uniform: no parameters
    """
    kind = _KIND_ALIASES.get(kind, kind)
    years = domain.years.astype(np.float64)
    if kind == "uniform":
        if params:
            raise InvalidParams(f"uniform takes no parameters, got {sorted(params)}")
        return np.full(domain.n_bins, 1.0 / domain.n_bins)
    if kind == "discretized_bell":
        unknown = set(params) - {"center", "width"}
        if unknown:
            raise InvalidParams(f"unknown bell parameters {sorted(unknown)}")
        center = float(params.get("center", (domain.min_year + domain.max_year) / 2))
        width = float(params.get("width", domain.n_bins / 6))
        if not width > 0:
            raise InvalidParams("bell width must be positive")
        return _normalize(np.exp(-0.5 * ((years - center) / width) ** 2))
    if kind == "linear_ramp":
        unknown = set(params) - {"start", "end"}
        if unknown:
            raise InvalidParams(f"unknown ramp parameters {sorted(unknown)}")
        start = float(params.get("start", 0.0))
        end = float(params.get("end", 1.0))
        if start < 0 or end < 0:
            raise InvalidParams("ramp endpoints must be nonnegative")
        return _normalize(np.linspace(start, end, domain.n_bins))
    raise InvalidParams(f"unknown base kind {kind!r}; choose from {BASE_KINDS}")


def heap_distribution(dist, domain: BinDomain, digit_weights: Mapping[int, float]) -> np.ndarray:
    """Reweight years by terminal digit and renormalize.

    ``{0: 3.0}`` triples the mass on years ending in 0 before renormalizing,
    which gives a rough, saw-toothed distribution.
    """
    p = check_distribution(dist, domain.n_bins).copy()
    digits = domain.years % 10
    for d, w in digit_weights.items():
        if not 0 <= int(d) <= 9 or w < 0:
            raise InvalidParams(f"bad heaping weight {d}:{w}")
        p[digits == int(d)] *= float(w)
    return _normalize(p)


@dataclass(frozen=True)
class GeneratorSpec:
    base_distribution: Tuple[float, ...]
    sizes: Tuple[int, ...]
    domain: BinDomain = DEFAULT_DOMAIN
    outlier_distribution: Optional[Tuple[float, ...]] = None
    outlier_ids: Tuple[int, ...] = ()
    seed: int = 0
    prefix: str = "synth_"

    def __post_init__(self):
        object.__setattr__(self, "base_distribution", tuple(float(x) for x in self.base_distribution))
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "outlier_ids", tuple(sorted(int(i) for i in self.outlier_ids)))
        if self.outlier_distribution is not None:
            object.__setattr__(self, "outlier_distribution",
                               tuple(float(x) for x in self.outlier_distribution))
        check_distribution(self.base_distribution, self.domain.n_bins)
        if self.outlier_distribution is not None:
            check_distribution(self.outlier_distribution, self.domain.n_bins)
        elif self.outlier_ids:
            raise InvalidDistribution("outlier_ids given without an outlier_distribution")
        if any(n < 0 for n in self.sizes):
            raise InvalidParams("sizes must be nonnegative")
        bad = [i for i in self.outlier_ids if not 0 <= i < len(self.sizes)]
        if bad:
            raise InvalidParams(f"outlier ids out of range: {bad}")

    def list_id(self, i: int) -> str:
        width = max(4, len(str(len(self.sizes) - 1)))
        return f"{self.prefix}{i:0{width}d}"


def make_set(spec: GeneratorSpec) -> list:
    outliers = set(spec.outlier_ids)
    out = []
    for i, n in enumerate(spec.sizes):
        dist = spec.outlier_distribution if i in outliers else spec.base_distribution
        out.append(sample_histogram(dist, n, derive_seed(spec.seed, i), spec.domain, spec.list_id(i)))
    return out


def log_spaced_sizes(lo: int, hi: int, count: int) -> Tuple[int, ...]:
    return tuple(int(round(x)) for x in np.geomspace(lo, hi, count))


def default_age_distribution(center: float = 35.0, width: float = 20.0) -> np.ndarray:
    """Smooth bell over ages 0..100."""
    ages = np.arange(101, dtype=np.float64)
    return _normalize(np.exp(-0.5 * ((ages - center) / width) ** 2))


def round_age_to_decade(age):
    """Nearest multiple of ten; ages ending in 5 round up."""
    return (np.asarray(age) + 5) // 10 * 10


def age_rounding_simulation(death_year: int, age_dist, rounding_fraction: float, n: int,
                            seed: int, domain: BinDomain = DEFAULT_DOMAIN,
                            list_id: str = "age_rounding", return_dropped: bool = False):
    """Birth years recovered as ``death_year - age`` when some ages were rounded.

    Each of ``n`` ages is drawn from ``age_dist`` (ages 0..len-1); with
    probability ``rounding_fraction`` it is replaced by its nearest decade.
    Birth years outside ``domain`` are dropped.
    """
    if not 0.0 <= rounding_fraction <= 1.0:
        raise InvalidParams(f"rounding_fraction must lie in [0, 1], got {rounding_fraction}")
    if n < 0:
        raise InvalidParams("n must be >= 0")
    try:
        p = check_distribution(age_dist)
    except InvalidDistribution as exc:
        raise InvalidParams(f"age distribution: {exc}") from exc
    rng = np.random.default_rng(seed)
    cdf = _cdf(p)
    ages = np.searchsorted(cdf, rng.random(n), side="right").astype(np.int64)
    rounded = rng.random(n) < rounding_fraction
    ages = np.where(rounded, round_age_to_decade(ages), ages)
    years = int(death_year) - ages
    keep = (years >= domain.min_year) & (years <= domain.max_year)
    counts = np.bincount(years[keep] - domain.min_year, minlength=domain.n_bins)
    h = Histogram(list_id, domain, counts)
    if return_dropped:
        return h, int(n - keep.sum())
    return h


# --------------------------------------------------------------------------
# plain-text key = value spec files
# --------------------------------------------------------------------------

def _parse_kv(text: str) -> Dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidParams(f"line {lineno}: expected key = value, got {raw!r}")
        out[key.strip().lower()] = value.strip()
    return out


def _parse_heap(text: str) -> Dict[int, float]:
    weights = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        d, _, w = item.partition(":")
        weights[int(d)] = float(w)
    return weights


def _parse_ints(text: str) -> Tuple[int, ...]:
    text = text.strip()
    if text.startswith("logspace:"):
        _, lo, hi, count = text.split(":")
        return log_spaced_sizes(int(float(lo)), int(float(hi)), int(count))
    return tuple(int(float(t)) for t in text.replace(" ", "").split(",") if t)


def _distribution_from(cfg: Mapping[str, str], prefix: str, domain: BinDomain) -> np.ndarray:
    kind = cfg[prefix]
    if kind == "vector":
        p = np.array([float(t) for t in cfg[f"{prefix}_values"].split(",")])
    else:
        params = {}
        for name in ("center", "width", "start", "end"):
            key = f"{prefix}_{name}"
            if key in cfg:
                params[name] = float(cfg[key])
        p = smooth_base(domain, kind, **params)
    heap = cfg.get(f"{prefix}_heap")
    if heap:
        p = heap_distribution(p, domain, _parse_heap(heap))
    return p


def spec_from_config(text: str) -> GeneratorSpec:
    """Parse a generator spec file.

    Keys: ``domain``, ``sizes`` (comma list or ``logspace:LO:HI:COUNT``),
    ``base`` (bell | ramp | uniform | vector) with ``base_center``,
    ``base_width``, ``base_start``, ``base_end``, ``base_values`` and
    ``base_heap`` (``digit:weight,...``); the same ``outlier*`` keys plus
    ``outlier_ids``; ``seed``; ``prefix``.
    """
    cfg = _parse_kv(text)
    known = {"domain", "sizes", "base", "outlier", "outlier_ids", "seed", "prefix"}
    for p in ("base", "outlier"):
        known |= {f"{p}_{k}" for k in ("center", "width", "start", "end", "values", "heap")}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise InvalidParams(f"unknown spec keys: {', '.join(unknown)}")
    if "sizes" not in cfg:
        raise InvalidParams("spec needs a 'sizes' key")
    domain = BinDomain.parse(cfg["domain"]) if "domain" in cfg else DEFAULT_DOMAIN
    base = _distribution_from({**cfg, "base": cfg.get("base", "bell")}, "base", domain)
    outlier = _distribution_from(cfg, "outlier", domain) if "outlier" in cfg else None
    ids = _parse_ints(cfg["outlier_ids"]) if cfg.get("outlier_ids") else ()
    return GeneratorSpec(
        base_distribution=tuple(base),
        sizes=_parse_ints(cfg["sizes"]),
        domain=domain,
        outlier_distribution=None if outlier is None else tuple(outlier),
        outlier_ids=ids,
        seed=int(cfg.get("seed", 0)),
        prefix=cfg.get("prefix", "synth_"),
    )


def spec_to_config(spec: GeneratorSpec) -> str:
    """Exact text form of ``spec``; ``spec_from_config`` inverts it."""
    lines = [
        f"domain = {spec.domain}",
        "sizes = " + ",".join(str(n) for n in spec.sizes),
        "base = vector",
        "base_values = " + ",".join(repr(x) for x in spec.base_distribution),
    ]
    if spec.outlier_distribution is not None:
        lines += ["outlier = vector",
                  "outlier_values = " + ",".join(repr(x) for x in spec.outlier_distribution)]
    if spec.outlier_ids:
        lines.append("outlier_ids = " + ",".join(str(i) for i in spec.outlier_ids))
    lines += [f"seed = {spec.seed}", f"prefix = {spec.prefix}"]
    return "\n".join(lines) + "\n"
