"""Command-line front end: ``tvaudit score|bias|dispersion|dedupe|heaping|synth``.

Exit codes: 0 success, 1 usage error, 2 ingestion error, 3 numeric or fit error.
"""
import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import List, Optional

from . import __version__
from .core import BinDomain
from .diagnostics import (
    DEFAULT_PROBES,
    bias_table,
    diagnose_size_bias,
    dispersion_test,
    rank_records,
)
from .errors import (
    IngestionError,
    InvalidDistribution,
    InvalidParams,
    NonpositiveExpectedScore,
    TvauditError,
)
from .fitting import AFFINE, BASIS_NAMES, fit_basis
from .hygiene import (
    DEFAULT_CONT_THRESHOLD,
    DEFAULT_FLAG_THRESHOLD,
    DEFAULT_SIM_THRESHOLD,
    digit_profile,
    find_duplicates,
)
from .ingest import load_corpus, load_list, write_counts_file
from .scoring import EmptyHistogramWarning, attach_doubleprime, renormalize_scores, score_dataset
from .synth import make_set, spec_from_config

log = logging.getLogger("tvaudit")

EXIT_OK, EXIT_USAGE, EXIT_INGEST, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("score", "bias", "dispersion", "dedupe", "heaping", "synth")
SIG_DIGITS = 9


@dataclass
class RunConfig:
    command: str = "score"
    inputs: List[str] = field(default_factory=list)
    manifest: Optional[str] = None
    domain: str = "1850:1945"
    format: str = "json"
    out: Optional[str] = None
    seed: int = 0
    exclude: List[str] = field(default_factory=list)
    basis: str = "n1"
    probes: List[int] = field(default_factory=lambda: list(DEFAULT_PROBES))
    window: Optional[str] = None
    width: float = 10.0
    sim_threshold: float = DEFAULT_SIM_THRESHOLD
    cont_threshold: float = DEFAULT_CONT_THRESHOLD
    flag_threshold: float = DEFAULT_FLAG_THRESHOLD
    renormalize: bool = False
    rank_key: Optional[str] = None
    reference: Optional[str] = None
    num_resamples: int = 1000
    spec: Optional[str] = None
    out_dir: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise InvalidParams(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))


# --------------------------------------------------------------------------
# numeric formatting shared by JSON and CSV
# --------------------------------------------------------------------------

def fmt_num(x):
    """9 significant digits; ints pass through, NaN and None become None."""
    if x is None or isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(format(x, f".{SIG_DIGITS}g"))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_clean(v) for v in obj)
    if isinstance(obj, (int, float)) or obj is None:
        return fmt_num(obj)
    if hasattr(obj, "item"):  # numpy scalar
        return fmt_num(obj.item())
    return obj


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        v = fmt_num(v)
        return "" if v is None else format(v, f".{SIG_DIGITS}g")
    if isinstance(v, (list, tuple, frozenset, set)):
        return " ".join(str(x) for x in sorted(v))
    return str(v)


def render(report: dict, rows: List[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_clean(report), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    # row tables go in the CSV body, everything else in one comment line
    meta = {k: v for k, v in report.items()
            if not (isinstance(v, list) and v and isinstance(v[0], dict))}
    buf.write("# " + json.dumps(_clean(meta), sort_keys=False) + "\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _csv_cell(v) for k, v in r.items()})
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def _provenance(cfg: RunConfig, loaded) -> dict:
    return {
        "tool": "tvaudit",
        "version": __version__,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "inputs": [
            {"path": l.path, "list_id": l.histogram.list_id, "sha256": l.sha256,
             "layout": l.layout, "dropped_years": l.dropped}
            for l in loaded
        ],
    }


def _load(cfg: RunConfig):
    if not cfg.inputs:
        raise InvalidParams("no input files or directories given")
    loaded = load_corpus(cfg.inputs, BinDomain.parse(cfg.domain), cfg.manifest)
    return loaded, [l.histogram for l in loaded]


def _basis(cfg: RunConfig):
    try:
        return BASIS_NAMES[cfg.basis]
    except KeyError:
        raise InvalidParams(f"--basis must be one of {sorted(BASIS_NAMES)}") from None


def _record_row(rank, rec, dropped):
    row = {"rank": rank}
    row.update(asdict(rec))
    row["dropped_years"] = dropped
    return row


def _fit_dict(fit):
    return {"a": fit.a, "b": fit.b, "point_count": fit.point_count,
            "residual_sum_squares": fit.residual_sum_squares}


def _model_dict(model):
    return {"basis": list(model.basis), "coefficients": list(model.coefficients),
            "point_count": model.point_count,
            "residual_sum_squares": model.residual_sum_squares}


def _scored(cfg, histograms, exclude_from_fit):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", EmptyHistogramWarning)
        fit, records = score_dataset(histograms, exclude=exclude_from_fit)
    for w in caught:
        log.warning("%s", w.message)
    skipped = [h.list_id for h in histograms if h.size_n == 0]
    return fit, records, skipped


def cmd_score(cfg: RunConfig):
    loaded, histograms = _load(cfg)
    fit, records, skipped = _scored(cfg, histograms, cfg.exclude)
    report = {"command": "score", "provenance": _provenance(cfg, loaded),
              "expected_dtv_fit": _fit_dict(fit), "skipped_empty": skipped}
    if cfg.renormalize:
        bias = diagnose_size_bias(records, _basis(cfg), cfg.probes)
        records = renormalize_scores(records, bias.model)
        report["renormalization_model"] = _model_dict(bias.model)
    if cfg.reference:
        ref = load_list(cfg.reference, BinDomain.parse(cfg.domain)).histogram
        records = attach_doubleprime(records, ref, cfg.num_resamples, cfg.seed)
    key = cfg.rank_key or ("d_ren" if cfg.renormalize else "d_prime")
    dropped = {l.histogram.list_id: l.dropped for l in loaded}
    rows = [_record_row(i + 1, r, dropped[r.list_id])
            for i, r in enumerate(rank_records(records, key))]
    report["rank_key"] = key
    report["records"] = rows
    return report, rows


def cmd_bias(cfg: RunConfig):
    loaded, histograms = _load(cfg)
    fit, records, skipped = _scored(cfg, histograms, None)
    bias = diagnose_size_bias(records, _basis(cfg), cfg.probes, cfg.exclude)
    try:
        renormed = renormalize_scores(records, bias.model)
    except NonpositiveExpectedScore as exc:
        # the trend crosses zero inside the data range; d'_ren is undefined
        log.warning("no renormalization: %s", exc)
        post_slope = None
    else:
        post_slope = fit_basis([(r.size_n, r.d_ren) for r in renormed
                                if r.list_id not in bias.excluded], AFFINE).coefficient("N")
    table = bias_table(records, bias.model)
    report = {
        "command": "bias",
        "provenance": _provenance(cfg, loaded),
        "expected_dtv_fit": _fit_dict(fit),
        "model": _model_dict(bias.model),
        "slope": bias.slope_like_summary,
        "post_renormalization_slope": post_slope,
        "excluded": sorted(bias.excluded),
        "probes": [{"size_n": n, "expected_d_prime": v} for n, v in bias.expected_score_at.items()],
        "skipped_empty": skipped,
        "table": table,
    }
    return report, table


def _window(cfg, histograms):
    if cfg.window is None:
        sizes = [h.size_n for h in histograms]
        return min(sizes), max(sizes)
    lo, sep, hi = cfg.window.partition(":")
    if not sep:
        raise InvalidParams(f"--window must look like MIN:MAX, got {cfg.window!r}")
    return int(float(lo)), int(float(hi))


def cmd_dispersion(cfg: RunConfig):
    loaded, histograms = _load(cfg)
    lo, hi = _window(cfg, histograms)
    rep = dispersion_test(histograms, lo, hi, cfg.width)
    table = [{"list_id": i, "size_n": n, "d_signed": s}
             for i, n, s in sorted(zip(rep.selected_ids, rep.sizes, rep.signed_scores),
                                   key=lambda t: t[2])]
    report = {
        "command": "dispersion",
        "provenance": _provenance(cfg, loaded),
        "size_window": list(rep.size_window),
        "selected_count": len(rep.selected_ids),
        "expected_dtv_fit": _fit_dict(rep.fit),
        "window_width": rep.window_width,
        "max_fraction_in_window": rep.max_fraction_in_window,
        "best_window_location": rep.best_window_location,
        "table": table,
    }
    return report, table


def cmd_dedupe(cfg: RunConfig):
    loaded, histograms = _load(cfg)
    rep = find_duplicates(histograms, cfg.sim_threshold, cfg.cont_threshold)
    rows = [asdict(p) for p in rep.pairs]
    report = {"command": "dedupe", "provenance": _provenance(cfg, loaded),
              "sim_threshold": rep.sim_threshold, "cont_threshold": rep.cont_threshold,
              "pairs": rows}
    return report, rows


def cmd_heaping(cfg: RunConfig):
    loaded, histograms = _load(cfg)
    profiles, rows, skipped = [], [], []
    for h in histograms:
        if h.size_n == 0:
            skipped.append(h.list_id)
            continue
        p = digit_profile(h, cfg.flag_threshold)
        profiles.append({"list_id": p.list_id, "size_n": h.size_n,
                         "digit_counts": list(p.digit_counts),
                         "digit_indices": list(p.digit_indices),
                         "mid_decade_index": p.mid_decade_index,
                         "chi_square": p.chi_square,
                         "flagged_digits": sorted(p.flagged_digits)})
        row = {"list_id": p.list_id, "size_n": h.size_n}
        row.update({f"index_{d}": v for d, v in enumerate(p.digit_indices)})
        row.update({"mid_decade_index": p.mid_decade_index, "chi_square": p.chi_square,
                    "flagged_digits": sorted(p.flagged_digits)})
        rows.append(row)
    report = {"command": "heaping", "provenance": _provenance(cfg, loaded),
              "flag_threshold": cfg.flag_threshold,
              "mid_decade_note": "mid_decade_index pools terminal digits 4-8; "
                                 "an operational definition, not a standard index",
              "skipped_empty": skipped, "profiles": profiles}
    return report, rows


def cmd_synth(cfg: RunConfig):
    if not cfg.spec:
        raise InvalidParams("synth needs a spec file")
    if not cfg.out_dir:
        raise InvalidParams("synth needs --out-dir")
    try:
        text = Path(cfg.spec).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestionError(cfg.spec, f"cannot read spec ({exc})") from None
    spec = spec_from_config(text)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, h in enumerate(make_set(spec)):
        write_counts_file(h, out_dir / f"{h.list_id}.csv")
        rows.append({"list_id": h.list_id, "size_n": h.size_n,
                     "outlier": i in spec.outlier_ids})
    report = {"command": "synth", "tool": "tvaudit", "version": __version__,
              "config": cfg.to_dict(), "seed": spec.seed, "out_dir": str(out_dir),
              "lists": rows}
    return report, rows


HANDLERS = {"score": cmd_score, "bias": cmd_bias, "dispersion": cmd_dispersion,
            "dedupe": cmd_dedupe, "heaping": cmd_heaping, "synth": cmd_synth}


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(text):
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _int_list(text):
    return [int(float(t)) for t in _csv_list(text)]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--domain", default="1850:1945", help="inclusive year range MIN:MAX")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    inputs = _Parser(add_help=False)
    inputs.add_argument("inputs", nargs="+", help="list files or directories of list files")
    inputs.add_argument("--manifest", help="filename,list_id mapping file")
    inputs.add_argument("--exclude", type=_csv_list, default=[], help="ID[,ID...]")

    parser = _Parser(prog="tvaudit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tvaudit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("score", parents=[common, inputs], help="TVOR scores for every list")
    p.add_argument("--renormalize", action="store_true", help="divide d' by its size trend")
    p.add_argument("--basis", default="n1", help="renormalization basis: n1 | n-sqrt-1")
    p.add_argument("--rank-key", choices=("d_prime", "d_ren", "d_doubleprime"))
    p.add_argument("--reference", help="reference list file for d''")
    p.add_argument("--num-resamples", type=int, default=1000)

    p = sub.add_parser("bias", parents=[common, inputs], help="size-bias regression of d'")
    p.add_argument("--basis", default="n1", help="n1 | n-sqrt-1")
    p.add_argument("--probes", type=_int_list, default=list(DEFAULT_PROBES))

    p = sub.add_parser("dispersion", parents=[common, inputs],
                       help="signed-score spread within a size window")
    p.add_argument("--window", help="size window MIN:MAX (default: all sizes)")
    p.add_argument("--width", type=float, default=10.0)

    p = sub.add_parser("dedupe", parents=[common, inputs], help="duplicate and sublist pairs")
    p.add_argument("--sim-threshold", type=float, default=DEFAULT_SIM_THRESHOLD)
    p.add_argument("--cont-threshold", type=float, default=DEFAULT_CONT_THRESHOLD)

    p = sub.add_parser("heaping", parents=[common, inputs], help="terminal-digit profiles")
    p.add_argument("--flag-threshold", type=float, default=DEFAULT_FLAG_THRESHOLD)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic corpus")
    p.add_argument("spec", help="generator spec file (key = value lines)")
    p.add_argument("--out-dir", required=True)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    for f in fields(RunConfig):
        if f.name != "command" and hasattr(ns, f.name):
            setattr(cfg, f.name, getattr(ns, f.name))
    return cfg


def run(cfg: RunConfig) -> int:
    try:
        report, rows = HANDLERS[cfg.command](cfg)
    except IngestionError as exc:
        log.error("ingestion error: %s", exc)
        return EXIT_INGEST
    except (InvalidParams, InvalidDistribution) as exc:
        log.error("usage error: %s", exc)
        return EXIT_USAGE
    except (TvauditError, ArithmeticError) as exc:
        log.error("numeric error: %s", exc)
        return EXIT_NUMERIC
    except ValueError as exc:
        log.error("usage error: %s", exc)
        return EXIT_USAGE
    text = render(report, rows, cfg.format)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    return run(config_from_args(ns))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
