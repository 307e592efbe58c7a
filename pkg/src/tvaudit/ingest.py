"""Reading and writing per-list birth-year files.

A list file is UTF-8 text in one of two layouts, detected per file:

* years:  one integer birth year per line
* counts: ``year,count`` per line (comma, semicolon, tab or blank separated)

Blank lines, ``#`` comments and a single non-numeric header line are
ignored.  The list id is the file stem unless a manifest maps the file name
to another id.
"""
import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .core import DEFAULT_DOMAIN, BinDomain, Histogram
from .errors import IngestionError
from .hygiene import RawRecordSet, filter_year_range

_SPLIT = re.compile(r"[,;\t ]+")

PathLike = Union[str, Path]


@dataclass(frozen=True)
class LoadedList:
    histogram: Histogram
    dropped: int
    path: str
    layout: str
    sha256: str


def _data_lines(text: str) -> List[List[str]]:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(_SPLIT.split(line))
    return rows


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def parse_list_text(text: str, list_id: str, source: str = "<text>") -> tuple:
    """Return ``(RawRecordSet, layout)`` for the contents of one list file."""
    rows = _data_lines(text)
    if rows and not all(_is_int(t) for t in rows[0]):
        rows = rows[1:]  # header
    widths = {len(r) for r in rows}
    if not rows:
        return RawRecordSet(list_id, ()), "years"
    if widths == {1}:
        layout = "years"
    elif widths == {2}:
        layout = "counts"
    else:
        raise IngestionError(source, f"mixed or unsupported column counts {sorted(widths)}")
    try:
        table = np.array([[int(t) for t in r] for r in rows], dtype=np.int64)
    except ValueError as exc:
        raise IngestionError(source, f"non-integer value ({exc})") from None
    if layout == "years":
        return RawRecordSet(list_id, tuple(table[:, 0].tolist()), source), layout
    if np.any(table[:, 1] < 0):
        raise IngestionError(source, "negative count")
    years = np.repeat(table[:, 0], table[:, 1])
    return RawRecordSet(list_id, tuple(years.tolist()), source), layout


def read_manifest(path: PathLike) -> Dict[str, str]:
    """``filename -> list_id`` from a two-column delimited file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestionError(str(path), f"cannot read manifest ({exc})") from None
    rows = _data_lines(text)
    mapping = {}
    for r in rows:
        if len(r) != 2:
            raise IngestionError(str(path), f"manifest rows need 2 columns, got {r}")
        if r[0].lower() in ("filename", "file") and not mapping:
            continue
        mapping[r[0]] = r[1]
    return mapping


def load_list(path: PathLike, domain: BinDomain = DEFAULT_DOMAIN,
              list_id: Optional[str] = None) -> LoadedList:
    path = Path(path)
    try:
        data = path.read_bytes()
        text = data.decode("utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestionError(str(path), f"cannot read ({exc})") from None
    raw, layout = parse_list_text(text, list_id or path.stem, str(path))
    hist, dropped = filter_year_range(raw, domain)
    return LoadedList(hist, dropped, str(path), layout, hashlib.sha256(data).hexdigest())


def expand_inputs(inputs: Sequence[PathLike], exclude: Iterable[PathLike] = ()) -> List[Path]:
    skip = {Path(p).resolve() for p in exclude}
    files = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            files += sorted(f for f in p.iterdir()
                            if f.is_file() and not f.name.startswith(".") and f.resolve() not in skip)
        elif p.is_file():
            files.append(p)
        else:
            raise IngestionError(str(p), "no such file or directory")
    return files


def load_corpus(inputs: Sequence[PathLike], domain: BinDomain = DEFAULT_DOMAIN,
                manifest: Optional[PathLike] = None) -> List[LoadedList]:
    mapping = read_manifest(manifest) if manifest else {}
    files = expand_inputs(inputs, [manifest] if manifest else [])
    loaded = [load_list(f, domain, mapping.get(f.name)) for f in files]
    seen = {}
    for item in loaded:
        lid = item.histogram.list_id
        if lid in seen:
            raise IngestionError(item.path, f"list id {lid!r} already used by {seen[lid]}")
        seen[lid] = item.path
    return loaded


def format_counts(h: Histogram) -> str:
    lines = ["year,count"]
    lines += [f"{y},{c}" for y, c in zip(h.domain.years.tolist(), h.counts.tolist())]
    return "\n".join(lines) + "\n"


def write_counts_file(h: Histogram, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(format_counts(h), encoding="utf-8")
    return path
