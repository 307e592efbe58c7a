import numpy as np
import pytest

from tvaudit.core import DEFAULT_DOMAIN, BinDomain, Histogram
from tvaudit.errors import IngestionError
from tvaudit.ingest import (
    expand_inputs,
    format_counts,
    load_corpus,
    load_list,
    parse_list_text,
    read_manifest,
    write_counts_file,
)


def test_years_layout():
    raw, layout = parse_list_text("1900\n1901\n\n# note\n1900\n", "x")
    assert layout == "years" and raw.years == (1900, 1901, 1900)


def test_counts_layout_with_header_and_separators():
    for sep in (",", ";", "\t", " "):
        raw, layout = parse_list_text(f"year{sep}count\n1900{sep}2\n1905{sep}1\n", "x")
        assert layout == "counts" and raw.years == (1900, 1900, 1905)


def test_parse_errors():
    with pytest.raises(IngestionError):
        parse_list_text("1900\n1901,2\n", "x")
    with pytest.raises(IngestionError):
        parse_list_text("1901,2\n1900,abc\n", "x")
    with pytest.raises(IngestionError):
        parse_list_text("1900,-1\n", "x")


def test_empty_file(tmp_path):
    f = tmp_path / "e.txt"
    f.write_text("# nothing\n")
    ld = load_list(f)
    assert ld.histogram.size_n == 0 and ld.layout == "years"


def test_load_list_drops_out_of_domain(tmp_path):
    f = tmp_path / "L1.csv"
    f.write_text("1771\n1900\n1946\n")
    ld = load_list(f)
    assert ld.histogram.list_id == "L1" and ld.histogram.size_n == 1 and ld.dropped == 2
    assert len(ld.sha256) == 64


def test_round_trip(tmp_path, rng):
    h = Histogram("rt", DEFAULT_DOMAIN, rng.integers(0, 100, DEFAULT_DOMAIN.n_bins))
    path = write_counts_file(h, tmp_path / "rt.csv")
    assert load_list(path).histogram == h
    assert format_counts(h).splitlines()[0] == "year,count"


def test_manifest_and_corpus(tmp_path):
    (tmp_path / "a.txt").write_text("1900\n")
    (tmp_path / "b.txt").write_text("1901\n")
    (tmp_path / ".hidden").write_text("1902\n")
    man = tmp_path / "manifest.csv"
    man.write_text("filename,list_id\na.txt,45409\n")
    assert read_manifest(man) == {"a.txt": "45409"}
    ids = [ld.histogram.list_id for ld in load_corpus([tmp_path], manifest=man)]
    assert ids == ["45409", "b"]


def test_duplicate_ids_rejected(tmp_path):
    (tmp_path / "a.txt").write_text("1900\n")
    (tmp_path / "b.txt").write_text("1901\n")
    man = tmp_path / "m.csv"
    man.write_text("a.txt,same\nb.txt,same\n")
    with pytest.raises(IngestionError):
        load_corpus([tmp_path / "a.txt", tmp_path / "b.txt"], manifest=man)


def test_missing_and_binary(tmp_path):
    with pytest.raises(IngestionError):
        expand_inputs([tmp_path / "nope"])
    f = tmp_path / "bin.dat"
    f.write_bytes(b"\xff\xfe\x00")
    with pytest.raises(IngestionError):
        load_list(f)


def test_custom_domain(tmp_path):
    f = tmp_path / "d.txt"
    f.write_text("1800\n1849\n1850\n")
    ld = load_list(f, BinDomain(1800, 1849))
    assert ld.histogram.size_n == 2 and ld.dropped == 1
    assert np.array_equal(ld.histogram.counts[[0, 49]], [1, 1])
