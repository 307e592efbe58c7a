import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tvaudit.core import BinDomain, Histogram
from tvaudit.errors import DomainMismatch, EmptyHistogram, EmptySublist, InvalidParams
from tvaudit.hygiene import (
    CONTAINED,
    DUPLICATE,
    NEAR_DUPLICATE,
    RawRecordSet,
    containment,
    digit_profile,
    filter_year_range,
    find_duplicates,
    list_similarity,
)

from conftest import make_hist

counts96 = st.lists(st.integers(0, 50), min_size=96, max_size=96)


def test_filter_drops_impossible_years():
    h, dropped = filter_year_range(RawRecordSet("x", (1771, 1900, 1946)))
    assert dropped == 2 and h.size_n == 1 and h.counts[1900 - 1850] == 1


def test_filter_bounds_inclusive():
    h, dropped = filter_year_range(RawRecordSet("x", (1850, 1945)))
    assert dropped == 0 and h.counts[0] == 1 and h.counts[-1] == 1


def test_filter_empty():
    h, dropped = filter_year_range(RawRecordSet("x", ()))
    assert dropped == 0 and h.size_n == 0 and h.counts.shape == (96,)


def test_similarity_cases():
    a = make_hist([1, 2, 3], "a")
    assert list_similarity(a, a.with_id("b")) == 1.0
    assert list_similarity(make_hist([1, 0], "a"), make_hist([0, 1], "b")) == 0.0


def big_list(rng, n=148688):
    p = np.full(96, 1 / 96)
    return Histogram("big", BinDomain(), rng.multinomial(n, p))


def remove_three(h, rng):
    c = h.counts.copy()
    for i in rng.choice(np.flatnonzero(c >= 3), 3, replace=False):
        c[i] -= 1
    return Histogram("minus3", h.domain, c)


def test_similarity_after_removing_three(rng):
    a = big_list(rng)
    b = remove_three(a, rng)
    assert a.size_n == 148688 and b.size_n == 148685
    assert list_similarity(a, b) == 1 - 3 / 148688
    assert list_similarity(a, b) >= 0.9999


def parts_and_whole(rng):
    parts = [make_hist(rng.integers(0, 40, 96), f"part{i}") for i in range(5)]
    whole = Histogram("whole", parts[0].domain, sum(p.counts for p in parts))
    return parts, whole


def test_containment_composition(rng):
    parts, whole = parts_and_whole(rng)
    for p in parts:
        assert containment(p, whole) == 1.0
    assert containment(make_hist([1, 0], "a"), make_hist([0, 1], "b")) == 0.0


def test_containment_empty_sublist():
    with pytest.raises(EmptySublist):
        containment(make_hist([0, 0]), make_hist([1, 1]))


def test_domain_mismatch():
    with pytest.raises(DomainMismatch):
        list_similarity(make_hist([1, 2]), make_hist([1, 2], min_year=1851))


def test_find_duplicates_verdicts(rng):
    a = big_list(rng)
    b = remove_three(a, rng)
    parts, whole = parts_and_whole(rng)
    hs = [whole, b, a.with_id("copy"), a] + parts
    rep = find_duplicates(hs)
    got = {(p.id_a, p.id_b): p.verdict for p in rep.pairs}
    assert got[("big", "copy")] == DUPLICATE
    assert got[("big", "minus3")] == NEAR_DUPLICATE
    assert got[("copy", "minus3")] == NEAR_DUPLICATE
    for i in range(5):
        assert got[(f"part{i}", "whole")] == CONTAINED
    keys = [(p.id_a, p.id_b) for p in rep.pairs]
    assert keys == sorted(keys) and all(x < y for x, y in keys)


def test_find_duplicates_matches_pairwise_functions(rng):
    parts, whole = parts_and_whole(rng)
    rep = find_duplicates(parts + [whole])
    for p in rep.pairs:
        sub = next(h for h in parts if h.list_id == p.id_a)
        assert p.containment_ab == containment(sub, whole)
        assert p.similarity == list_similarity(sub, whole)


def test_find_duplicates_without_containment(rng):
    parts, whole = parts_and_whole(rng)
    rep = find_duplicates(parts + [whole], check_containment=False)
    assert all(p.verdict != CONTAINED for p in rep.pairs)


def test_find_duplicates_ignores_empty_and_validates():
    rep = find_duplicates([make_hist([0, 0], "e1"), make_hist([0, 0], "e2")])
    assert rep.pairs == ()
    with pytest.raises(InvalidParams):
        find_duplicates([], sim_threshold=0)


@given(counts96, counts96)
def test_similarity_symmetric_and_bounded(x, y):
    a, b = make_hist(x, "a"), make_hist(y, "b")
    s = list_similarity(a, b)
    assert s == list_similarity(b, a)
    assert 0 <= s <= 1
    assert (s == 1) == (x == y)


def test_profile_all_on_zero():
    dom = BinDomain()
    c = np.where(dom.years % 10 == 0, 7, 0)
    prof = digit_profile(Histogram("z", dom, c))
    assert prof.digit_indices[0] == 10.0
    assert all(v == 0 for v in prof.digit_indices[1:])
    assert prof.flagged_digits == {0}


def test_profile_uniform_digits():
    dom = BinDomain(1850, 1949)
    prof = digit_profile(Histogram("u", dom, np.full(100, 3)))
    assert prof.digit_indices == (1.0,) * 10
    assert prof.chi_square == 0.0 and prof.flagged_digits == frozenset()
    assert prof.mid_decade_index == 1.0


def test_profile_empty():
    with pytest.raises(EmptyHistogram):
        digit_profile(make_hist([0, 0]))


@given(counts96.filter(lambda c: sum(c) > 0), st.integers(1, 5))
def test_profile_indices_sum_and_scale(c, k):
    p1 = digit_profile(make_hist(c))
    assert sum(p1.digit_indices) == pytest.approx(10.0)
    pk = digit_profile(make_hist([k * v for v in c]))
    assert pk.digit_indices == pytest.approx(p1.digit_indices, rel=1e-12)
    assert pk.flagged_digits == p1.flagged_digits
