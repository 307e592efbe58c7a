import numpy as np
import pytest

from tvaudit.core import BinDomain, Histogram


def make_hist(counts, list_id="h", min_year=1850):
    counts = list(counts)
    return Histogram(list_id, BinDomain(min_year, min_year + len(counts) - 1), counts)


def loop_dtv(counts):
    """Independent reference: plain Python loop over adjacent bins."""
    total = 0
    for i in range(1, len(counts)):
        total += abs(int(counts[i]) - int(counts[i - 1]))
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
