import string

import numpy as np
import pytest
from hypothesis import strategies as st

from phylopubo.seqio import Alignment, STATES


def alignment(*rows, taxa=None):
    """Alignment with taxa a, b, c, ... unless given."""
    taxa = taxa or string.ascii_lowercase[: len(rows)]
    return Alignment.from_rows(taxa, rows)


def random_alignment(rng, n, m=1, alphabet="ACGT"):
    rows = ["".join(rng.choice(list(alphabet), size=m)) for _ in range(n)]
    return alignment(*rows)


def columns(n, m=1, alphabet=STATES):
    """Hypothesis strategy for an n-taxon alignment of length m."""
    row = st.text(alphabet=alphabet, min_size=m, max_size=m)
    return st.lists(row, min_size=n, max_size=n).map(lambda rows: alignment(*rows))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
