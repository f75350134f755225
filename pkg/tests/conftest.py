import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def sym_matrices(draw, min_size=1, max_size=5):
    n = draw(st.integers(min_size, max_size))
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = draw(rationals)
    return rows


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def corpus_dir():
    return CORPUS
