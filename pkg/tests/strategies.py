"""Hypothesis strategies shared by the test modules."""

import random

import numpy as np
from hypothesis import strategies as st

from stablesets.generators import random_lattice
from stablesets.polarity import Polarity


@st.composite
def polarities(draw, max_x=4, max_y=4, min_size=0):
    nx = draw(st.integers(min_size, max_x))
    ny = draw(st.integers(min_size, max_y))
    bits = draw(st.lists(st.booleans(), min_size=nx * ny, max_size=nx * ny))
    return Polarity(nx, ny, np.array(bits, dtype=bool).reshape(nx, ny))


@st.composite
def lattices(draw, max_size=6):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_lattice(random.Random(seed), max_size=max_size)


def rngs():
    return st.integers(0, 2**32 - 1).map(random.Random)
