from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from markov_kernels.core import Distribution, Embedding, FiniteSpace, MarkovKernel
from markov_kernels.diagnosis import PAPER_TABLES

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

S1_GRID = ([1, 1, 2, 2, 3, 3, 4, 4], [3, 4, 4, 3, 1, 2, 2, 1])
S2_GRID = ([1, 1, 2, 2, 3, 3, 4, 4], [1, 2, 1, 2, 3, 3, 4, 4])
S3_GRID = ([1, 1, 2, 2, 3, 3, 4, 4], [3, 4, 4, 1, 1, 2, 2, 3])


@pytest.fixture
def s1():
    return PAPER_TABLES["S1"]


@pytest.fixture
def s2():
    return PAPER_TABLES["S2"]


@pytest.fixture
def s3():
    return PAPER_TABLES["S3"]


def space(name, size):
    return FiniteSpace(tuple(f"{name}{i}" for i in range(size)))


@st.composite
def exact_masses(draw, size, allow_zero=True):
    lo = 0 if allow_zero else 1
    counts = draw(st.lists(st.integers(lo, 6), min_size=size, max_size=size))
    if sum(counts) == 0:
        counts[draw(st.integers(0, size - 1))] = 1
    total = sum(counts)
    return tuple(Fraction(c, total) for c in counts)


@st.composite
def distributions(draw, sp):
    return Distribution(sp, draw(exact_masses(len(sp))))


@st.composite
def kernels(draw, source, target):
    return MarkovKernel(source, target, tuple(draw(exact_masses(len(target))) for _ in source))


@st.composite
def embeddings(draw, sp, dim=None):
    if dim is None:
        dim = draw(st.integers(1, 2))
    coord = st.fractions(min_value=-5, max_value=5, max_denominator=6)
    return Embedding(sp, tuple(tuple(draw(coord) for _ in range(dim)) for _ in sp))


@st.composite
def kernel_instances(draw, max_size=3):
    """``(p, m, e, m1, m2)`` on random small spaces."""
    size = st.integers(1, max_size)
    src = space("w", draw(size))
    sx, s1, s2 = space("x", draw(size)), space("a", draw(size)), space("b", draw(size))
    p = draw(distributions(src))
    return p, draw(kernels(src, sx)), draw(embeddings(sx)), draw(kernels(src, s1)), draw(kernels(src, s2))


@st.composite
def table_grids(draw, max_count=6):
    cells = draw(st.lists(st.integers(0, max_count), min_size=16, max_size=16))
    top, bottom = cells[:8], cells[8:]
    if sum(top[0::2]) + sum(bottom[0::2]) == 0:
        top[0] = 1
    if sum(top[1::2]) + sum(bottom[1::2]) == 0:
        bottom[1] = 1
    return top, bottom


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
