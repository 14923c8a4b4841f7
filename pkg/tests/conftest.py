from fractions import Fraction

import pytest
from hypothesis import strategies as st

from apalgebra.freqmod import Frequency, default_table
from apalgebra.trigpoly import CRational, TrigPoly

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table():
    return default_table(8)


@pytest.fixture(scope="session")
def w(table):
    """Generators w1 = 1, w2 = √2, w3 = √3, … as frequencies."""
    return table.gens()


def small_fraction(max_den=6, bound=3):
    return st.builds(
        lambda n, d: Fraction(n, d),
        st.integers(-bound * max_den, bound * max_den),
        st.integers(1, max_den),
    )


def frequencies(table, ngen=3, max_den=6):
    return st.tuples(*[small_fraction(max_den) for _ in range(ngen)]).map(
        lambda cs: Frequency(tuple(cs) + (Fraction(0),) * (len(table) - ngen), table)
    )


def crationals(bound=3):
    return st.builds(CRational, small_fraction(4, bound), small_fraction(4, bound))


def trigpolys(table, ngen=3, max_terms=6, max_den=6):
    return st.lists(st.tuples(frequencies(table, ngen, max_den), crationals()), max_size=max_terms).map(
        lambda items: TrigPoly(items, table)
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
