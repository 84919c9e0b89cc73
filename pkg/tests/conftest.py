from __future__ import annotations

from fractions import Fraction

import pytest

from latticeops import Lattice, make_field


@pytest.fixture(scope="session")
def exact():
    return make_field("exact")


@pytest.fixture(scope="session")
def big():
    return make_field("bigfloat", precision=128)


def lattice_battery(field):
    """One lattice of each kind the operator identities must cover."""
    return [
        Lattice(field, Fraction(1, 4), (Fraction(1, 2), Fraction(1, 2), 0)),
        Lattice(field, 4, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))),
        Lattice(field, 1, (1, 0, 0)),
        Lattice(field, 1, (0, 1, 0)),
    ]


@pytest.fixture(scope="session")
def sym_lattice(exact):
    """Symmetric q-quadratic lattice: x(s) = (q^-s + q^s)/2, q = 1/4."""
    return Lattice(exact, Fraction(1, 4), (Fraction(1, 2), Fraction(1, 2), 0))


@pytest.fixture(scope="session")
def gen_lattice(exact):
    """q-quadratic lattice with all three constants nonzero, q = 4."""
    return Lattice(exact, 4, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)))


@pytest.fixture(scope="session")
def quad_lattice(exact):
    """Quadratic lattice with beta != 0."""
    return Lattice(exact, 1, (2, Fraction(1, 3), Fraction(-1, 4)))


@pytest.fixture(scope="session")
def lin_lattice(exact):
    """Linear lattice x(s) = s."""
    return Lattice(exact, 1, (0, 1, 0))
