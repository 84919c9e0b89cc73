from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from latticeops import Lattice, LatticeError, Polynomial, make_field

qs = st.sampled_from(
    [Fraction(1, 9), Fraction(1, 4), Fraction(4), Fraction(9), Fraction(25, 4)]
)


@pytest.mark.parametrize(
    "q, c, kind",
    [
        (Fraction(1, 4), (Fraction(1, 2), Fraction(1, 2), 0), "q-quadratic"),
        (4, (Fraction(1, 2), 0, 3), "q-linear"),
        (1, (1, 0, 0), "quadratic"),
        (1, (0, 1, 0), "linear"),
        (1, (0, 0, Fraction(3, 7)), "linear"),
    ],
)
def test_kind_detection(exact, q, c, kind):
    assert Lattice(exact, q, c).kind == kind


def test_constant_lattice_flag(exact):
    assert Lattice(exact, 1, (0, 0, Fraction(3, 7))).is_constant
    assert not Lattice(exact, 1, (0, 1, 0)).is_constant


@pytest.mark.parametrize(
    "q, c",
    [
        (0, (1, 1, 0)),
        (-4, (1, 1, 0)),
        (Fraction(1, 4), (0, 0, 1)),
        (1, (0, 0, 0)),
    ],
)
def test_invalid_constants_rejected(exact, q, c):
    with pytest.raises(LatticeError):
        Lattice(exact, q, c)


def test_exact_backend_needs_rational_sqrt_q(exact):
    with pytest.raises(LatticeError):
        Lattice(exact, 2, (1, 1, 0))


class TestFrozenValuesQ4:
    """Hand-checked constants on the q = 4 symmetric lattice."""

    @pytest.fixture()
    def lat(self, exact):
        return Lattice(exact, 4, (Fraction(1, 2), Fraction(1, 2), 0))

    def test_alpha(self, lat, exact):
        assert lat.constants.alpha == exact(Fraction(5, 4))

    def test_gamma_2(self, lat, exact):
        assert lat.constants.gamma_n(2) == exact(Fraction(5, 2))

    def test_alpha_2(self, lat, exact):
        assert lat.constants.alpha_n(2) == exact(Fraction(17, 8))

    def test_node_values(self, lat, exact):
        assert lat.x(0) == exact.one
        assert lat.x(1) == exact(Fraction(17, 8))
        assert lat.x(Fraction(1, 2)) == exact(Fraction(5, 4))
        assert lat.nodes(2) == [(0, exact(1)), (1, exact(Fraction(17, 8)))]

    def test_negative_index_values(self, lat, exact):
        assert lat.constants.alpha_n(-1) == lat.constants.alpha
        assert lat.constants.gamma_n(-1) == exact(-1)


class TestRecurrences:
    def check(self, lat):
        field = lat.field
        con = lat.constants
        alpha, beta = con.alpha, con.beta
        for n in range(1, 12):
            assert con.alpha_n(n + 1) == 2 * alpha * con.alpha_n(n) - con.alpha_n(n - 1)
            assert con.gamma_n(n + 1) - con.gamma_n(n - 1) == 2 * con.alpha_n(n)
            assert (
                con.beta_n(n + 1) - 2 * con.beta_n(n) + con.beta_n(n - 1)
                == 2 * beta * con.alpha_n(n)
            )

    @given(qs)
    def test_q_lattice(self, q):
        exact = make_field("exact")
        self.check(Lattice(exact, q, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))))

    def test_quadratic_lattice(self, quad_lattice):
        self.check(quad_lattice)

    def test_self_check_passes(self, gen_lattice):
        gen_lattice.constants.self_check(16)


def test_q1_sequences_are_polynomial(quad_lattice, exact):
    con = quad_lattice.constants
    for n in range(8):
        assert con.gamma_n(n) == exact(n)
        assert con.alpha_n(n) == exact.one
    # beta_n = beta n^2 with beta = c4/4
    assert con.beta == exact(Fraction(1, 2))
    assert con.beta_n(3) == exact(Fraction(9, 2))


def test_u2_closed_form(gen_lattice, exact):
    lat = gen_lattice
    alpha = lat.constants.alpha
    c1, c2, c3 = lat.c
    z = Polynomial(exact, (0, 1))
    shifted = z - c3
    expected = (alpha * alpha - exact.one) * (shifted * shifted - 4 * c1 * c2)
    assert lat.u2() == expected


def test_u1_u2_quadratic(quad_lattice, exact):
    c4, c5, c6 = quad_lattice.c
    assert quad_lattice.u1() == Polynomial(exact, (c4 / exact(2),))
    z = Polynomial(exact, (0, 1))
    assert quad_lattice.u2() == c4 * (z - c6) + Polynomial(
        exact, (c5 * c5 / exact(4),)
    )


def test_gamma_factorial(gen_lattice, exact):
    con = gen_lattice.constants
    prod = exact.one
    for k in range(1, 6):
        prod = prod * con.gamma_n(k)
    assert con.gamma_factorial(5) == prod


def test_json_roundtrip(exact, gen_lattice):
    lat2 = Lattice.from_json(exact, gen_lattice.to_json())
    assert lat2.q == gen_lattice.q
    assert lat2.c == gen_lattice.c
    assert lat2.kind == gen_lattice.kind


def test_json_kind_mismatch_rejected(exact):
    with pytest.raises(LatticeError):
        Lattice.from_json(
            exact, {"kind": "linear", "q": "4", "c": ["1/2", "1/2", "0"]}
        )


def test_bigfloat_lattice_with_irrational_sqrt_q(big):
    lat = Lattice(big, 2, (1, 1, 0))
    assert big.approx_eq(lat.sqrt_q * lat.sqrt_q, lat.q)


def test_table_horizon_is_enforced(exact):
    lat = Lattice(exact, 4, (1, 1, 0), table_horizon=4)
    lat.constants.gamma_n(4)
    with pytest.raises(LatticeError):
        lat.constants.gamma_n(5)


def test_default_horizon_allows_deep_indices(exact):
    lat = Lattice(exact, 4, (1, 1, 0))
    assert lat.constants.gamma_n(40) == exact(Fraction(2**80 - 1, 3 * 2**39))
