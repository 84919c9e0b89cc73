from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from latticeops import (
    FUNCTIONAL_IDENTITIES,
    AdmissibilityError,
    HorizonError,
    Lattice,
    MomentFunctional,
    NotRegularError,
    OPSequence,
    PearsonPair,
    Polynomial,
    TTRRCoeffs,
    dual_dx,
    dual_sx,
    hankel_dets,
    left_mul,
    make_field,
    ttrr_oracle,
    verify_functional_identity,
)
from latticeops.functionals import dual_dx_pow, pearson_moments

small_fracs = st.fractions(
    min_value=Fraction(-5), max_value=Fraction(5), max_denominator=6
)


def random_functional(field, seed):
    def ext(k):
        rr = random.Random(f"{seed}:{k}")
        return field(Fraction(rr.randint(-9, 9), rr.randint(1, 9)))

    return MomentFunctional(field, extender=ext)


class TestMomentFunctional:
    def test_from_moments_and_horizon(self, exact):
        u = MomentFunctional.from_moments(exact, (1, 2, 3))
        assert u.horizon == 2
        assert u.moment(2) == exact(3)
        with pytest.raises(HorizonError):
            u.moment(3)

    def test_extender_values_are_cached(self, exact):
        calls = []

        def ext(k):
            calls.append(k)
            return exact(k)

        u = MomentFunctional(exact, extender=ext)
        assert u.moment(4) == exact(4)
        assert u.moment(4) == exact(4)
        assert calls.count(4) == 1
        assert u.horizon is None

    def test_apply_is_linear_in_the_polynomial(self, exact):
        u = MomentFunctional.from_moments(exact, (2, -1, 5, 0, 3))
        f = Polynomial(exact, (1, 0, Fraction(2, 3)))
        g = Polynomial(exact, (0, 4, 0, -1))
        lam = exact(Fraction(7, 5))
        assert u.apply(lam * f + g) == lam * u.apply(f) + u.apply(g)

    def test_functional_arithmetic(self, exact):
        u = MomentFunctional.from_moments(exact, (1, 2, 3))
        v = MomentFunctional.from_moments(exact, (5, -1, 0))
        w = exact(2) * u - v
        assert w.moments(2) == [exact(-3), exact(5), exact(6)]

    def test_left_mul_adjoint_property(self, exact):
        u = random_functional(exact, 11)
        f = Polynomial(exact, (1, Fraction(-2, 3), 1))
        g = Polynomial(exact, (0, 1, 4))
        assert left_mul(u, f).apply(g) == u.apply(f * g)


class TestDualOperators:
    def test_dual_dx_pairing(self, gen_lattice, exact):
        from latticeops import dx

        u = random_functional(exact, 3)
        f = Polynomial(exact, (Fraction(1, 2), 0, -3, 1))
        assert dual_dx(gen_lattice, u).apply(f) == -u.apply(dx(gen_lattice, f))

    def test_dual_sx_pairing(self, gen_lattice, exact):
        from latticeops import sx

        u = random_functional(exact, 5)
        f = Polynomial(exact, (2, -1, 0, Fraction(5, 7)))
        assert dual_sx(gen_lattice, u).apply(f) == u.apply(sx(gen_lattice, f))

    def test_dual_power_iterates(self, gen_lattice, exact):
        u = random_functional(exact, 8)
        twice = dual_dx(gen_lattice, dual_dx(gen_lattice, u))
        assert dual_dx_pow(gen_lattice, u, 2).moments(4) == twice.moments(4)

    @pytest.mark.parametrize("identity", FUNCTIONAL_IDENTITIES)
    @pytest.mark.parametrize("seed", [0, 1])
    def test_identities_exact(self, gen_lattice, exact, identity, seed):
        rng = random.Random(seed)
        if identity == "leibniz_deg2":
            f = Polynomial(exact, (Fraction(1, 3), Fraction(-1, 2), Fraction(2, 5)))
        else:
            deg = rng.randint(1, 4)
            f = Polynomial(
                exact,
                [Fraction(rng.randint(-6, 6), rng.randint(1, 6)) for _ in range(deg)]
                + [Fraction(1, 2)],
            )
        u = random_functional(exact, 40 + seed)
        rep = verify_functional_identity(gen_lattice, identity, f, u, n=2, horizon=8)
        assert rep.passed and rep.residual == 0.0

    def test_identity_report_serialization(self, gen_lattice, exact):
        u = random_functional(exact, 2)
        f = Polynomial(exact, (0, 1))
        rep = verify_functional_identity(gen_lattice, "dual_product_dx", f, u, horizon=6)
        assert rep.to_json()["identity"] == "dual_product_dx"


class TestPearsonMoments:
    def test_first_moment_from_recursion(self, gen_lattice, exact):
        """<u, phi D z + psi S z> = 0 pins mu_1 in terms of mu_0."""
        phi = Polynomial(exact, (Fraction(7, 10), Fraction(-1, 3), Fraction(2, 7)))
        psi = Polynomial(exact, (Fraction(1, 2), Fraction(3, 4)))
        pair = PearsonPair(gen_lattice, phi, psi)
        u = pearson_moments(gen_lattice, pair)
        from latticeops import dx, sx

        z = Polynomial.monomial(exact, 1)
        probe = phi * dx(gen_lattice, z) + psi * sx(gen_lattice, z)
        assert u.apply(probe) == exact.zero
        assert u.moment(0) == exact.one

    def test_all_probes_vanish(self, quad_lattice, exact):
        phi = Polynomial(exact, (Fraction(7, 10), Fraction(-1, 3), Fraction(2, 7)))
        psi = Polynomial(exact, (Fraction(1, 2), Fraction(3, 4)))
        pair = PearsonPair(quad_lattice, phi, psi)
        u = pearson_moments(quad_lattice, pair)
        from latticeops import dx, sx

        for n in range(1, 8):
            zn = Polynomial.monomial(exact, n)
            probe = phi * dx(quad_lattice, zn) + psi * sx(quad_lattice, zn)
            assert u.apply(probe) == exact.zero

    def test_mu0_scaling(self, gen_lattice, exact):
        phi = Polynomial(exact, (1, 0, Fraction(1, 4)))
        psi = Polynomial(exact, (0, 1))
        pair = PearsonPair(gen_lattice, phi, psi)
        u1 = pearson_moments(gen_lattice, pair, mu0=1)
        u3 = pearson_moments(gen_lattice, pair, mu0=Fraction(3, 2))
        assert u3.moments(5) == [exact(Fraction(3, 2)) * m for m in u1.moments(5)]

    def test_inadmissible_pair_raises(self, gen_lattice, exact):
        # choose a/d = -alpha_2/gamma_2 so d_2 = a gamma_2 + d alpha_2 = 0
        con = gen_lattice.constants
        a = -con.alpha_n(2)
        d = con.gamma_n(2)
        phi = Polynomial(exact, (1, 0, a))
        psi = Polynomial(exact, (0, d))
        pair = PearsonPair(gen_lattice, phi, psi)
        u = pearson_moments(gen_lattice, pair)
        with pytest.raises(AdmissibilityError):
            u.moments(8)


class TestTTRR:
    def test_from_lists_and_rows(self, exact):
        ttrr = TTRRCoeffs.from_lists(exact, [1, 2], [Fraction(1, 3)])
        rows = ttrr.rows(1)
        assert rows == [(0, exact(1), exact.zero), (1, exact(2), exact(Fraction(1, 3)))]
        with pytest.raises(HorizonError):
            ttrr.b(2)

    def test_c0_is_zero(self, exact):
        ttrr = TTRRCoeffs.from_lists(exact, [0], [])
        assert ttrr.c(0) == exact.zero

    def test_to_json_shape(self, exact):
        ttrr = TTRRCoeffs.from_lists(exact, [1, 2], [3])
        blob = ttrr.to_json(1)
        assert blob == [
            {"n": 0, "b": "1", "c": "0"},
            {"n": 1, "b": "2", "c": "3"},
        ]

    def test_sequence_is_monic_with_right_degree(self, exact):
        ttrr = TTRRCoeffs(exact, lambda n: exact(n), lambda n: exact(Fraction(1, n + 1)))
        seq = OPSequence(exact, ttrr)
        for n in range(6):
            p = seq.p(n)
            assert p.degree == n
            assert p.coeff(n) == exact.one
        assert seq.p(-1).degree == -1

    def test_recurrence_holds(self, exact):
        ttrr = TTRRCoeffs.from_lists(
            exact, [1, -1, 2, 0, 1], [Fraction(1, 2), 3, Fraction(-2, 5), 1]
        )
        seq = OPSequence(exact, ttrr)
        z = Polynomial.monomial(exact, 1)
        for n in range(4):
            lhs = seq.p(n + 1)
            rhs = (z - ttrr.b(n)) * seq.p(n) - ttrr.c(n) * seq.p(n - 1)
            assert lhs == rhs


class TestOracle:
    def sample_functional(self, exact):
        phi = Polynomial(exact, (Fraction(7, 10), Fraction(-1, 3), Fraction(2, 7)))
        psi = Polynomial(exact, (Fraction(1, 2), Fraction(3, 4)))
        lat = Lattice(exact, 4, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)))
        return pearson_moments(lat, PearsonPair(lat, phi, psi))

    def test_orthogonality(self, exact):
        u = self.sample_functional(exact)
        ttrr = ttrr_oracle(u, 5)
        seq = OPSequence(exact, ttrr)
        for n in range(5):
            for m in range(n):
                assert u.apply(seq.p(n) * seq.p(m)) == exact.zero
            assert u.apply(seq.p(n) * seq.p(n)) != exact.zero

    def test_hankel_consistency(self, exact):
        """C_(n+1) = Delta_(n+2) Delta_n / Delta_(n+1)^2 against the minors."""
        u = self.sample_functional(exact)
        ttrr = ttrr_oracle(u, 4)
        dets = hankel_dets(u, 6)
        for n in range(4):
            expected = dets[n + 2] * dets[n] / (dets[n + 1] * dets[n + 1])
            assert ttrr.c(n + 1) == expected

    def test_degenerate_moments_detected(self, exact):
        u = MomentFunctional.from_moments(exact, (1, 0, 0, 0, 0, 0))
        with pytest.raises(NotRegularError) as err:
            ttrr_oracle(u, 2)
        assert err.value.level == 1

    @settings(max_examples=20, deadline=None)
    @given(st.lists(small_fracs, min_size=7, max_size=7))
    def test_random_regular_moments(self, ms):
        exact = make_field("exact")
        u = MomentFunctional.from_moments(exact, [Fraction(1)] + ms[1:])
        dets = hankel_dets(u, 3)
        assume(all(d != exact.zero for d in dets))
        ttrr = ttrr_oracle(u, 2)
        seq = OPSequence(exact, ttrr)
        assert u.apply(seq.p(1) * seq.p(2)) == exact.zero
        assert u.apply(seq.p(0) * seq.p(2)) == exact.zero
