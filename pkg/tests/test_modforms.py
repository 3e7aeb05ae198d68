"""Tests for q-expansions, the echelon cusp basis and eigen-systems."""

from fractions import Fraction

import pytest

from paracong.errors import PreconditionError
from paracong.exactmath import PolyOverQ, primes_up_to
from paracong.modforms import (
    QExpansion,
    delta,
    dim_cusp_forms_level1,
    eigen_systems_level1,
    eigenforms_level1,
    eisenstein,
    hecke_op,
    miller_basis,
)


class TestEisenstein:
    def test_e4_first_coefficients(self):
        e4 = eisenstein(4, 3)
        assert list(e4.coeffs) == [1, 240, 2160]

    def test_e12_uses_b12(self):
        e12 = eisenstein(12, 2)
        assert e12[1] == Fraction(65520, 691)

    def test_constant_term_is_one(self):
        for k in range(4, 31, 2):
            assert eisenstein(k, 2)[0] == 1

    def test_odd_or_small_rejected(self):
        with pytest.raises(PreconditionError):
            eisenstein(5, 10)
        with pytest.raises(PreconditionError):
            eisenstein(2, 10)


class TestDelta:
    def test_leading_terms(self):
        d = delta(3)
        assert d[0] == 0 and d[1] == 1 and d[2] == -24

    def test_identity_1728_delta(self):
        prec = 100
        e4, e6 = eisenstein(4, prec), eisenstein(6, prec)
        lhs = delta(prec).scale(1728)
        rhs = e4 * e4 * e4 - e6 * e6
        assert lhs.coeffs == rhs.coeffs

    def test_tau_up_to_200_against_eisenstein_identity(self):
        prec = 201
        e4, e6 = eisenstein(4, prec), eisenstein(6, prec)
        target = (e4 * e4 * e4 - e6 * e6).scale(Fraction(1, 1728))
        d = delta(prec)
        for n in range(prec):
            assert d[n] == target[n]

    def test_known_tau_values(self):
        d = delta(11)
        assert [d[n] for n in range(1, 11)] == [
            1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920,
        ]


class TestMillerBasis:
    def test_weight12_is_delta(self):
        basis = miller_basis(12, 20)
        assert len(basis) == 1
        assert basis[0].coeffs == delta(20).coeffs

    def test_weight10_empty(self):
        assert miller_basis(10, 20) == []

    def test_weight24_echelon(self):
        basis = miller_basis(24, 12)
        assert len(basis) == 2
        g1, g2 = basis
        assert g1[1] == 1 and g1[2] == 0
        assert g2[1] == 0 and g2[2] == 1

    def test_dimension_match(self):
        for k in range(12, 41, 2):
            assert len(miller_basis(k, 14)) == dim_cusp_forms_level1(k)

    def test_insufficient_precision(self):
        with pytest.raises(PreconditionError):
            miller_basis(24, 2)


class TestHeckeOp:
    def test_t2_delta_eigenvalue(self):
        d = delta(40)
        t2 = hecke_op(d, 2)
        expect = d.truncate(20).scale(-24)
        assert t2.coeffs == expect.coeffs

    def test_t1_identity(self):
        d = delta(15)
        assert hecke_op(d, 1).coeffs == d.coeffs

    def test_t2_t3_equals_t6_on_delta(self):
        d = delta(80)
        lhs = hecke_op(hecke_op(d, 2), 3)
        rhs = hecke_op(d, 6).truncate(lhs.prec)
        assert lhs.coeffs == rhs.coeffs

    def test_commutativity_small_weights(self):
        for k in range(12, 29, 2):
            basis = miller_basis(k, 40)
            for g in basis:
                for m, n in [(2, 3), (2, 5), (3, 5)]:
                    ab = hecke_op(hecke_op(g, m), n)
                    ba = hecke_op(hecke_op(g, n), m)
                    assert ab.coeffs == ba.coeffs

    def test_precision_shortfall(self):
        with pytest.raises(PreconditionError):
            hecke_op(delta(10), 9)


class TestEigenSystems:
    def test_weight12_is_tau(self):
        systems = eigen_systems_level1(12, primes_up_to(20), 50)
        assert len(systems) == 1
        sys = systems[0]
        assert sys.ctx.degree == 1
        d = delta(21)
        for q in primes_up_to(20):
            assert sys.get(q) == sys.ctx.from_rational(d[q])

    def test_weight24_orbit(self):
        systems = eigen_systems_level1(24, [2, 3], 80)
        assert len(systems) == 1
        ctx = systems[0].ctx
        assert ctx.minpoly == PolyOverQ([-20468736, -1080, 1])
        # a_2 is the class of x: T_2 eigenvalue
        assert systems[0].get(2) == ctx.generator()

    def test_weight10_empty(self):
        assert eigen_systems_level1(10, [2], 30) == []

    def test_hecke_recursion_a_q_squared(self):
        # a_{q^2} = a_q^2 - q^{k-1} for eigenforms
        for k in (12, 16, 24, 26):
            for ctx, coeffs in eigenforms_level1(k, 30):
                for q in (2, 3, 5):
                    assert coeffs[q * q] == coeffs[q] * coeffs[q] - q ** (k - 1)

    def test_orbit_degrees_sum_to_dimension(self):
        for k in (24, 28, 32, 36, 40):
            orbits = eigenforms_level1(k, 3 * (dim_cusp_forms_level1(k) + 1) + 1)
            assert sum(ctx.degree for ctx, _ in orbits) == dim_cusp_forms_level1(k)

    def test_precision_policy_enforced(self):
        with pytest.raises(PreconditionError):
            eigen_systems_level1(12, primes_up_to(50), 60)

    def test_multiplicativity_a6(self):
        for ctx, coeffs in eigenforms_level1(24, 30):
            assert coeffs[6] == coeffs[2] * coeffs[3]
