"""Tests for the exact arithmetic substrate."""

import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paracong.errors import PreconditionError
from paracong.exactmath import (
    PolyMod,
    PolyOverQ,
    ResidueField,
    bernoulli,
    factor_poly_mod,
    factor_poly_rational,
    ff_pow_is_one,
    is_prime,
    ord_at,
    primes_up_to,
    roots_in_field,
)


def akiyama_tanigawa(n):
    """Independent Bernoulli oracle (second convention, B1 = +1/2)."""
    a = [Fraction(0)] * (n + 1)
    out = []
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return out


class TestBernoulli:
    def test_base_cases(self):
        assert bernoulli(0) == 1
        assert bernoulli(1) == Fraction(-1, 2)

    def test_b12(self):
        assert bernoulli(12) == Fraction(-691, 2730)

    def test_against_akiyama_tanigawa(self):
        # AT gives the B1 = +1/2 convention; even indices agree, B1 flips.
        oracle = akiyama_tanigawa(60)
        for k in range(0, 61):
            expect = -oracle[k] if k == 1 else oracle[k]
            assert bernoulli(k) == expect

    def test_von_staudt_clausen_denominators(self):
        for k in range(2, 41, 2):
            den = 1
            for q in primes_up_to(k + 1):
                if k % (q - 1) == 0:
                    den *= q
            assert bernoulli(k).denominator == den

    def test_negative_rejected(self):
        with pytest.raises(PreconditionError):
            bernoulli(-1)


class TestOrdAt:
    def test_examples(self):
        assert ord_at(Fraction(-691, 16), 691) == 1
        assert ord_at(Fraction(1), 7) == 0
        assert ord_at(Fraction(49, 3), 7) == 2

    def test_zero_rejected(self):
        with pytest.raises(PreconditionError):
            ord_at(Fraction(0), 5)

    @given(
        st.fractions(min_value=-1000, max_value=1000),
        st.fractions(min_value=-1000, max_value=1000),
        st.sampled_from([2, 3, 5, 7, 691]),
    )
    def test_additive_on_products(self, x, y, ell):
        if x == 0 or y == 0:
            return
        assert ord_at(x * y, ell) == ord_at(x, ell) + ord_at(y, ell)


def pm(coeffs, ell):
    return PolyMod(coeffs, ell)


class TestFactorPolyMod:
    def test_split_case(self):
        # x^2 - 5 mod 11: roots 4 and 7
        factors = factor_poly_mod(PolyOverQ([-5, 0, 1]), 11)
        assert sorted(f.coeffs for f, m in factors) == [(4, 1), (7, 1)]
        assert all(m == 1 for _, m in factors)

    def test_inert_case(self):
        factors = factor_poly_mod(PolyOverQ([-5, 0, 1]), 3)
        assert factors == [(pm([1, 0, 1], 3), 1)]

    def test_ramified_case(self):
        factors = factor_poly_mod(PolyOverQ([-5, 0, 1]), 5)
        assert factors == [(pm([0, 1], 5), 2)]

    def test_bad_reduction_rejected(self):
        with pytest.raises(PreconditionError):
            factor_poly_mod(PolyOverQ([1, 0, 5]), 5)
        with pytest.raises(PreconditionError):
            factor_poly_mod(PolyOverQ([Fraction(1, 5), 0, 1]), 5)

    @given(
        st.lists(st.integers(-30, 30), min_size=2, max_size=9),
        st.sampled_from([2, 3, 5, 13, 41, 691]),
    )
    @settings(max_examples=60, deadline=None)
    def test_remultiplication(self, coeffs, ell):
        p = PolyOverQ(coeffs)
        if p.is_zero() or p.leading() % ell == 0:
            return
        factors = factor_poly_mod(p, ell)
        lc = int(p.leading()) % ell
        prod = pm([lc], ell)
        for f, m in factors:
            for _ in range(m):
                prod = prod * f
        assert prod == pm([int(c) for c in p.coeffs], ell)

    def test_mod2_splitting(self):
        # x^2 + x = x(x+1) mod 2; x^2 + x + 1 irreducible
        fs = factor_poly_mod(PolyOverQ([0, 1, 1]), 2)
        assert sorted(f.coeffs for f, _ in fs) == [(0, 1), (1, 1)]
        fs = factor_poly_mod(PolyOverQ([1, 1, 1]), 2)
        assert fs == [(pm([1, 1, 1], 2), 1)]


class TestFactorPolyRational:
    def test_difference_of_squares(self):
        scalar, factors = factor_poly_rational(PolyOverQ([-1, 0, 1]))
        assert scalar == 1
        assert [f.coeffs for f, m in factors] == [
            (Fraction(-1), Fraction(1)),
            (Fraction(1), Fraction(1)),
        ]

    def test_golden_ratio_poly_irreducible(self):
        scalar, factors = factor_poly_rational(PolyOverQ([-1, -1, 1]))
        assert scalar == 1
        assert len(factors) == 1 and factors[0][1] == 1
        assert factors[0][0] == PolyOverQ([-1, -1, 1])

    def test_cubic_with_no_rational_root(self):
        p = PolyOverQ([-98304, -2048, 24, 1])
        scalar, factors = factor_poly_rational(p)
        prod = PolyOverQ([scalar])
        for f, m in factors:
            for _ in range(m):
                prod = prod * f
        assert prod == p
        # cross-check factor count against sympy
        import sympy

        x = sympy.symbols("x")
        _, sfactors = sympy.factor_list(x**3 + 24 * x**2 - 2048 * x - 98304)
        assert len(factors) == len(sfactors)

    def test_repeated_and_scaled(self):
        # 6 * (x-1)^2 * (x^2+1)
        p = PolyOverQ([1, 0, 1]) * PolyOverQ([-1, 1]) * PolyOverQ([-1, 1]) * 6
        scalar, factors = factor_poly_rational(p)
        assert scalar == 6
        assert factors == [
            (PolyOverQ([-1, 1]), 2),
            (PolyOverQ([1, 0, 1]), 1),
        ]

    def test_degree_cap(self):
        with pytest.raises(PreconditionError):
            factor_poly_rational(PolyOverQ([1] + [0] * 12 + [1]))

    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_products_of_small_irreducibles(self, data):
        pool = [
            PolyOverQ([-1, 1]),
            PolyOverQ([2, 1]),
            PolyOverQ([1, 0, 1]),
            PolyOverQ([-2, 0, 1]),
            PolyOverQ([-1, -1, 1]),
            PolyOverQ([1, 1, 0, 1]),
        ]
        picks = data.draw(st.lists(st.sampled_from(pool), min_size=1, max_size=4))
        scale = data.draw(st.sampled_from([1, -3, Fraction(2, 7)]))
        p = PolyOverQ([scale])
        for f in picks:
            p = p * f
        if p.degree > 12:
            return
        scalar, factors = factor_poly_rational(p)
        prod = PolyOverQ([scalar])
        for f, m in factors:
            for _ in range(m):
                prod = prod * f
        assert prod == p
        assert sum(f.degree * m for f, m in factors) == p.degree


class TestResidueField:
    def test_frobenius_is_automorphism(self):
        rng = random.Random(7)
        for ell, f in [(3, 2), (5, 2), (7, 3), (41, 1)]:
            F = ResidueField.create(ell, f)
            for _ in range(200):
                a = F.from_coeffs([rng.randrange(ell) for _ in range(f)])
                b = F.from_coeffs([rng.randrange(ell) for _ in range(f)])
                assert (a + b).frobenius() == a.frobenius() + b.frobenius()
                assert (a * b).frobenius() == a.frobenius() * b.frobenius()
                assert a ** (ell**f) == a

    def test_inverse(self):
        F = ResidueField.create(7, 2)
        for a in F.elements():
            if a.is_zero():
                continue
            assert (a * a.inverse()).is_one()

    def test_reducible_modulus_rejected(self):
        with pytest.raises(PreconditionError):
            ResidueField(5, PolyMod([4, 0, 1], 5))  # x^2 - 1 = (x-1)(x+1)

    def test_order(self):
        assert ResidueField.create(3, 4).order == 81


class TestFFPowIsOne:
    def test_examples(self):
        F41 = ResidueField.create(41, 1)
        assert ff_pow_is_one(2, 4, F41) is False
        assert ff_pow_is_one(2, 20, F41) is True
        assert ff_pow_is_one(17, 0, F41) is True

    def test_zero_base_rejected(self):
        F = ResidueField.create(5, 1)
        with pytest.raises(PreconditionError):
            ff_pow_is_one(10, 3, F)


class TestRootsInField:
    def test_roots_of_split_quadratic(self):
        L = ResidueField.create(11, 1)
        roots = roots_in_field(PolyMod([-5, 0, 1], 11), L)
        assert sorted(r.repr_poly[0] for r in roots) == [4, 7]

    def test_roots_in_extension(self):
        L = ResidueField.create(3, 2)
        roots = roots_in_field(PolyMod([1, 0, 1], 3), L)  # x^2 + 1 splits in F9
        assert len(roots) == 2
        for r in roots:
            assert (r * r + L.one()).is_zero()

    def test_no_roots(self):
        L = ResidueField.create(3, 1)
        assert roots_in_field(PolyMod([1, 0, 1], 3), L) == []


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert is_prime(689) is False  # 13 * 53
    assert is_prime(691) is True
