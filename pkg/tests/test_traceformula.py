"""Tests for Hurwitz class numbers and the trace formula."""

import random
from fractions import Fraction

import pytest

from paracong.errors import PreconditionError
from paracong.exactmath import primes_up_to
from paracong.modforms import dim_cusp_forms_level1, eigenforms_level1
from paracong.traceformula import (
    build_hurwitz_table,
    charpoly_tq_new,
    class_number_weighted,
    eigen_systems_new,
    gegenbauer_weight,
    hurwitz,
    trace_tm,
    trace_tm_new,
)


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def dim_gamma0_classical(k, p):
    """Independent dimension oracle for S_k(Gamma_0(p)), even k >= 4, from the
    genus of X_0(p) and its elliptic point counts."""
    genus = {2: 0, 3: 0, 5: 0, 7: 0, 11: 1, 13: 0}[p]
    if p == 2:
        e2, e3 = 1, 0
    elif p == 3:
        e2, e3 = 0, 1
    else:
        e2 = 1 + legendre(-1, p)
        e3 = 1 + legendre(-3, p)
    return (k - 1) * (genus - 1) + (k // 4) * e2 + (k // 3) * e3 + (k // 2 - 1) * 2


class TestHurwitz:
    def test_small_values(self):
        assert hurwitz(3) == Fraction(1, 3)
        assert hurwitz(4) == Fraction(1, 2)
        assert hurwitz(0) == Fraction(-1, 12)
        assert hurwitz(7) == 1
        assert hurwitz(12) == Fraction(4, 3)
        assert hurwitz(16) == Fraction(3, 2)
        assert hurwitz(23) == 3

    def test_vanishing_residues(self):
        for n in (1, 2, 5, 6, 9, 10):
            assert hurwitz(n) == 0

    def test_twelve_times_integral(self):
        for n in range(0, 200):
            assert (12 * hurwitz(n)).denominator == 1

    def test_table_matches_pointwise(self):
        table = build_hurwitz_table(300)
        for n in range(0, 301):
            assert table[n] == hurwitz(n)

    def test_hurwitz_kronecker_relation(self):
        # sum_{t^2 <= 4n} H(4n - t^2) = sum_{d | n} max(d, n/d), n <= 100
        table = build_hurwitz_table(400)
        for n in range(1, 101):
            lhs = Fraction(0)
            t = 0
            while t * t <= 4 * n:
                lhs += table[4 * n - t * t]
                if t > 0:
                    lhs += table[4 * n - t * t]
                t += 1
            rhs = sum(max(d, n // d) for d in range(1, n + 1) if n % d == 0)
            assert lhs == rhs, f"failed at n={n}"

    def test_class_number_weighted(self):
        assert class_number_weighted(-3) == Fraction(1, 3)
        assert class_number_weighted(-4) == Fraction(1, 2)
        assert class_number_weighted(-23) == 3
        # H(n) = sum over f of h_w(-n/f^2)
        for n in (12, 16, 36, 75, 100):
            acc = Fraction(0)
            f = 1
            while f * f <= n:
                if n % (f * f) == 0 and (-n // (f * f)) % 4 in (0, 1):
                    acc += class_number_weighted(-n // (f * f))
                f += 1
            assert acc == hurwitz(n)


class TestGegenbauer:
    def test_recurrence_values(self):
        # coefficient of x^10 in 1/(1 - 2x + 2x^2)
        assert gegenbauer_weight(12, 2, 2) == 32
        assert gegenbauer_weight(12, 0, 1) == -1
        assert gegenbauer_weight(4, 2, 1) == 3

    def test_symmetry(self):
        for k in (4, 8, 12):
            for t in range(-4, 5):
                sign = (-1) ** k  # P_{k-2}(-t) = (-1)^{k-2} P_{k-2}(t)
                assert gegenbauer_weight(k, -t, 3) == sign * gegenbauer_weight(k, t, 3)


class TestTraceLevel1:
    def test_dimension_weight12(self):
        assert trace_tm(12, 1, 1) == 1

    def test_tau2(self):
        assert trace_tm(12, 1, 2) == -24

    def test_weight16_t2(self):
        assert trace_tm(16, 1, 2) == 216

    def test_dimensions_match_formula(self):
        for k in range(4, 41, 2):
            assert trace_tm(k, 1, 1) == dim_cusp_forms_level1(k)

    def test_eigenvalue_sums_cross_module(self):
        for k in range(12, 29, 2):
            d = dim_cusp_forms_level1(k)
            orbits = eigenforms_level1(k, 21 * (d + 1) + 1)
            for m in range(1, 21):
                total = Fraction(0)
                for ctx, coeffs in orbits:
                    # trace of a_m over the orbit: sum of conjugates
                    poly = coeffs[m].as_poly()
                    tr = Fraction(0)
                    # sum over conjugates = sum of poly evaluated at roots;
                    # use power sums of the minimal polynomial
                    psums = _root_power_sums(ctx.minpoly, poly.degree)
                    for i in range(poly.degree + 1):
                        tr += poly[i] * psums[i]
                    total += tr
                assert trace_tm(k, 1, m) == total, (k, m)


def _root_power_sums(minpoly, upto):
    """Power sums of the roots of a monic polynomial, via Newton."""
    d = minpoly.degree
    e = [(-1) ** i * minpoly[d - i] for i in range(d + 1)]  # elementary symm
    p = [Fraction(d)]
    for i in range(1, upto + 1):
        acc = Fraction(0)
        for r in range(1, min(i - 1, d) + 1):
            acc += (-1) ** (r - 1) * e[r] * p[i - r]
        if i <= d:
            acc += (-1) ** (i - 1) * i * e[i]
        p.append(acc)
    return p


class TestTraceLevelP:
    def test_dimensions_against_classical_formula(self):
        for p in (2, 3, 5, 7, 11, 13):
            for k in range(4, 29, 2):
                assert trace_tm(k, p, 1) == dim_gamma0_classical(k, p), (k, p)

    def test_gcd_rejected(self):
        with pytest.raises(PreconditionError):
            trace_tm(12, 2, 4)

    def test_bad_level_rejected(self):
        with pytest.raises(PreconditionError):
            trace_tm(12, 6, 5)

    def test_odd_weight_rejected(self):
        with pytest.raises(PreconditionError):
            trace_tm(11, 1, 1)

    def test_new_trace_definition(self):
        rng = random.Random(3)
        for _ in range(20):
            k = rng.choice(range(4, 25, 2))
            p = rng.choice([2, 3, 5, 7])
            m = rng.choice([m for m in range(1, 15) if m % p])
            assert trace_tm_new(k, p, m) == trace_tm(k, p, m) - 2 * trace_tm(k, 1, m)

    def test_new_dimension_nonneg(self):
        for p in (2, 3, 5, 7):
            for k in range(4, 29, 2):
                assert trace_tm_new(k, p, 1) >= 0

    def test_weight12_level2_new_dimension(self):
        # S_12(Gamma_0(2)) is 2-dimensional and all old
        assert trace_tm(12, 2, 1) == 2
        assert trace_tm_new(12, 2, 1) == 0

    def test_one_dimensional_new_space_multiplicativity(self):
        # dim S_8^new(Gamma_0(2)) = dim S_8^new(Gamma_0(3)) = 1, so traces are
        # eigenvalues and must be multiplicative across coprime indices
        for p in (2, 3):
            assert trace_tm_new(8, p, 1) == 1
            qs = [q for q in (5, 7, 11, 13) if q != p]
            for i in range(len(qs)):
                for j in range(i + 1, len(qs)):
                    assert trace_tm_new(8, p, qs[i] * qs[j]) == trace_tm_new(
                        8, p, qs[i]
                    ) * trace_tm_new(8, p, qs[j])

    def test_one_dimensional_new_space_prime_power(self):
        for p in (2, 3):
            for q in (5, 7):
                aq = trace_tm_new(8, p, q)
                assert trace_tm_new(8, p, q * q) == aq * aq - q**7


class TestCharpolyNew:
    def test_zero_dimensional(self):
        cp = charpoly_tq_new(12, 2, 3)
        assert cp.poly.coeffs == (Fraction(1),)

    def test_degree_one(self):
        cp = charpoly_tq_new(8, 2, 3)
        assert cp.poly.degree == 1
        assert cp.poly[0] == -trace_tm_new(8, 2, 3)

    def test_power_sum_round_trip(self):
        for (k, p, q) in [(22, 2, 3), (16, 3, 2), (20, 2, 3)]:
            cp = charpoly_tq_new(k, p, q)
            d = cp.poly.degree
            if d == 0:
                continue
            psums = _root_power_sums(cp.poly, d)
            from paracong.traceformula import _power_sums_new

            expected = _power_sums_new(k, p, q, d)
            assert psums[: d + 1] == expected

    def test_integer_coefficients(self):
        for (k, p, q) in [(22, 2, 3), (24, 2, 3), (18, 5, 2)]:
            cp = charpoly_tq_new(k, p, q)
            assert cp.poly.is_integral()

    def test_deligne_bound(self):
        import math

        for (k, p, q) in [(22, 2, 3), (16, 3, 2), (24, 2, 5)]:
            cp = charpoly_tq_new(k, p, q)
            if cp.poly.degree == 0:
                continue
            bound = 2 * q ** ((k - 1) / 2)
            for root in _real_roots(cp.poly):
                assert abs(root) <= bound + 1e-6 * q ** ((k - 1) / 2)


def _real_roots(poly):
    import mpmath

    coeffs = [float(c) for c in reversed(poly.coeffs)]
    roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=80)
    return [float(r.real) for r in roots]


class TestEigenSystemsNew:
    def test_weight8_level2(self):
        systems = eigen_systems_new(8, 2, [3, 5, 7])
        assert len(systems) == 1
        sys = systems[0]
        assert sys.ctx.degree == 1
        for q in (3, 5, 7):
            assert sys.get(q) == sys.ctx.from_rational(trace_tm_new(8, 2, q))

    def test_weight22_level2_orbits(self):
        systems = eigen_systems_new(22, 2, [3, 5])
        assert sum(s.ctx.degree for s in systems) == int(trace_tm_new(22, 2, 1))
        # eigenvalue sums must reproduce new-space traces
        for q in (3, 5):
            total = Fraction(0)
            for s in systems:
                poly = s.get(q).as_poly()
                psums = _root_power_sums(s.ctx.minpoly, max(poly.degree, 0))
                total += sum(poly[i] * psums[i] for i in range(poly.degree + 1))
            assert total == trace_tm_new(22, 2, q)

    def test_multiplicativity_within_orbit(self):
        # a_{q0}^2 - q0^{k-1} = a_{q0^2}: check through the charpoly of T_q at
        # a 2-dimensional new space
        systems = eigen_systems_new(22, 2, [3, 5, 7, 11])
        for s in systems:
            cp = charpoly_tq_new(22, 2, 3).poly
            a3 = s.get(3)
            acc = s.ctx.zero()
            for i in range(cp.degree, -1, -1):
                acc = acc * a3 + s.ctx.from_rational(cp[i])
            assert acc.is_zero()
