"""Eichler-Selberg trace formula for T_m on S_k(Gamma_0(N)), trivial
character, gcd(m, N) = 1, even k >= 4, N either 1 or prime.

The elliptic term is weighted by class numbers of binary quadratic forms,
obtained here by direct enumeration of reduced forms. The new-subspace trace
at prime level is Tr(Gamma_0(p)) - 2 Tr(SL_2(Z)), and characteristic
polynomials of Hecke operators on the new space are assembled from power
sums via Newton's identities.

Conventions: H(0) = -1/12; P_k(t, m) is the coefficient of x^{k-2} in
1/(1 - t x + m x^2), computed by the integer recurrence
P_{w+1} = t P_w - m P_{w-1}.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

from .errors import PreconditionError
from .exactmath import PolyOverQ, factor_poly_rational, is_prime
from .modforms import EigenSystem
from .numberfield import NFElement, NumberFieldCtx

__all__ = [
    "HurwitzTable",
    "NewSpaceCharPoly",
    "hurwitz",
    "build_hurwitz_table",
    "class_number_weighted",
    "trace_tm",
    "trace_tm_new",
    "charpoly_tq_new",
    "eigen_systems_new",
    "gegenbauer_weight",
]

MAX_NEWSPACE_DIM = 12


# ---------------------------------------------------------------------------
# class numbers
# ---------------------------------------------------------------------------


def _form_weight(a: int, b: int, c: int) -> Fraction:
    # forms proportional to x^2+xy+y^2 and x^2+y^2 carry the extra
    # automorphisms; every other reduced form counts once
    if a == b == c:
        return Fraction(1, 3)
    if b == 0 and a == c:
        return Fraction(1, 2)
    return Fraction(1)


def _reduced_forms(n: int, primitive_only: bool):
    """Reduced positive forms (a, b, c) of discriminant -n: -a < b <= a <= c
    with b >= 0 when a == c; one representative per class."""
    amax = isqrt(n // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            num = b * b + n
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if primitive_only and gcd(gcd(a, abs(b)), c) != 1:
                continue
            yield a, b, c


def hurwitz(n: int) -> Fraction:
    """Hurwitz class number H(n): weighted count of all (not necessarily
    primitive) reduced forms of discriminant -n; H(0) = -1/12 and H(n) = 0
    for n = 1, 2 mod 4."""
    if n < 0:
        raise PreconditionError("hurwitz: n must be >= 0")
    if n == 0:
        return Fraction(-1, 12)
    if n % 4 in (1, 2):
        return Fraction(0)
    return sum((_form_weight(*f) for f in _reduced_forms(n, False)), Fraction(0))


_hw_cache: dict[int, Fraction] = {}
_hw_lock = threading.Lock()


def class_number_weighted(D: int) -> Fraction:
    """h_w(D) for D < 0, D = 0, 1 mod 4: primitive classes, weighted 1/3 at
    D = -3 and 1/2 at D = -4."""
    if D >= 0 or D % 4 not in (0, 1):
        raise PreconditionError(f"class_number_weighted: bad discriminant {D}")
    with _hw_lock:
        if D in _hw_cache:
            return _hw_cache[D]
    val = sum((_form_weight(*f) for f in _reduced_forms(-D, True)), Fraction(0))
    with _hw_lock:
        _hw_cache[D] = val
    return val


@dataclass(frozen=True)
class HurwitzTable:
    """H(0..maxn), built once by a single sweep over reduced forms."""

    maxn: int
    values: tuple[Fraction, ...]

    def __getitem__(self, n: int) -> Fraction:
        if not 0 <= n <= self.maxn:
            raise PreconditionError(f"HurwitzTable: {n} out of range")
        return self.values[n]


def build_hurwitz_table(maxn: int) -> HurwitzTable:
    vals = [Fraction(0)] * (maxn + 1)
    vals[0] = Fraction(-1, 12)
    a = 1
    while 3 * a * a <= maxn:
        for b in range(-a + 1, a + 1):
            start = a
            c = start
            while True:
                n = 4 * a * c - b * b
                if n > maxn:
                    break
                if not (a == c and b < 0):
                    vals[n] += _form_weight(a, b, c)
                c += 1
        a += 1
    return HurwitzTable(maxn, tuple(vals))


# ---------------------------------------------------------------------------
# trace formula
# ---------------------------------------------------------------------------


def gegenbauer_weight(k: int, t: int, m: int) -> int:
    """P_k(t, m): coefficient of x^{k-2} in 1/(1 - t x + m x^2)."""
    if k < 2:
        raise PreconditionError("gegenbauer_weight: k >= 2")
    prev, cur = 1, t  # P_0, P_1
    if k == 2:
        return prev
    for _ in range(k - 3):
        prev, cur = cur, t * cur - m * prev
    return cur


def _psi(N: int) -> int:
    if N == 1:
        return 1
    return N + 1  # prime N only


def _check_level(N: int):
    if N != 1 and not is_prime(N):
        raise PreconditionError(
            f"trace formula: level {N} unsupported (need 1 or a prime)"
        )


def _count_roots(t: int, m: int, modulus: int) -> int:
    return sum(1 for x in range(modulus) if (x * x - t * x + m) % modulus == 0)


def _mu(t: int, f: int, N: int, m: int) -> Fraction:
    """Local weight of the class h_w((t^2-4m)/f^2) in the elliptic term at
    prime level N: the number of fixed level structures.

    For N coprime to the conductor f this is the root count of
    x^2 - t x + m mod N. When N^rho || f (rho >= 1) the order is non-maximal
    at N and the count becomes psi(N) times the number of classes
    x mod N^rho solving the congruence mod N^{2 rho}; that solution set is a
    union of classes mod N^rho, so the quotient below is exact.
    """
    if N == 1:
        return Fraction(1)
    rho = 0
    ff = f
    while ff % N == 0:
        ff //= N
        rho += 1
    if rho == 0:
        return Fraction(_count_roots(t, m, N))
    count = _count_roots(t, m, N ** (2 * rho))
    val = Fraction(_psi(N) * count, N**rho)
    assert val.denominator == 1
    return val


def trace_tm(k: int, N: int, m: int) -> Fraction:
    """Trace of T_m on S_k(Gamma_0(N)), exact (an integer in practice)."""
    if k < 4 or k % 2:
        raise PreconditionError("trace_tm: weight must be even and >= 4")
    if m < 1:
        raise PreconditionError("trace_tm: m must be positive")
    _check_level(N)
    if gcd(m, N) != 1:
        raise PreconditionError(
            "trace_tm: not implemented for m sharing factors with N"
        )
    # identity term, for square m
    r = isqrt(m)
    a1 = Fraction(0)
    if r * r == m:
        a1 = Fraction((k - 1) * _psi(N), 12) * m ** (k // 2 - 1)
    # elliptic term, over t with t^2 < 4m
    a2 = Fraction(0)
    tmax = isqrt(4 * m - 1)
    for t in range(-tmax, tmax + 1):
        disc = t * t - 4 * m
        inner = Fraction(0)
        f = 1
        while f * f <= -disc:
            if (-disc) % (f * f) == 0:
                D = disc // (f * f)
                if D % 4 in (0, 1):
                    inner += class_number_weighted(D) * _mu(t, f, N, m)
            f += 1
        if inner:
            a2 += gegenbauer_weight(k, t, m) * inner
    a2 /= 2
    # hyperbolic term
    a3 = Fraction(0)
    mult = 1 if N == 1 else 2
    for d in range(1, r + 1):
        if m % d == 0:
            term = Fraction(d ** (k - 1) * mult)
            if d * d == m:
                term /= 2
            a3 += term
    total = a1 - a2 - a3
    assert total.denominator == 1, "trace must be integral"
    return total


def trace_tm_new(k: int, p: int, m: int) -> Fraction:
    """Trace of T_m on the new subspace of S_k(Gamma_0(p)): the old part is
    two copies of level 1."""
    if not is_prime(p):
        raise PreconditionError(f"trace_tm_new: level {p} must be prime")
    return trace_tm(k, p, m) - 2 * trace_tm(k, 1, m)


# ---------------------------------------------------------------------------
# characteristic polynomials on the new space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NewSpaceCharPoly:
    """Characteristic polynomial of T_q on S_k^new(Gamma_0(p)), monic with
    integer coefficients."""

    weight: int
    level: int
    hecke_prime: int
    poly: PolyOverQ


def _power_basis_vectors(q: int, k: int, imax: int) -> list[list[int]]:
    """Expansion of T_q^i in the basis {T_{q^j}}: row i holds the
    coefficients c_{ij} with T_q^i = sum_j c_{ij} T_{q^j}."""
    rows = [[1]]
    qk = q ** (k - 1)
    for _ in range(imax):
        cur = rows[-1]
        nxt = [0] * (len(cur) + 1)
        for j, cj in enumerate(cur):
            if cj == 0:
                continue
            nxt[j + 1] += cj
            if j >= 1:
                nxt[j - 1] += qk * cj
        rows.append(nxt)
    return rows


def _power_sums_new(k: int, p: int, q: int, imax: int) -> list[Fraction]:
    """Tr((T_q)^i) on the new space for i = 0..imax."""
    rows = _power_basis_vectors(q, k, imax)
    jmax = imax
    tr_prime_powers = [trace_tm_new(k, p, q**j) if j else None for j in range(jmax + 1)]
    dim = trace_tm_new(k, p, 1)
    tr_prime_powers[0] = dim
    out = []
    for i in range(imax + 1):
        s = Fraction(0)
        for j, cj in enumerate(rows[i]):
            if cj:
                s += cj * tr_prime_powers[j]
        out.append(s)
    return out


def _newton_charpoly(power_sums: Sequence[Fraction], d: int) -> PolyOverQ:
    """Monic degree-d polynomial from power sums s_1..s_d via Newton's
    identities."""
    e = [Fraction(1)]
    for i in range(1, d + 1):
        acc = Fraction(0)
        for r in range(1, i + 1):
            acc += (-1) ** (r - 1) * e[i - r] * power_sums[r]
        e.append(acc / i)
    coeffs = [(-1) ** i * e[i] for i in range(d + 1)]
    return PolyOverQ(list(reversed(coeffs)))


def charpoly_tq_new(k: int, p: int, q: int) -> NewSpaceCharPoly:
    """Characteristic polynomial of T_q on S_k^new(Gamma_0(p)); supported up
    to new-space dimension 12."""
    if not is_prime(q) or q == p:
        raise PreconditionError("charpoly_tq_new: q must be a prime different from p")
    dim = trace_tm_new(k, p, 1)
    assert dim.denominator == 1 and dim >= 0
    d = int(dim)
    if d > MAX_NEWSPACE_DIM:
        raise PreconditionError(
            f"charpoly_tq_new: new-space dimension {d} exceeds supported bound "
            f"{MAX_NEWSPACE_DIM}"
        )
    if d == 0:
        return NewSpaceCharPoly(k, p, q, PolyOverQ([1]))
    sums = _power_sums_new(k, p, q, d)
    poly = _newton_charpoly(sums, d)
    if not poly.is_integral():
        raise RuntimeError(f"charpoly_tq_new: non-integral coefficients in {poly}")
    return NewSpaceCharPoly(k, p, q, poly)


# ---------------------------------------------------------------------------
# eigen-systems on the new space, from traces alone
# ---------------------------------------------------------------------------


def _solve_linear(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(mat)
    M = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise PreconditionError("moment matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def eigen_systems_new(k: int, p: int, primes: Sequence[int]) -> list[EigenSystem]:
    """Eigen-systems on S_k^new(Gamma_0(p)), one per Galois orbit, with
    eigenvalues at the requested primes (p itself is skipped: T_p is not in
    the coprime Hecke algebra handled here).

    Eigenvalues a_q are recovered as polynomials in a primitive eigenvalue
    a_{q0} by solving the moment system built from traces of T_{q0}^i T_q.
    """
    if not is_prime(p):
        raise PreconditionError(f"eigen_systems_new: {p} must be prime")
    dim = int(trace_tm_new(k, p, 1))
    if dim == 0:
        return []
    if dim > MAX_NEWSPACE_DIM:
        raise PreconditionError(f"new-space dimension {dim} exceeds supported bound")
    wanted = [q for q in primes if q != p]
    # primitive prime: smallest q0 with squarefree characteristic polynomial
    q0 = None
    cp = None
    cand = 2
    while q0 is None:
        if cand != p and is_prime(cand):
            poly = charpoly_tq_new(k, p, cand).poly
            if poly.gcd(poly.derivative()).degree == 0:
                q0, cp = cand, poly
                break
        cand += 1
        if cand > 100:
            raise PreconditionError("no separating Hecke prime below 100")
    sums = _power_sums_new(k, p, q0, max(2 * dim - 2, dim))
    moment = [[sums[i + j] for j in range(dim)] for i in range(dim)]
    # polynomial expressing a_q through a_{q0}, for each requested prime
    value_polys: dict[int, PolyOverQ] = {q0: PolyOverQ([0, 1])}
    rows = _power_basis_vectors(q0, k, dim - 1)
    for q in wanted:
        if q in value_polys:
            continue
        rhs = []
        for i in range(dim):
            acc = Fraction(0)
            for j, cj in enumerate(rows[i]):
                if cj:
                    acc += cj * trace_tm_new(k, p, q0**j * q)
            rhs.append(acc)
        u = _solve_linear(moment, rhs)
        value_polys[q] = PolyOverQ(u)
    _, factors = factor_poly_rational(cp)
    out = []
    for minpoly, mult in factors:
        assert mult == 1
        ctx = NumberFieldCtx(minpoly)
        theta = ctx.generator()
        values = {}
        for q in wanted:
            poly = value_polys[q]
            acc = ctx.zero()
            for i in range(poly.degree, -1, -1):
                acc = acc * theta + ctx.from_rational(poly[i])
            values[q] = acc
        out.append(EigenSystem(weight=k, level=p, ctx=ctx, values=values))
    assert sum(s.ctx.degree for s in out) == dim
    return out
