"""Exact arithmetic substrate: rationals, Bernoulli numbers, polynomials over Q
and over prime fields, finite (residue) fields.

Everything here is exact; no floats. All values are immutable after
construction and all operations are pure, so they are safe to share across
threads (the Bernoulli memo cache carries its own lock).

``ExactRational`` is ``fractions.Fraction``: it already enforces the canonical
form (positive denominator, reduced) that the rest of the package relies on.
"""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from math import comb, gcd, isqrt
from typing import Iterable, Iterator, Sequence

from .errors import PreconditionError

ExactRational = Fraction

__all__ = [
    "ExactRational",
    "PolyOverQ",
    "PolyMod",
    "ResidueField",
    "FFElement",
    "bernoulli",
    "ord_at",
    "factor_poly_mod",
    "factor_poly_rational",
    "ff_pow_is_one",
    "is_prime",
    "primes_up_to",
    "roots_in_field",
]


# ---------------------------------------------------------------------------
# primality / small prime utilities
# ---------------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (valid far beyond 64-bit range)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    """All primes <= n by sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i in range(n + 1) if sieve[i]]


def next_prime(n: int) -> int:
    m = n + 1
    while not is_prime(m):
        m += 1
    return m


# ---------------------------------------------------------------------------
# Bernoulli numbers
# ---------------------------------------------------------------------------

_bernoulli_cache: dict[int, Fraction] = {0: Fraction(1), 1: Fraction(-1, 2)}
_bernoulli_lock = threading.Lock()


def bernoulli(k: int) -> Fraction:
    """B_k with the convention B_1 = -1/2, via the binomial recurrence
    sum_{i=0}^{k} C(k+1, i) B_i = 0, memoised.
    """
    if k < 0:
        raise PreconditionError("bernoulli: k must be >= 0")
    if k % 2 == 1 and k > 1:
        return Fraction(0)
    with _bernoulli_lock:
        if k in _bernoulli_cache:
            return _bernoulli_cache[k]
        top = max(_bernoulli_cache) + 1
        for m in range(top, k + 1):
            if m % 2 == 1:
                _bernoulli_cache[m] = Fraction(0) if m > 1 else Fraction(-1, 2)
                continue
            acc = Fraction(0)
            for i in range(m):
                b = _bernoulli_cache[i]
                if b:
                    acc += comb(m + 1, i) * b
            _bernoulli_cache[m] = -acc / (m + 1)
        return _bernoulli_cache[k]


def ord_at(x: Fraction, ell: int) -> int:
    """ell-adic valuation of a nonzero rational."""
    if x == 0:
        raise PreconditionError("ord_at: valuation of zero is undefined")
    if not is_prime(ell):
        raise PreconditionError(f"ord_at: {ell} is not prime")
    v = 0
    num = abs(x.numerator)
    while num % ell == 0:
        num //= ell
        v += 1
    den = x.denominator
    while den % ell == 0:
        den //= ell
        v -= 1
    return v


# ---------------------------------------------------------------------------
# polynomials over Q
# ---------------------------------------------------------------------------


class PolyOverQ:
    """Dense univariate polynomial over Q, coefficients lowest degree first.

    The zero polynomial has an empty coefficient tuple; otherwise the leading
    coefficient is nonzero. Instances are immutable and hashable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Fraction | int]):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):  # immutability guard
        raise AttributeError("PolyOverQ is immutable")

    # -- basic structure ---------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        if self.is_zero():
            raise PreconditionError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyOverQ) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"PolyOverQ({self})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self[i]
            if c == 0:
                continue
            if i == 0:
                parts.append(f"{c}")
            else:
                xs = "x" if i == 1 else f"x^{i}"
                if c == 1:
                    parts.append(xs)
                elif c == -1:
                    parts.append(f"-{xs}")
                else:
                    parts.append(f"{c}*{xs}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "PolyOverQ") -> "PolyOverQ":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyOverQ([self[i] + other[i] for i in range(n)])

    def __sub__(self, other: "PolyOverQ") -> "PolyOverQ":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyOverQ([self[i] - other[i] for i in range(n)])

    def __neg__(self) -> "PolyOverQ":
        return PolyOverQ([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PolyOverQ([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return PolyOverQ([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolyOverQ(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "PolyOverQ"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        lc = other.leading()
        while len(rem) - 1 >= d and any(rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            shift = len(rem) - 1 - d
            c = rem[-1] / lc
            q[shift] = c
            for i in range(d + 1):
                rem[shift + i] -= c * other.coeffs[i]
        return PolyOverQ(q), PolyOverQ(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other: "PolyOverQ") -> bool:
        return divmod(other, self)[1].is_zero()

    def monic(self) -> "PolyOverQ":
        if self.is_zero():
            return self
        lc = self.leading()
        return self if lc == 1 else self * (1 / lc)

    def derivative(self) -> "PolyOverQ":
        return PolyOverQ([i * c for i, c in enumerate(self.coeffs)][1:])

    def gcd(self, other: "PolyOverQ") -> "PolyOverQ":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def evaluate(self, x: Fraction | int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- integer structure ---------------------------------------------------

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def content_and_primitive(self) -> tuple[Fraction, "PolyOverQ"]:
        """Write self = content * primitive with primitive integral, gcd of
        coefficients 1 and positive leading coefficient."""
        if self.is_zero():
            return Fraction(0), self
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return Fraction(g, den), PolyOverQ([v // g for v in ints])

    # -- resultants ----------------------------------------------------------

    def resultant(self, other: "PolyOverQ") -> Fraction:
        """Res(self, other) via the Sylvester matrix (exact Gaussian
        elimination; fine at the degrees this package supports)."""
        n, m = self.degree, other.degree
        if n < 0 or m < 0:
            return Fraction(0)
        if n == 0:
            return self.coeffs[0] ** m
        if m == 0:
            return other.coeffs[0] ** n
        size = n + m
        rows = []
        for i in range(m):
            row = [Fraction(0)] * size
            for j, c in enumerate(reversed(self.coeffs)):
                row[i + j] = c
            rows.append(row)
        for i in range(n):
            row = [Fraction(0)] * size
            for j, c in enumerate(reversed(other.coeffs)):
                row[i + j] = c
            rows.append(row)
        det = Fraction(1)
        for col in range(size):
            piv = next((r for r in range(col, size) if rows[r][col] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != col:
                rows[col], rows[piv] = rows[piv], rows[col]
                det = -det
            det *= rows[col][col]
            inv = 1 / rows[col][col]
            for r in range(col + 1, size):
                if rows[r][col] == 0:
                    continue
                factor = rows[r][col] * inv
                for c2 in range(col, size):
                    rows[r][c2] -= factor * rows[col][c2]
        return det

    def discriminant(self) -> Fraction:
        n = self.degree
        if n < 1:
            raise PreconditionError("discriminant needs degree >= 1")
        sign = -1 if (n * (n - 1) // 2) % 2 else 1
        return sign * self.resultant(self.derivative()) / self.leading()

    def sort_key(self):
        return (self.degree, self.coeffs)


def poly_x() -> PolyOverQ:
    return PolyOverQ([0, 1])


# ---------------------------------------------------------------------------
# polynomials over Z/ell
# ---------------------------------------------------------------------------


class PolyMod:
    """Dense polynomial over Z/ell (ell prime), coefficients lowest degree
    first, reduced to [0, ell)."""

    __slots__ = ("ell", "coeffs")

    def __init__(self, coeffs: Iterable[int], ell: int):
        cs = [c % ell for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "ell", ell)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("PolyMod is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMod)
            and self.ell == other.ell
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ell, self.coeffs))

    def __repr__(self):
        return f"PolyMod({self}, ell={self.ell})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self[i]
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                xs = "x" if i == 1 else f"x^{i}"
                parts.append(xs if c == 1 else f"{c}*{xs}")
        return " + ".join(parts)

    def __add__(self, other: "PolyMod") -> "PolyMod":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyMod([self[i] + other[i] for i in range(n)], self.ell)

    def __sub__(self, other: "PolyMod") -> "PolyMod":
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyMod([self[i] - other[i] for i in range(n)], self.ell)

    def __mul__(self, other):
        if isinstance(other, int):
            return PolyMod([c * other for c in self.coeffs], self.ell)
        if self.is_zero() or other.is_zero():
            return PolyMod([], self.ell)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = (out[i + j] + a * b) % self.ell
        return PolyMod(out, self.ell)

    __rmul__ = __mul__

    def __divmod__(self, other: "PolyMod"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        ell = self.ell
        rem = list(self.coeffs)
        d = other.degree
        inv_lc = pow(other.coeffs[-1], ell - 2, ell)
        q = [0] * max(0, len(rem) - d)
        while len(rem) - 1 >= d:
            if rem[-1] == 0:
                rem.pop()
                continue
            shift = len(rem) - 1 - d
            c = rem[-1] * inv_lc % ell
            q[shift] = c
            for i in range(d + 1):
                rem[shift + i] = (rem[shift + i] - c * other.coeffs[i]) % ell
            rem.pop()
        return PolyMod(q, ell), PolyMod(rem, ell)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def monic(self) -> "PolyMod":
        if self.is_zero() or self.coeffs[-1] == 1:
            return self
        inv = pow(self.coeffs[-1], self.ell - 2, self.ell)
        return self * inv

    def derivative(self) -> "PolyMod":
        return PolyMod([i * c for i, c in enumerate(self.coeffs)][1:], self.ell)

    def gcd(self, other: "PolyMod") -> "PolyMod":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def pow_mod(self, exp: int, modulus: "PolyMod") -> "PolyMod":
        result = PolyMod([1], self.ell)
        base = self % modulus
        while exp:
            if exp & 1:
                result = result * base % modulus
            base = base * base % modulus
            exp >>= 1
        return result

    def evaluate(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.ell
        return acc

    def sort_key(self):
        return (self.degree, self.coeffs)

    def to_poly_over_q(self) -> PolyOverQ:
        return PolyOverQ(list(self.coeffs))


def _pm_x(ell: int) -> PolyMod:
    return PolyMod([0, 1], ell)


def _pth_root(f: PolyMod) -> PolyMod:
    """For f = g(x^ell) over F_ell, return g (Frobenius is the identity on
    the prime field, so the coefficients transfer unchanged)."""
    ell = f.ell
    return PolyMod([f[i] for i in range(0, f.degree + 1, ell)], ell)


def _squarefree_decomposition_mod(f: PolyMod) -> list[tuple[PolyMod, int]]:
    """Monic f over F_ell as a product prod g_i^i with the g_i squarefree and
    pairwise coprime. Char-p aware (handles ell-th power parts)."""
    ell = f.ell
    if f.degree <= 0:
        return []
    out: list[tuple[PolyMod, int]] = []
    fd = f.derivative()
    if fd.is_zero():
        return [(g, e * ell) for g, e in _squarefree_decomposition_mod(_pth_root(f))]
    t = f.gcd(fd)
    v = f // t
    i = 1
    while v.degree > 0:
        w = t.gcd(v)
        h = v // w
        if h.degree > 0:
            out.append((h.monic(), i))
        v = w
        t = t // w
        i += 1
    if t.degree > 0:
        for g, e in _squarefree_decomposition_mod(_pth_root(t)):
            out.append((g, e * ell))
    out.sort(key=lambda ge: (ge[1],) + ge[0].sort_key())
    return out


def _distinct_degree(f: PolyMod) -> list[tuple[PolyMod, int]]:
    """Split squarefree monic f into products of irreducibles of equal degree;
    returns (product, degree) pairs."""
    ell = f.ell
    out = []
    h = _pm_x(ell)
    g = f
    d = 0
    while g.degree > 2 * (d + 1) - 1 and g.degree > 0:
        d += 1
        h = h.pow_mod(ell, g)
        gd = g.gcd(h - _pm_x(ell))
        if gd.degree > 0:
            out.append((gd, d))
            g = g // gd
            h = h % g
    if g.degree > 0:
        out.append((g, g.degree))
    return out


def _all_monic_polys(ell: int, degree: int) -> Iterator[PolyMod]:
    for tail in itertools.product(range(ell), repeat=degree):
        yield PolyMod(list(tail) + [1], ell)


def _equal_degree_split(f: PolyMod, d: int) -> list[PolyMod]:
    """Cantor-Zassenhaus with a deterministic candidate sequence; f is a
    squarefree monic product of irreducibles all of degree d."""
    ell = f.ell
    if f.degree == d:
        return [f]
    if ell == 2:
        # tiny field: trial division by enumerated monic irreducibles
        out = []
        g = f
        for cand in _all_monic_polys(2, d):
            if g.degree < d:
                break
            if not _is_irreducible(cand):
                continue
            q, r = divmod(g, cand)
            if r.is_zero():
                out.append(cand)
                g = q
        if g.degree > 0:
            out.append(g)
        return out
    q = ell**d
    half = (q - 1) // 2
    for counter in itertools.count():
        # deterministic "random" polynomials: x + c, then c2*x^2 + x + c
        if counter < ell:
            a = PolyMod([counter, 1], ell)
        else:
            c = counter % ell
            c2 = 1 + (counter // ell) % (ell - 1)
            a = PolyMod([c, 1, c2], ell)
        b = a.pow_mod(half, f) - PolyMod([1], ell)
        g1 = f.gcd(b)
        if 0 < g1.degree < f.degree:
            return _equal_degree_split(g1, d) + _equal_degree_split(f // g1, d)


def factor_poly_mod(p: PolyOverQ, ell: int) -> list[tuple[PolyMod, int]]:
    """Factor p mod ell into monic irreducibles with multiplicity, sorted
    canonically (degree, then coefficient tuple).

    Requires every coefficient denominator coprime to ell and no degree drop
    (the leading coefficient must not reduce to zero).
    """
    if not is_prime(ell):
        raise PreconditionError(f"factor_poly_mod: {ell} is not prime")
    if p.is_zero():
        raise PreconditionError("factor_poly_mod: zero polynomial")
    coeffs = []
    for c in p.coeffs:
        if c.denominator % ell == 0:
            raise PreconditionError(
                f"factor_poly_mod: coefficient {c} is not integral at {ell}"
            )
        coeffs.append(c.numerator * pow(c.denominator, ell - 2, ell) % ell)
    f = PolyMod(coeffs, ell)
    if f.degree != p.degree:
        raise PreconditionError(
            f"factor_poly_mod: bad reduction, degree drops mod {ell}"
        )
    f = f.monic()
    out: list[tuple[PolyMod, int]] = []
    for part, mult in _squarefree_decomposition_mod(f):
        for prod, d in _distinct_degree(part):
            for irr in _equal_degree_split(prod, d):
                out.append((irr.monic(), mult))
    out.sort(key=lambda fm: fm[0].sort_key())
    return out


# ---------------------------------------------------------------------------
# factorization over Q (big-prime Zassenhaus, supported degree <= 12)
# ---------------------------------------------------------------------------

MAX_FACTOR_DEGREE = 12


def _yun_squarefree(f: PolyOverQ) -> list[tuple[PolyOverQ, int]]:
    """Yun's squarefree decomposition over Q: f monic = prod a_i^i."""
    out = []
    g = f.gcd(f.derivative())
    if g.degree == 0:
        return [(f.monic(), 1)]
    c = f // g
    d = f.derivative() // g - c.derivative()
    i = 1
    while True:
        a = c.gcd(d)
        if a.degree > 0:
            out.append((a.monic(), i))
        c2 = c // a
        d = d // a - c2.derivative()
        c = c2
        i += 1
        if c.degree == 0:
            break
    return out


def _symmetric_lift(f: PolyMod) -> PolyOverQ:
    ell = f.ell
    return PolyOverQ([c - ell if c > ell // 2 else c for c in f.coeffs])


def _norm2_sq(f: PolyOverQ) -> int:
    return sum(int(c) ** 2 for c in f.coeffs)


def _factor_squarefree_integer(g: PolyOverQ) -> list[PolyOverQ]:
    """Irreducible integer factors of a primitive squarefree integer
    polynomial, via factorization modulo one large prime and subset
    recombination with the Mignotte coefficient bound."""
    if g.degree == 1:
        return [g]
    lc = int(g.leading())
    # Mignotte: any factor of g (over Z, with the lc multiplied in) has
    # coefficients bounded by 2^n * |g|_2 * |lc|
    bound = (1 << g.degree) * isqrt(_norm2_sq(g) + 1) * abs(lc) + 1
    ell = max(2 * bound, 100)
    while True:
        ell = next_prime(ell)
        if lc % ell == 0:
            continue
        modular = factor_poly_mod(g, ell)
        if all(m == 1 for _, m in modular):
            break
    pool = [f for f, _ in modular]
    found: list[PolyOverQ] = []
    current = g
    size = 1
    while pool and 2 * size <= len(pool):
        hit = False
        for subset in itertools.combinations(range(len(pool)), size):
            prod = PolyMod([int(current.leading())], ell)
            for i in subset:
                prod = prod * pool[i]
            cand = _symmetric_lift(prod)
            _, cand = cand.content_and_primitive()
            q, r = divmod(current, cand)
            if r.is_zero() and q.is_integral():
                found.append(cand)
                current = q
                pool = [f for i, f in enumerate(pool) if i not in subset]
                hit = True
                break
        if not hit:
            size += 1
    if current.degree > 0:
        found.append(current.content_and_primitive()[1])
    return found


def factor_poly_rational(
    p: PolyOverQ,
) -> tuple[Fraction, list[tuple[PolyOverQ, int]]]:
    """Complete factorization over Q: returns (scalar, factors) with the
    factors monic irreducible and scalar * prod(factor^mult) == p exactly.

    Degrees above 12 are rejected; the small-degree strategy (squarefree
    decomposition, one good big prime, subset recombination) stays exact and
    fast in that range. Factors are sorted by (degree, coefficients).
    """
    if p.is_zero():
        raise PreconditionError("factor_poly_rational: zero polynomial")
    if p.degree > MAX_FACTOR_DEGREE:
        raise PreconditionError(
            f"factor_poly_rational: degree {p.degree} exceeds supported "
            f"bound {MAX_FACTOR_DEGREE}"
        )
    scalar = p.leading()
    work = p.monic()
    factors: list[tuple[PolyOverQ, int]] = []
    # pull off x^v
    v = 0
    while work.degree > 0 and work[0] == 0:
        work = PolyOverQ(work.coeffs[1:])
        v += 1
    if v:
        factors.append((poly_x(), v))
    if work.degree > 0:
        for part, mult in _yun_squarefree(work):
            _, prim = part.content_and_primitive()
            for irr in _factor_squarefree_integer(prim):
                factors.append((irr.monic(), mult))
    factors.sort(key=lambda fm: fm[0].sort_key())
    return scalar, factors


# ---------------------------------------------------------------------------
# residue fields F_{ell^f}
# ---------------------------------------------------------------------------


class ResidueField:
    """F_{ell^f} presented as F_ell[x]/(modulus), modulus monic irreducible of
    degree f."""

    __slots__ = ("ell", "f", "modulus")

    def __init__(self, ell: int, modulus: PolyMod, check: bool = True):
        if not is_prime(ell):
            raise PreconditionError(f"ResidueField: {ell} is not prime")
        if modulus.ell != ell or modulus.degree < 1:
            raise PreconditionError("ResidueField: bad modulus")
        modulus = modulus.monic()
        if check and not _is_irreducible(modulus):
            raise PreconditionError(
                f"ResidueField: modulus {modulus} is reducible mod {ell}"
            )
        object.__setattr__(self, "ell", ell)
        object.__setattr__(self, "f", modulus.degree)
        object.__setattr__(self, "modulus", modulus)

    def __setattr__(self, *a):
        raise AttributeError("ResidueField is immutable")

    @classmethod
    def create(cls, ell: int, f: int) -> "ResidueField":
        """Canonical field with ell^f elements: the lexicographically first
        monic irreducible of degree f."""
        if f == 1:
            return cls(ell, _pm_x(ell), check=False)
        for cand in _all_monic_polys(ell, f):
            if _is_irreducible(cand):
                return cls(ell, cand, check=False)
        raise RuntimeError("unreachable: irreducible polynomials exist")

    @property
    def order(self) -> int:
        return self.ell**self.f

    def __eq__(self, other):
        return (
            isinstance(other, ResidueField)
            and self.ell == other.ell
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.ell, self.modulus))

    def __repr__(self):
        if self.f == 1:
            return f"F_{self.ell}"
        return f"F_{self.ell}^{self.f}(mod {self.modulus})"

    def zero(self) -> "FFElement":
        return FFElement(self, PolyMod([], self.ell))

    def one(self) -> "FFElement":
        return FFElement(self, PolyMod([1], self.ell))

    def from_int(self, n: int) -> "FFElement":
        return FFElement(self, PolyMod([n], self.ell))

    def from_coeffs(self, coeffs: Sequence[int]) -> "FFElement":
        return FFElement(self, PolyMod(coeffs, self.ell))

    def generator(self) -> "FFElement":
        """The class of x (a root of the modulus)."""
        return FFElement(self, _pm_x(self.ell) % self.modulus)

    def elements(self) -> Iterator["FFElement"]:
        """Enumerate all elements (for desk-scale brute force only)."""
        for tup in itertools.product(range(self.ell), repeat=self.f):
            yield FFElement(self, PolyMod(list(tup), self.ell))


def _is_irreducible(f: PolyMod) -> bool:
    """Rabin irreducibility test."""
    ell, n = f.ell, f.degree
    if n == 1:
        return True
    x = _pm_x(ell)
    h = x.pow_mod(ell**n, f)
    if h != x % f:
        return False
    # for each prime divisor r of n, gcd(x^(ell^(n/r)) - x, f) must be 1
    r = 2
    nn = n
    seen = set()
    while r * r <= nn:
        if nn % r == 0:
            seen.add(r)
            while nn % r == 0:
                nn //= r
        r += 1
    if nn > 1:
        seen.add(nn)
    for r in seen:
        h = x.pow_mod(ell ** (n // r), f)
        if f.gcd(h - x).degree != 0:
            return False
    return True


class FFElement:
    """Element of a ResidueField, represented by its reduced polynomial."""

    __slots__ = ("field", "repr_poly")

    def __init__(self, field: ResidueField, poly: PolyMod):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "repr_poly", poly % field.modulus)

    def __setattr__(self, *a):
        raise AttributeError("FFElement is immutable")

    def key(self) -> tuple:
        return self.repr_poly.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, FFElement)
            and self.field == other.field
            and self.repr_poly == other.repr_poly
        )

    def __hash__(self):
        return hash((self.field, self.repr_poly))

    def __repr__(self):
        return f"({self.repr_poly} in {self.field})"

    def is_zero(self) -> bool:
        return self.repr_poly.is_zero()

    def is_one(self) -> bool:
        return self.repr_poly.coeffs == (1,)

    def _check(self, other: "FFElement"):
        if self.field != other.field:
            raise PreconditionError("FFElement: mixed fields")

    def __add__(self, other):
        self._check(other)
        return FFElement(self.field, self.repr_poly + other.repr_poly)

    def __sub__(self, other):
        self._check(other)
        return FFElement(self.field, self.repr_poly - other.repr_poly)

    def __neg__(self):
        return FFElement(self.field, self.repr_poly * (self.field.ell - 1))

    def __mul__(self, other):
        if isinstance(other, int):
            return FFElement(self.field, self.repr_poly * other)
        self._check(other)
        return FFElement(self.field, self.repr_poly * other.repr_poly)

    __rmul__ = __mul__

    def __pow__(self, exp: int):
        if exp < 0:
            return self.inverse() ** (-exp)
        return FFElement(self.field, self.repr_poly.pow_mod(exp, self.field.modulus))

    def inverse(self) -> "FFElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in residue field")
        # extended Euclid against the modulus
        ell = self.field.ell
        a, b = self.field.modulus, self.repr_poly
        s0, s1 = PolyMod([], ell), PolyMod([1], ell)
        while not b.is_zero():
            q, r = divmod(a, b)
            a, b = b, r
            s0, s1 = s1, s0 - q * s1
        inv_lc = pow(a.coeffs[0], ell - 2, ell)
        return FFElement(self.field, s0 * inv_lc)

    def __truediv__(self, other: "FFElement") -> "FFElement":
        return self * other.inverse()

    def frobenius(self) -> "FFElement":
        return self ** self.field.ell

    def minpoly_prime_field(self) -> PolyMod:
        """Minimal polynomial over F_ell, as a monic PolyMod."""
        conjugates = []
        cur = self
        while True:
            conjugates.append(cur)
            cur = cur.frobenius()
            if cur == self:
                break
        # expand prod (y - conj) with coefficients in the big field
        coeffs = [self.field.one()]
        for c in conjugates:
            nxt = [self.field.zero()] * (len(coeffs) + 1)
            for i, a in enumerate(coeffs):
                nxt[i + 1] = nxt[i + 1] + a
                nxt[i] = nxt[i] - a * c
            coeffs = nxt
        ints = []
        for a in coeffs:
            if a.repr_poly.degree > 0:
                raise RuntimeError("minimal polynomial has non-prime-field coefficient")
            ints.append(a.repr_poly[0])
        return PolyMod(ints, self.field.ell)


def ff_pow_is_one(
    base: int, exp: int, F: ResidueField, embed: FFElement | None = None
) -> bool:
    """True iff base^exp = 1 in F. exp = 0 counts as the empty product."""
    x = embed if embed is not None else F.from_int(base)
    if x.is_zero():
        raise PreconditionError(f"ff_pow_is_one: {base} reduces to zero in {F!r}")
    if exp == 0:
        return True
    if exp < 0:
        raise PreconditionError("ff_pow_is_one: exponent must be nonnegative")
    return (x**exp).is_one()


# ---------------------------------------------------------------------------
# polynomials with coefficients in a residue field (embedding plumbing)
# ---------------------------------------------------------------------------


def _ffpoly_trim(cs: list[FFElement]) -> list[FFElement]:
    while cs and cs[-1].is_zero():
        cs.pop()
    return cs


def _ffpoly_sub(a: list[FFElement], b: list[FFElement], L: ResidueField):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else L.zero()
        y = b[i] if i < len(b) else L.zero()
        out.append(x - y)
    return _ffpoly_trim(out)


def _ffpoly_mul(a: list[FFElement], b: list[FFElement], L: ResidueField):
    if not a or not b:
        return []
    out = [L.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _ffpoly_trim(out)

def _ffpoly_divmod(a: list[FFElement], b: list[FFElement], L: ResidueField):
    rem = list(a)
    d = len(b) - 1
    inv = b[-1].inverse()
    q = [L.zero()] * max(0, len(rem) - d)
    while len(rem) - 1 >= d and rem:
        if rem[-1].is_zero():
            rem.pop()
            continue
        shift = len(rem) - 1 - d
        c = rem[-1] * inv
        q[shift] = c
        for i in range(d + 1):
            rem[shift + i] = rem[shift + i] - c * b[i]
        rem.pop()
    return _ffpoly_trim(q), _ffpoly_trim(rem)


def _ffpoly_gcd(a: list[FFElement], b: list[FFElement], L: ResidueField):
    while b:
        a, b = b, _ffpoly_divmod(a, b, L)[1]
    if a:
        inv = a[-1].inverse()
        a = [c * inv for c in a]
    return a


def _ffpoly_powmod(a, exp: int, mod, L: ResidueField):
    result = [L.one()]
    base = _ffpoly_divmod(a, mod, L)[1]
    while exp:
        if exp & 1:
            result = _ffpoly_divmod(_ffpoly_mul(result, base, L), mod, L)[1]
        base = _ffpoly_divmod(_ffpoly_mul(base, base, L), mod, L)[1]
        exp >>= 1
    return result


def roots_in_field(m: PolyMod, L: ResidueField) -> list[FFElement]:
    """All roots in L of a squarefree polynomial m over F_ell (deterministic
    order). Used to realise embeddings F_{ell^d} -> L for d | L.f."""
    if m.ell != L.ell:
        raise PreconditionError("roots_in_field: characteristic mismatch")
    lifted = [L.from_int(c) for c in m.coeffs]
    x = [L.zero(), L.one()]
    # restrict to the part splitting in L
    xq = _ffpoly_powmod(x, L.order, lifted, L)
    lin = _ffpoly_gcd(_ffpoly_sub(xq, x, L), lifted, L)
    roots: list[FFElement] = []

    def split(g: list[FFElement]):
        if len(g) <= 1:
            return
        if len(g) - 1 == 1:
            roots.append(L.zero() - g[0] * g[1].inverse())
            return
        if L.ell == 2:
            for cand in L.elements():
                if not _ffpoly_divmod(g, [L.zero() - cand, L.one()], L)[1]:
                    roots.append(cand)
            return
        half = (L.order - 1) // 2
        for counter in itertools.count():
            shift = _shift_element(L, counter)
            b = _ffpoly_powmod([shift, L.one()], half, g, L)
            b = _ffpoly_sub(b, [L.one()], L)
            g1 = _ffpoly_gcd(b, g, L)
            if 0 < len(g1) - 1 < len(g) - 1:
                split(g1)
                split(_ffpoly_divmod(g, g1, L)[0])
                return

    split(lin)
    roots.sort(key=lambda r: r.key())
    return roots


def _shift_element(L: ResidueField, counter: int) -> FFElement:
    """Deterministic enumeration of field elements used as CZ shifts."""
    coeffs = []
    n = counter
    for _ in range(L.f):
        coeffs.append(n % L.ell)
        n //= L.ell
    return L.from_coeffs(coeffs)
