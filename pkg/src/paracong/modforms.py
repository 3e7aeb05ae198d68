"""Level-1 modular forms with exact q-expansions.

Eisenstein series, the discriminant form, the echelonized (Victor Miller)
basis of the cusp space, Hecke operators on truncated q-series, and the
extraction of Hecke eigen-systems, one per Galois orbit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import PreconditionError
from .exactmath import PolyOverQ, bernoulli, factor_poly_rational
from .numberfield import NFElement, NumberFieldCtx

__all__ = [
    "QExpansion",
    "EigenSystem",
    "eisenstein",
    "delta",
    "miller_basis",
    "hecke_op",
    "eigen_systems_level1",
    "eigenforms_level1",
    "dim_cusp_forms_level1",
]


class QExpansion:
    """Truncated q-series with exact rational coefficients, indices
    0 .. prec-1. Binary operations truncate to the smaller precision."""

    __slots__ = ("weight", "level", "prec", "coeffs")

    def __init__(self, weight: int, level: int, coeffs: Sequence[Fraction | int]):
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in coeffs))
        object.__setattr__(self, "prec", len(self.coeffs))
        if self.prec < 1:
            raise PreconditionError("QExpansion: empty coefficient list")

    def __setattr__(self, *a):
        raise AttributeError("QExpansion is immutable")

    def __getitem__(self, n: int) -> Fraction:
        if not 0 <= n < self.prec:
            raise PreconditionError(f"coefficient {n} beyond precision {self.prec}")
        return self.coeffs[n]

    def truncate(self, prec: int) -> "QExpansion":
        if prec > self.prec:
            raise PreconditionError("cannot extend precision")
        return QExpansion(self.weight, self.level, self.coeffs[:prec])

    def __eq__(self, other):
        return (
            isinstance(other, QExpansion)
            and self.weight == other.weight
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.weight, self.coeffs))

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return f"QExpansion(weight={self.weight}, prec={self.prec}, [{head}, ...])"

    def __add__(self, other: "QExpansion") -> "QExpansion":
        p = min(self.prec, other.prec)
        if self.weight != other.weight:
            raise PreconditionError("adding forms of different weights")
        return QExpansion(
            self.weight,
            max(self.level, other.level),
            [self.coeffs[i] + other.coeffs[i] for i in range(p)],
        )

    def __sub__(self, other: "QExpansion") -> "QExpansion":
        p = min(self.prec, other.prec)
        if self.weight != other.weight:
            raise PreconditionError("subtracting forms of different weights")
        return QExpansion(
            self.weight,
            max(self.level, other.level),
            [self.coeffs[i] - other.coeffs[i] for i in range(p)],
        )

    def scale(self, c: Fraction | int) -> "QExpansion":
        return QExpansion(self.weight, self.level, [a * c for a in self.coeffs])

    def __mul__(self, other: "QExpansion") -> "QExpansion":
        p = min(self.prec, other.prec)
        out = _convolve(self.coeffs, other.coeffs, p)
        return QExpansion(self.weight + other.weight, max(self.level, other.level), out)

    def pow(self, n: int) -> "QExpansion":
        if n < 0:
            raise PreconditionError("negative powers not supported")
        result = QExpansion(0, self.level, [1] + [0] * (self.prec - 1))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result


def _convolve(a, b, prec):
    """Truncated product; integer coefficients take a fast path."""
    if all(x.denominator == 1 for x in a) and all(x.denominator == 1 for x in b):
        ai = [x.numerator for x in a]
        bi = [x.numerator for x in b]
        out = [0] * prec
        for i, x in enumerate(ai[:prec]):
            if x == 0:
                continue
            top = min(prec - i, len(bi))
            for j in range(top):
                out[i + j] += x * bi[j]
        return out
    out = [Fraction(0)] * prec
    for i, x in enumerate(a[:prec]):
        if x == 0:
            continue
        top = min(prec - i, len(b))
        for j in range(top):
            out[i + j] += x * b[j]
    return out


def _sigma(n: int, power: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**power
            if d != n // d:
                total += (n // d) ** power
        d += 1
    return total


def eisenstein(k: int, prec: int) -> QExpansion:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, exact."""
    if k % 2 != 0 or k < 4:
        raise PreconditionError("eisenstein: weight must be even and >= 4")
    if prec < 1:
        raise PreconditionError("eisenstein: prec must be positive")
    factor = Fraction(-2 * k) / bernoulli(k)
    coeffs = [Fraction(1)] + [factor * _sigma(n, k - 1) for n in range(1, prec)]
    return QExpansion(k, 1, coeffs)


def delta(prec: int) -> QExpansion:
    """The discriminant form q prod (1-q^n)^24, truncated; integer
    coefficients. Uses the pentagonal number expansion of the eta product."""
    if prec < 2:
        raise PreconditionError("delta: prec must be >= 2")
    eta = [0] * prec
    eta[0] = 1
    j = 1
    while True:
        g1 = j * (3 * j - 1) // 2
        g2 = j * (3 * j + 1) // 2
        if g1 >= prec and g2 >= prec:
            break
        sign = -1 if j % 2 else 1
        if g1 < prec:
            eta[g1] += sign
        if g2 < prec:
            eta[g2] += sign
        j += 1
    eta_series = QExpansion(0, 1, eta)
    e24 = eta_series.pow(24)
    coeffs = [Fraction(0)] + list(e24.coeffs[: prec - 1])
    return QExpansion(12, 1, coeffs)


def dim_modular_forms_level1(k: int) -> int:
    if k < 0 or k % 2 == 1:
        return 0
    return k // 12 + (0 if k % 12 == 2 else 1)


def dim_cusp_forms_level1(k: int) -> int:
    if k < 4:
        return 0
    return max(0, dim_modular_forms_level1(k) - 1)


def _weight_filler(m: int, prec: int) -> QExpansion:
    """A weight-m form with constant term 1 built from E4 and E6 (m even,
    m = 0 or m >= 4)."""
    if m == 0:
        return QExpansion(0, 1, [1] + [0] * (prec - 1))
    assert m >= 4, "weight-2 filler cannot occur for even k"
    b = 0 if m % 4 == 0 else 1
    a = (m - 6 * b) // 4
    out = QExpansion(0, 1, [1] + [0] * (prec - 1))
    if a:
        out = out * eisenstein(4, prec).pow(a)
    if b:
        out = out * eisenstein(6, prec).pow(b)
    return QExpansion(m, 1, out.coeffs)


def miller_basis(k: int, prec: int) -> list[QExpansion]:
    """Echelon basis {g_i} of the weight-k cusp space: g_i = q^i + O(q^{d+1})
    where d is the dimension. Empty below weight 12."""
    if k % 2 != 0:
        raise PreconditionError("miller_basis: weight must be even")
    d = dim_cusp_forms_level1(k)
    if d == 0:
        return []
    if prec <= d:
        raise PreconditionError(
            f"miller_basis: insufficient precision {prec} for dimension {d}"
        )
    dlt = delta(prec)
    rows = []
    power = QExpansion(0, 1, [1] + [0] * (prec - 1))
    for i in range(1, d + 1):
        power = power * dlt
        rows.append(power * _weight_filler(k - 12 * i, prec))
    # echelonize: clear coefficients q^{i+1}..q^d of row i
    basis: list[QExpansion | None] = [None] * (d + 1)
    for i in range(d, 0, -1):
        g = rows[i - 1]
        for j in range(i + 1, d + 1):
            c = g[j]
            if c != 0:
                g = g - basis[j].scale(c)
        basis[i] = g
    out = [basis[i] for i in range(1, d + 1)]
    for i, g in enumerate(out, start=1):
        assert g[i] == 1 and all(g[j] == 0 for j in range(1, i))
    return out


def hecke_op(g: QExpansion, m: int) -> QExpansion:
    """T_m acting on a level-1 q-expansion:
    b_n = sum_{d | gcd(m, n)} d^{k-1} a_{mn/d^2}, at precision floor(prec/m)."""
    if g.level != 1:
        raise PreconditionError("hecke_op: level 1 only")
    if m < 1:
        raise PreconditionError("hecke_op: m must be positive")
    out_prec = g.prec // m
    if out_prec < 2:
        raise PreconditionError(
            f"hecke_op: precision {g.prec} too small for T_{m}"
        )
    k = g.weight
    coeffs = []
    for n in range(out_prec):
        total = Fraction(0)
        divisors = _divisors(m if n == 0 else gcd(m, n))
        for dd in divisors:
            total += dd ** (k - 1) * g[m * n // (dd * dd)]
        coeffs.append(total)
    return QExpansion(k, 1, coeffs)


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


# ---------------------------------------------------------------------------
# eigen-system extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenSystem:
    """Hecke eigenvalues of one Galois orbit: a map prime -> a_q with values
    in the orbit's coefficient field. ``role`` distinguishes elliptic input
    from ingested genus-2 data."""

    weight: int
    level: int
    ctx: NumberFieldCtx
    values: dict[int, NFElement] = field(compare=False)
    normalized: bool = True
    role: str = "elliptic"

    def primes(self) -> list[int]:
        return sorted(self.values)

    def get(self, q: int) -> NFElement:
        if q not in self.values:
            raise PreconditionError(f"eigenvalue at q={q} not available")
        return self.values[q]

    def covers(self, qs) -> bool:
        return all(q in self.values for q in qs)

    def with_value(self, q: int, a: NFElement) -> "EigenSystem":
        vals = dict(self.values)
        vals[q] = a
        return EigenSystem(self.weight, self.level, self.ctx, vals, self.normalized, self.role)


def _hecke_matrix(basis: list[QExpansion], m: int) -> list[list[Fraction]]:
    """Matrix of T_m on the echelon basis, acting on row coordinate vectors:
    coords(T_m g_i)_j = (T_m g_i)[q^j]."""
    d = len(basis)
    rows = []
    for g in basis:
        tg = hecke_op(g, m)
        if tg.prec <= d:
            raise PreconditionError(
                f"hecke matrix: T_{m} output precision {tg.prec} <= dim {d}"
            )
        rows.append([tg[j] for j in range(1, d + 1)])
    return rows


def _mat_mul(a, b):
    n, mid, m = len(a), len(b), len(b[0])
    return [
        [sum(a[i][t] * b[t][j] for t in range(mid)) for j in range(m)]
        for i in range(n)
    ]


def _charpoly(mat: list[list[Fraction]]) -> PolyOverQ:
    """Characteristic polynomial (monic, variable x) by Faddeev-LeVerrier."""
    n = len(mat)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    coeffs = [Fraction(1)]  # x^n downward
    N = ident
    for i in range(1, n + 1):
        MN = _mat_mul(mat, N)
        c = -sum(MN[t][t] for t in range(n)) / i
        coeffs.append(c)
        N = [[MN[r][s] + (c if r == s else 0) for s in range(n)] for r in range(n)]
    return PolyOverQ(list(reversed(coeffs)))


def _nullspace_vector(A: list[list[NFElement]], ctx: NumberFieldCtx) -> list[NFElement]:
    """One nonzero kernel vector of a singular square matrix over the field."""
    n = len(A)
    M = [row[:] for row in A]
    pivots = {}
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if not M[i][c].is_zero()), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(n):
            if i != r and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots[c] = r
        r += 1
    free = next(c for c in range(n) if c not in pivots)
    v = [ctx.zero()] * n
    v[free] = ctx.one()
    for c, row in pivots.items():
        v[c] = -M[row][free]
    return v


def _separating_operator(basis: list[QExpansion]):
    """Matrix of T_2, falling back to T_2 + c T_3 until the characteristic
    polynomial is squarefree. Returns (matrix, charpoly, description)."""
    m2 = _hecke_matrix(basis, 2)
    cp = _charpoly(m2)
    if cp.gcd(cp.derivative()).degree == 0:
        return m2, cp, "T_2"
    m3 = _hecke_matrix(basis, 3)
    d = len(basis)
    for c in range(1, 200):
        mat = [
            [m2[i][j] + c * m3[i][j] for j in range(d)]
            for i in range(d)
        ]
        cp = _charpoly(mat)
        if cp.gcd(cp.derivative()).degree == 0:
            return mat, cp, f"T_2 + {c}*T_3"
    raise PreconditionError("no separating Hecke combination found")


def eigenforms_level1(k: int, prec: int):
    """Eigenforms of weight k as (ctx, coefficient list) pairs, one per
    Galois orbit, coefficients a_0..a_{prec-1} as field elements with
    a_1 = 1. Orbits are sorted by their minimal polynomials."""
    d = dim_cusp_forms_level1(k)
    if d == 0:
        return []
    basis = miller_basis(k, prec)
    mat, cp, _ = _separating_operator(basis)
    assert cp.is_integral(), "Hecke characteristic polynomial must be integral"
    _, factors = factor_poly_rational(cp)
    out = []
    for minpoly, mult in factors:
        if mult != 1:
            raise PreconditionError("T_2 does not separate; extend to T_3")
        ctx = NumberFieldCtx(minpoly)
        theta = ctx.generator()
        # left eigenvector: v (M - theta I) = 0, i.e. (M^T - theta I) v = 0
        A = [
            [
                ctx.from_rational(mat[j][i]) - (theta if i == j else ctx.zero())
                for j in range(d)
            ]
            for i in range(d)
        ]
        v = _nullspace_vector(A, ctx)
        if v[0].is_zero():
            raise PreconditionError("eigenvector has vanishing first coefficient")
        inv = v[0].inverse()
        v = [x * inv for x in v]
        coeffs = []
        for n in range(prec):
            acc = ctx.zero()
            for i, g in enumerate(basis):
                c = g[n]
                if c != 0:
                    acc = acc + v[i] * c
            coeffs.append(acc)
        out.append((ctx, coeffs))
    assert sum(ctx.degree for ctx, _ in out) == d
    return out


def eigen_systems_level1(k: int, primes: Sequence[int], prec: int) -> list[EigenSystem]:
    """One EigenSystem per Galois orbit of the weight-k cusp space, with
    eigenvalues at the requested primes.

    Precision policy: prec >= max(primes) * (dim + 1) + 1, enforced, so that
    every requested eigenvalue (and the Hecke matrices behind it) fits inside
    the computed series.
    """
    d = dim_cusp_forms_level1(k)
    if d == 0:
        return []
    qmax = max(primes) if primes else 2
    needed = qmax * (d + 1) + 1
    if prec < needed:
        raise PreconditionError(
            f"eigen_systems_level1: prec {prec} below policy minimum {needed}"
        )
    out = []
    for ctx, coeffs in eigenforms_level1(k, prec):
        values = {q: coeffs[q] for q in primes}
        out.append(EigenSystem(weight=k, level=1, ctx=ctx, values=values))
    return out
