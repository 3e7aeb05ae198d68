"""Coefficient fields Q[x]/(m(x)), primes above a rational prime ell, and
reduction of field elements into residue fields.

The compositum of two coefficient fields is never constructed. Whether two
residues agree "mod some prime of the compositum" is decided by
``residue_match``: the images under all embeddings into a common finite field
coincide exactly when the two elements share their minimal polynomial over
the prime field, which is what gets compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import PreconditionError
from .exactmath import (
    FFElement,
    PolyMod,
    PolyOverQ,
    ResidueField,
    factor_poly_mod,
    factor_poly_rational,
    is_prime,
)

__all__ = [
    "NumberFieldCtx",
    "NFElement",
    "PrimeIdealData",
    "primes_above",
    "reduce_mod",
    "residue_match",
]


class NumberFieldCtx:
    """The field Q[x]/(minpoly), minpoly monic irreducible with integer
    coefficients. Degree-1 contexts (minpoly x) model Q itself."""

    __slots__ = ("minpoly", "degree")

    def __init__(self, minpoly: PolyOverQ):
        if minpoly.degree < 1:
            raise PreconditionError("NumberFieldCtx: minpoly must be nonconstant")
        if minpoly.leading() != 1:
            raise PreconditionError("NumberFieldCtx: minpoly must be monic")
        if not minpoly.is_integral():
            raise PreconditionError("NumberFieldCtx: minpoly must have integer coefficients")
        _, factors = factor_poly_rational(minpoly)
        if len(factors) != 1 or factors[0][1] != 1:
            raise PreconditionError(f"NumberFieldCtx: {minpoly} is reducible over Q")
        object.__setattr__(self, "minpoly", minpoly)
        object.__setattr__(self, "degree", minpoly.degree)

    def __setattr__(self, *a):
        raise AttributeError("NumberFieldCtx is immutable")

    def __eq__(self, other):
        return isinstance(other, NumberFieldCtx) and self.minpoly == other.minpoly

    def __hash__(self):
        return hash(self.minpoly)

    def __repr__(self):
        return f"Q[x]/({self.minpoly})"

    @classmethod
    def rational(cls) -> "NumberFieldCtx":
        return cls(PolyOverQ([0, 1]))

    def zero(self) -> "NFElement":
        return NFElement(self, [0] * self.degree)

    def one(self) -> "NFElement":
        return self.from_rational(1)

    def from_rational(self, c: Fraction | int) -> "NFElement":
        return NFElement(self, [Fraction(c)] + [Fraction(0)] * (self.degree - 1))

    def generator(self) -> "NFElement":
        """The class of x (a root of minpoly). For degree 1 this is the
        rational root, i.e. 0 for minpoly x."""
        if self.degree == 1:
            return self.from_rational(-self.minpoly[0])
        return NFElement(self, [0, 1] + [0] * (self.degree - 2))


class NFElement:
    """Element of a NumberFieldCtx in the power basis of the minpoly root."""

    __slots__ = ("ctx", "coords")

    def __init__(self, ctx: NumberFieldCtx, coords: Sequence[Fraction | int]):
        coords = [Fraction(c) for c in coords]
        if len(coords) != ctx.degree:
            raise PreconditionError(
                f"NFElement: expected {ctx.degree} coordinates, got {len(coords)}"
            )
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coords", tuple(coords))

    def __setattr__(self, *a):
        raise AttributeError("NFElement is immutable")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ctx.from_rational(other)
        return (
            isinstance(other, NFElement)
            and self.ctx == other.ctx
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.ctx, self.coords))

    def __repr__(self):
        return f"NF[{', '.join(str(c) for c in self.coords)}]"

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def as_poly(self) -> PolyOverQ:
        return PolyOverQ(self.coords)

    def _coerce(self, other) -> "NFElement":
        if isinstance(other, (int, Fraction)):
            return self.ctx.from_rational(other)
        if not isinstance(other, NFElement) or other.ctx != self.ctx:
            raise PreconditionError("NFElement: mixed field contexts")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return NFElement(self.ctx, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return NFElement(self.ctx, [a - b for a, b in zip(self.coords, other.coords)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return NFElement(self.ctx, [-a for a in self.coords])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NFElement(self.ctx, [a * other for a in self.coords])
        other = self._coerce(other)
        prod = self.as_poly() * other.as_poly()
        rem = prod % self.ctx.minpoly
        return NFElement(self.ctx, [rem[i] for i in range(self.ctx.degree)])

    __rmul__ = __mul__

    def __pow__(self, exp: int):
        if exp < 0:
            return self.inverse() ** (-exp)
        result = self.ctx.one()
        base = self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def inverse(self) -> "NFElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        a, b = self.ctx.minpoly, self.as_poly()
        s0, s1 = PolyOverQ([]), PolyOverQ([1])
        while not b.is_zero():
            q, r = divmod(a, b)
            a, b = b, r
            s0, s1 = s1, s0 - q * s1
        # a is a nonzero constant gcd
        inv = s0 * (1 / a.coeffs[0])
        rem = inv % self.ctx.minpoly
        return NFElement(self.ctx, [rem[i] for i in range(self.ctx.degree)])

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def norm(self) -> Fraction:
        """Field norm: product of the images under all embeddings."""
        if self.is_zero():
            return Fraction(0)
        return self.ctx.minpoly.resultant(self.as_poly())


@dataclass(frozen=True)
class PrimeIdealData:
    """One prime above ell, read off an irreducible factor of the minpoly mod
    ell: e is the factor's multiplicity, f its degree.

    ``heuristic_warning`` is set when the minpoly is not squarefree mod ell
    and ell^2 divides its discriminant; in that case the order Z[theta] may
    be non-maximal at ell and e/f are heuristics, not certified invariants.
    """

    ell: int
    factor: PolyMod
    e: int
    f: int
    residue: ResidueField
    heuristic_warning: bool = False

    def __repr__(self):
        tag = ", heuristic" if self.heuristic_warning else ""
        return f"Prime(ell={self.ell}, factor={self.factor}, e={self.e}, f={self.f}{tag})"


def primes_above(ctx: NumberFieldCtx, ell: int) -> list[PrimeIdealData]:
    """Primes above ell from the factorization of the minpoly mod ell; one
    entry per irreducible factor, in canonical factor order."""
    if not is_prime(ell):
        raise PreconditionError(f"primes_above: {ell} is not prime")
    factors = factor_poly_mod(ctx.minpoly, ell)
    warn = False
    if any(m > 1 for _, m in factors):
        disc = ctx.minpoly.discriminant()
        if disc == 0 or (disc.numerator % (ell * ell) == 0):
            warn = True
    out = []
    for f, mult in factors:
        out.append(
            PrimeIdealData(
                ell=ell,
                factor=f,
                e=mult,
                f=f.degree,
                residue=ResidueField(ell, f, check=False),
                heuristic_warning=warn,
            )
        )
    assert sum(p.e * p.f for p in out) == ctx.degree
    return out


def reduce_mod(a: NFElement, P: PrimeIdealData) -> FFElement:
    """Image of a in the residue field of P (coordinates evaluated at the
    root class of P.factor). Every coordinate must be integral at ell."""
    ell = P.ell
    coeffs = []
    for c in a.coords:
        if c.denominator % ell == 0:
            raise PreconditionError(
                f"reduce_mod: coordinate {c} is not integral at {ell}"
            )
        coeffs.append(c.numerator * pow(c.denominator, ell - 2, ell) % ell)
    return FFElement(P.residue, PolyMod(coeffs, ell))


def residue_match(a: FFElement, b: FFElement) -> bool:
    """True iff a and b have a common image under some pair of embeddings of
    their residue fields into F_{ell^lcm}.

    The images of a under all embeddings are exactly the roots of its minimal
    polynomial over F_ell, so the embedding search reduces to comparing
    minimal polynomials; Frobenius conjugates on either side do not change
    the answer.
    """
    if a.field.ell != b.field.ell:
        raise PreconditionError("residue_match: different residue characteristics")
    return a.minpoly_prime_field() == b.minpoly_prime_field()
