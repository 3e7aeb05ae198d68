"""Numerical completed L-functions of elliptic eigenforms and the exact
divisibility criteria attached to them.

The completed value Lambda(f, s) = N^{s/2} (2 pi)^{-s} Gamma(s) L(f, s) is
evaluated by the incomplete-gamma bisected series

    Lambda(s) = N^{s/2}     sum a_n (2 pi n)^{-s}     Gamma(s,   2 pi n t0)
              + eps N^{(k-s)/2} sum a_n (2 pi n)^{s-k} Gamma(k-s, 2 pi n / (N t0))

with eps = (-1)^{k/2} w the functional-equation sign (w the Fricke/Atkin-
Lehner eigenvalue, +1 at level 1). The split point t0 = scale/sqrt(N) is a
free parameter: values computed at two different splits agree only when the
coefficients and the sign are correct, which is how the sign of a prime-level
system is resolved and how the series is validated.

Critical integers keep the incomplete gamma elementary:
Gamma(s, x) = (s-1)! e^{-x} sum_{i<s} x^i / i! for integer s >= 1.

Everything exact in this module (zeta numerators, Euler factors) avoids
floats entirely; sympy performs the integer factorizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp
import sympy

from .errors import PreconditionError, ReconstructionError
from .exactmath import bernoulli, is_prime, ord_at, primes_up_to
from .modforms import EigenSystem
from .numberfield import NFElement, primes_above, reduce_mod

__all__ = [
    "CompletedLValue",
    "RatioReport",
    "lambda_value",
    "atkin_lehner_sign",
    "functional_equation_sign",
    "resolve_prime_level_ap",
    "split_invariance_residual",
    "ratio_rationalize",
    "candidate_congruence_primes",
    "zeta_sigma_primes",
    "local_euler_divisor",
    "prime_level_system",
    "series_cutoff",
]

_GUARD_DPS = 15


# ---------------------------------------------------------------------------
# coefficient tables
# ---------------------------------------------------------------------------


def _real_embeddings(ctx) -> list[mp.mpf]:
    """Real roots of the minimal polynomial at the working precision,
    sorted ascending. Hecke eigenvalue fields here are totally real."""
    if ctx.degree == 1:
        return [mp.mpf(Fraction(-ctx.minpoly[0]).numerator) / mp.mpf(Fraction(-ctx.minpoly[0]).denominator)]
    coeffs = [mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in reversed(ctx.minpoly.coeffs)]
    roots = mp.polyroots(coeffs, maxsteps=500, extraprec=mp.mp.prec)
    out = []
    for r in roots:
        if abs(mp.im(r)) > mp.mpf(10) ** (-mp.mp.dps + 10):
            raise PreconditionError("complex embedding found; field not totally real")
        out.append(mp.re(r))
    return sorted(out)


def _embed(value: NFElement, root: mp.mpf) -> mp.mpf:
    acc = mp.mpf(0)
    for c in reversed(value.coords):
        acc = acc * root + mp.mpf(c.numerator) / mp.mpf(c.denominator)
    return acc


def _coefficient_table(sys: EigenSystem, nmax: int, root: mp.mpf) -> list[mp.mpf]:
    """a_1..a_nmax as reals under the given embedding, extended
    multiplicatively with the weight-(k-1) Hecke recursion at good primes and
    a_{p^e} = a_p^e at the level prime."""
    k, N = sys.weight, sys.level
    needed = [q for q in primes_up_to(nmax)]
    missing = [q for q in needed if q not in sys.values]
    if missing:
        raise PreconditionError(
            f"insufficient coefficients: need eigenvalues up to n_max = {nmax}, "
            f"missing primes {missing[:8]}"
        )
    a = [mp.mpf(0)] * (nmax + 1)
    a[1] = mp.mpf(1)
    spf = list(range(nmax + 1))  # smallest prime factor sieve
    q = 2
    while q * q <= nmax:
        if spf[q] == q:
            for mult in range(q * q, nmax + 1, q):
                if spf[mult] == mult:
                    spf[mult] = q
        q += 1
    for n in range(2, nmax + 1):
        q = spf[n]
        if q == n:  # n prime
            a[n] = _embed(sys.get(n), root)
            continue
        e = 0
        m = n
        while m % q == 0:
            m //= q
            e += 1
        if m > 1:
            a[n] = a[q**e] * a[m]
        else:
            # prime power q^e, e >= 2
            if N % q == 0:
                a[n] = a[q] ** e
            else:
                a[n] = a[q] * a[q ** (e - 1)] - q ** (k - 1) * a[q ** (e - 2)]
    return a


# ---------------------------------------------------------------------------
# incomplete gamma and the bisected series
# ---------------------------------------------------------------------------


def _upper_gamma_int(s: int, x: mp.mpf) -> mp.mpf:
    """Gamma(s, x) for integer s >= 1: (s-1)! e^{-x} sum_{i<s} x^i/i!.
    All terms positive, no cancellation."""
    if s < 1:
        raise PreconditionError("integer incomplete gamma needs s >= 1")
    acc = mp.mpf(1)
    term = mp.mpf(1)
    for i in range(1, s):
        term = term * x / i
        acc += term
    return mp.factorial(s - 1) * mp.e ** (-x) * acc


def series_cutoff(digits: int, level: int, t0_scale: float = 1.0) -> int:
    """Terms needed so the tail of the bisected series is below the target:
    decay rate 2 pi min(t0, 1/(N t0)) with t0 = scale/sqrt(N)."""
    t0 = t0_scale / math.sqrt(level)
    rate = 2 * math.pi * min(t0, 1.0 / (level * t0))
    return math.ceil(digits * math.log(10) / rate) + 50


def atkin_lehner_sign(sys: EigenSystem) -> int:
    """Atkin-Lehner eigenvalue w_p of a prime-level newform, read off
    a_p = -w_p p^{k/2-1}."""
    p, k = sys.level, sys.weight
    if not is_prime(p):
        raise PreconditionError("atkin_lehner_sign: level must be prime")
    ap = sys.get(p)
    unit = p ** (k // 2 - 1)
    if ap == sys.ctx.from_rational(-unit):
        return 1
    if ap == sys.ctx.from_rational(unit):
        return -1
    raise PreconditionError(
        f"a_p = {ap} is not a prime-level newform datum (expected +-{unit})"
    )


def functional_equation_sign(sys: EigenSystem) -> int:
    """eps = (-1)^{k/2} w: the sign in Lambda(s) = eps Lambda(k-s)."""
    k = sys.weight
    base = -1 if (k // 2) % 2 else 1
    if sys.level == 1:
        return base
    return base * atkin_lehner_sign(sys)


@dataclass(frozen=True)
class CompletedLValue:
    weight: int
    level: int
    s: int
    value: mp.mpf
    sign: int
    digits: int
    embedding: int = 0


def lambda_value(
    sys: EigenSystem,
    s: int,
    digits: int,
    embedding: int = 0,
    t0_scale: float = 1.0,
) -> CompletedLValue:
    """Completed L-value Lambda(f, s) to about ``digits - 10`` correct
    digits, deterministic for fixed inputs. ``embedding`` selects the real
    embedding of the coefficient field (sorted ascending)."""
    k, N = sys.weight, sys.level
    if not 1 <= s <= k - 1:
        raise PreconditionError(f"s = {s} outside the critical strip 1..{k - 1}")
    eps = functional_equation_sign(sys)
    with mp.workdps(digits + _GUARD_DPS):
        nmax = series_cutoff(digits, N, t0_scale)
        roots = _real_embeddings(sys.ctx)
        a = _coefficient_table(sys, nmax, roots[embedding])
        t0 = mp.mpf(t0_scale) / mp.sqrt(N)
        two_pi = 2 * mp.pi
        s1 = mp.mpf(0)
        s2 = mp.mpf(0)
        for n in range(1, nmax + 1):
            an = a[n]
            if an == 0:
                continue
            s1 += an * (two_pi * n) ** (-s) * _upper_gamma_int(s, two_pi * n * t0)
            s2 += an * (two_pi * n) ** (s - k) * _upper_gamma_int(
                k - s, two_pi * n / (N * t0)
            )
        val = mp.power(N, mp.mpf(s) / 2) * s1 + eps * mp.power(N, mp.mpf(k - s) / 2) * s2
        return CompletedLValue(k, N, s, val, eps, digits, embedding)


def split_invariance_residual(sys: EigenSystem, s: int, digits: int,
                              scale_b: float = 1.3, embedding: int = 0) -> mp.mpf:
    """|Lambda(s) at split 1 - Lambda(s) at split scale_b|: the honest
    correctness oracle for coefficients and sign (the reflected-argument
    identity holds by construction, this one does not)."""
    v1 = lambda_value(sys, s, digits, embedding, 1.0).value
    v2 = lambda_value(sys, s, digits, embedding, scale_b).value
    return abs(v1 - v2)


def resolve_prime_level_ap(sys: EigenSystem, digits: int = 60) -> EigenSystem:
    """Determine a_p = -w p^{k/2-1} of a prime-level system by testing both
    signs against split invariance of the completed L-function."""
    p, k = sys.level, sys.weight
    if not is_prime(p):
        raise PreconditionError("resolve_prime_level_ap: level must be prime")
    if p in sys.values:
        return sys
    unit = p ** (k // 2 - 1)
    candidates = []
    probes = [k // 2 + 1, k - 2] if k > 3 else [k // 2 + 1]
    for w in (1, -1):
        trial = sys.with_value(p, sys.ctx.from_rational(-w * unit))
        with mp.workdps(digits + _GUARD_DPS):
            res = max(split_invariance_residual(trial, s, digits) for s in probes)
            scale = max(abs(lambda_value(trial, probes[0], digits).value), mp.mpf(1))
            ok = res / scale < mp.mpf(10) ** (-digits // 3)
        if ok:
            candidates.append(trial)
    if len(candidates) != 1:
        raise ReconstructionError(
            f"Atkin-Lehner sign not determined ({len(candidates)} candidates passed)"
        )
    return candidates[0]


# ---------------------------------------------------------------------------
# rational reconstruction of critical-value ratios
# ---------------------------------------------------------------------------


def _cf_reconstruct(x: mp.mpf, digits: int) -> Optional[Fraction]:
    """Continued-fraction rationalization with denominator bound 10^{D/3},
    accepted when the value is reproduced to 10^{-D/2}."""
    bound = 10 ** (digits // 3)
    tol = mp.mpf(10) ** (-(digits // 2))
    p0, q0, p1, q1 = 1, 0, 0, 1  # convergents of the CF
    y = x
    for _ in range(10 * digits):
        fl = mp.floor(y)
        a = int(fl)
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        if q0 > bound:
            return None
        if abs(x - Fraction(p0, q0)) < tol:
            return Fraction(p0, q0)
        frac = y - fl
        if frac == 0:
            return None
        y = 1 / frac
    return None


@dataclass(frozen=True)
class RatioReport:
    m: int
    m_prime: int
    ratio: object  # Fraction or NFElement
    residual: float
    stable: bool


def ratio_rationalize(sys: EigenSystem, m: int, m_prime: int, digits: int) -> RatioReport:
    """Rationalize Lambda(f, m) / Lambda(f, m') for same-parity critical
    integers. Stability demands exact agreement of the reconstructions at
    ``digits`` and ``2 digits``."""
    k = sys.weight
    for s in (m, m_prime):
        if not 1 <= s <= k - 1:
            raise PreconditionError(f"{s} is not critical for weight {k}")
    if (m - m_prime) % 2 != 0:
        raise PreconditionError("ratio_rationalize: mixed parity")
    if m == m_prime:
        return RatioReport(m, m_prime, Fraction(1), 0.0, True)
    d = sys.ctx.degree

    def reconstruct(dd: int):
        with mp.workdps(dd + _GUARD_DPS):
            ratios = []
            for e in range(d):
                num = lambda_value(sys, m, dd, embedding=e).value
                den = lambda_value(sys, m_prime, dd, embedding=e).value
                if den == 0:
                    raise PreconditionError("ratio_rationalize: denominator value is zero")
                ratios.append(num / den)
            if d == 1:
                return _cf_reconstruct(ratios[0], dd), ratios[0]
            # coordinates in the power basis, from the Vandermonde system
            roots = _real_embeddings(sys.ctx)
            mat = mp.matrix([[roots[e] ** i for i in range(d)] for e in range(d)])
            coords = mp.lu_solve(mat, mp.matrix(ratios))
            fracs = [_cf_reconstruct(coords[i], dd) for i in range(d)]
            if any(f is None for f in fracs):
                return None, ratios[0]
            return NFElement(sys.ctx, fracs), ratios[0]

    r1, _ = reconstruct(digits)
    r2, float2 = reconstruct(2 * digits)
    if r1 is None and r2 is None:
        raise ReconstructionError("increase precision: rationalization unstable")
    best = r2 if r2 is not None else r1
    stable = r1 is not None and r2 is not None and r1 == r2
    if isinstance(best, Fraction):
        with mp.workdps(2 * digits):
            residual = float(abs(float2 - mp.mpf(best.numerator) / best.denominator))
    else:
        residual = 0.0
    return RatioReport(m, m_prime, best, residual, stable)


# ---------------------------------------------------------------------------
# candidate congruence primes
# ---------------------------------------------------------------------------

CANDIDATE_FLAG = "candidate (period-normalization dependent)"


def candidate_congruence_primes(
    sys: EigenSystem, j: int, k: int, digits: int
) -> list[tuple[int, str]]:
    """Primes ell > j + 2k - 2 (and != the level) dividing the numerator of
    the norm of Lambda(f, j+k) / Lambda(f, m0), where m0 is the smallest
    same-parity critical value with nonvanishing completed L-value.

    The period is only defined up to units, so every returned prime is a
    candidate, not a certificate; the flag string says so.
    """
    kp = j + 2 * k - 2
    if sys.weight != kp:
        raise PreconditionError(
            f"system weight {sys.weight} does not match j + 2k - 2 = {kp}"
        )
    s_star = j + k
    if not 1 <= s_star <= kp - 1:
        raise PreconditionError("j + k is not critical")
    p_level = sys.level if sys.level > 1 else None
    d = sys.ctx.degree

    def norm_ratio(dd: int) -> Optional[Fraction]:
        with mp.workdps(dd + _GUARD_DPS):
            tiny = mp.mpf(10) ** (-(dd // 2))
            m0 = None
            for m in range(2 - (s_star % 2), kp, 2):
                vals = [lambda_value(sys, m, dd, embedding=e).value for e in range(d)]
                if all(abs(v) > tiny for v in vals):
                    m0 = m
                    break
            if m0 is None:
                raise PreconditionError("choose different m0: all reference values vanish")
            prod = mp.mpf(1)
            for e in range(d):
                num = lambda_value(sys, s_star, dd, embedding=e).value
                if abs(num) < tiny:
                    raise PreconditionError("choose different m0: target value vanishes")
                den = lambda_value(sys, m0, dd, embedding=e).value
                prod *= num / den
            return _cf_reconstruct(prod, dd)

    r1 = norm_ratio(digits)
    r2 = norm_ratio(2 * digits)
    if r1 is None or r2 is None or r1 != r2:
        raise ReconstructionError("increase precision: norm ratio unstable")
    out = []
    for ell in sorted(sympy.factorint(abs(r1.numerator))):
        if ell > kp and ell != p_level:
            out.append((int(ell), CANDIDATE_FLAG))
    return out


# ---------------------------------------------------------------------------
# exact divisibility criteria
# ---------------------------------------------------------------------------


def zeta_sigma_primes(k: int, sigma: Sequence[int]) -> list[int]:
    """Primes ell > 3 dividing the numerator of (B_k / 2k) prod_{p in Sigma}
    (p^k - 1): the incomplete-zeta divisibility criterion, fully exact."""
    if k < 4 or k % 2 != 0:
        raise PreconditionError("zeta_sigma_primes: k must be even and >= 4")
    for p in sigma:
        if not is_prime(p):
            raise PreconditionError(f"zeta_sigma_primes: {p} in Sigma is not prime")
    value = bernoulli(k) / (2 * k)
    for p in sigma:
        value *= p**k - 1
    num = abs(value.numerator)
    return [int(ell) for ell in sorted(sympy.factorint(num)) if ell > 3]


def local_euler_divisor(sys: EigenSystem, j: int, k: int, p: int, ell: int) -> bool:
    """True iff some prime above ell in the coefficient field divides the
    Euler-factor value p^{2(j+k)} - a_p p^{j+k} + p^{k'-1} (k' = j+2k-2)."""
    kp = j + 2 * k - 2
    if sys.level != 1:
        raise PreconditionError("local_euler_divisor: level-1 systems only")
    if sys.weight != kp:
        raise PreconditionError("local_euler_divisor: weight mismatch with (j, k)")
    if not is_prime(ell) or ell == p:
        raise PreconditionError("local_euler_divisor: ell must be a prime != p")
    ap = sys.get(p)
    value = sys.ctx.from_rational(p ** (2 * (j + k)) + p ** (kp - 1)) - ap * p ** (j + k)
    if value.is_zero():
        return True
    return any(
        reduce_mod(value, P).is_zero() for P in primes_above(sys.ctx, ell)
    )


# ---------------------------------------------------------------------------
# prime-level systems ready for L-evaluation
# ---------------------------------------------------------------------------


def prime_level_system(
    k: int, p: int, nmax: int, digits: int = 60, orbit: int = 0
) -> EigenSystem:
    """A newform eigen-system on S_k^new(Gamma_0(p)) from trace-formula
    characteristic polynomials, with eigenvalues at all primes <= nmax and
    a_p resolved via the functional equation."""
    from .traceformula import eigen_systems_new

    systems = eigen_systems_new(k, p, primes_up_to(nmax))
    if not systems:
        raise PreconditionError(f"S_{k}^new(Gamma_0({p})) is trivial")
    if orbit >= len(systems):
        raise PreconditionError(f"orbit {orbit} out of range ({len(systems)} orbits)")
    return resolve_prime_level_ap(systems[orbit], digits)
