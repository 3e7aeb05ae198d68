"""GSp4(Q_p) local representation engine.

Static classification tables for the Borel-induced representation types
I - VI (inducing data, paramodular fixed-vector dimensions, L-parameter
character patterns), Satake-parameter target quadruples, mod-Lambda multiset
matching with brute-forced free characters, the obstruction congruences of
the per-type case analysis, the inertia guard l >= max(6f+2, e+2) with its
witness-prime search, the local-origin rarity test, and the full verdict
pipeline combining all three parts.

All Satake comparisons happen after scaling by p^{(k'-1)/2} with
k' = j + 2k - 2; j is kept even so every exponent below is an integer and
half-integer powers never materialise.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import PreconditionError
from .exactmath import (
    FFElement,
    ResidueField,
    bernoulli,
    ff_pow_is_one,
    is_prime,
    ord_at,
)

__all__ = [
    "ReprTypeRecord",
    "SatakeQuadruple",
    "MatchResult",
    "PowerCongruence",
    "Verdict",
    "Conclusion",
    "REPR_TYPE_TABLE",
    "NEW_PARAMODULAR_TYPES",
    "record_by_id",
    "target_quadruple",
    "type_match",
    "obstruction_congruences",
    "borel_guard",
    "witness_prime",
    "local_origin_rarity",
    "admissible_types_for",
    "verdict",
]


# ---------------------------------------------------------------------------
# classification tables (golden data)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReprTypeRecord:
    """One row of the Borel-induced classification: inducing data, the
    conditions under which the row occurs, fixed-vector dimensions at the
    maximal compact and at the paramodular group, and the family's
    L-parameter character pattern with its central character."""

    type_id: str  # e.g. "IIa"
    family: str  # "I" .. "VI"
    inducing: str
    conditions: str
    dim_gsp4zp: int
    dim_kp: int
    char_pattern: tuple[str, str, str, str]
    central_char: str

    @property
    def has_new_paramodular_vector(self) -> bool:
        # paramodular vectors with no spherical vector at all: exactly the
        # types supporting genuinely new level-p data
        return self.dim_gsp4zp == 0 and self.dim_kp > 0


_FAMILY_PARAMS = {
    "I": (("chi1*chi2*sigma", "chi1*sigma", "chi2*sigma", "sigma"), "chi1*chi2*sigma^2"),
    "II": (("chi^2*sigma", "nu^(1/2)*chi*sigma", "nu^(-1/2)*chi*sigma", "sigma"), "(chi*sigma)^2"),
    "III": (("nu^(1/2)*chi*sigma", "nu^(-1/2)*chi*sigma", "nu^(1/2)*sigma", "nu^(-1/2)*sigma"), "chi*sigma^2"),
    "IV": (("nu^(3/2)*sigma", "nu^(1/2)*sigma", "nu^(-1/2)*sigma", "nu^(-3/2)*sigma"), "sigma^2"),
    "V": (("nu^(1/2)*sigma", "nu^(1/2)*xi*sigma", "nu^(-1/2)*xi*sigma", "nu^(-1/2)*sigma"), "sigma^2"),
    "VI": (("nu^(1/2)*sigma", "nu^(1/2)*sigma", "nu^(-1/2)*sigma", "nu^(-1/2)*sigma"), "sigma^2"),
}

_INDUCING = {
    "I": "chi1 x chi2 x| sigma",
    "II": "nu^(1/2)chi x nu^(-1/2)chi x| sigma",
    "III": "chi x nu x| nu^(-1/2)sigma",
    "IV": "nu x nu^2 x| nu^(-3/2)sigma",
    "V": "nu*xi x xi x| nu^(-1/2)sigma",
    "VI": "nu x 1 x| nu^(-1/2)sigma",
}

_CONDITIONS = {
    "I": "chi1, chi2 != nu^(+-1); chi1 != nu^(+-1) chi2^(+-1)",
    "II": "chi != nu^(+-3/2); chi^2 != nu^(+-1)",
    "III": "chi != 1, nu^(+-2)",
    "IV": "",
    "V": "xi^2 = 1, xi != 1",
    "VI": "",
}

# (type_id, dim at GSp4(Z_p), dim at the paramodular group K(p))
_DIMS = [
    ("I", 1, 2),
    ("IIa", 0, 1),
    ("IIb", 1, 1),
    ("IIIa", 0, 0),
    ("IIIb", 1, 2),
    ("IVa", 0, 0),
    ("IVb", 0, 0),
    ("IVc", 0, 1),
    ("IVd", 1, 1),
    ("Va", 0, 0),
    ("Vb", 0, 1),
    ("Vc", 0, 1),
    ("Vd", 1, 0),
    ("VIa", 0, 0),
    ("VIb", 0, 0),
    ("VIc", 0, 1),
    ("VId", 1, 1),
]


def _family_of(type_id: str) -> str:
    return type_id.rstrip("abcd")


REPR_TYPE_TABLE: tuple[ReprTypeRecord, ...] = tuple(
    ReprTypeRecord(
        type_id=tid,
        family=_family_of(tid),
        inducing=_INDUCING[_family_of(tid)],
        conditions=_CONDITIONS[_family_of(tid)],
        dim_gsp4zp=d1,
        dim_kp=d2,
        char_pattern=_FAMILY_PARAMS[_family_of(tid)][0],
        central_char=_FAMILY_PARAMS[_family_of(tid)][1],
    )
    for tid, d1, d2 in _DIMS
)

NEW_PARAMODULAR_TYPES = frozenset(
    r.type_id for r in REPR_TYPE_TABLE if r.has_new_paramodular_vector
)


def record_by_id(type_id: str) -> ReprTypeRecord:
    for r in REPR_TYPE_TABLE:
        if r.type_id == type_id:
            return r
    raise PreconditionError(f"unknown representation type {type_id!r}")


# ---------------------------------------------------------------------------
# target quadruples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SatakeQuadruple:
    """A multiset of four residues mod Lambda, with the weight data needed
    to reconstruct the scaled type-side parameters it is compared against."""

    entries: tuple[FFElement, FFElement, FFElement, FFElement]
    scaled: bool
    j: int
    k: int
    p: int
    sign: Optional[int]  # Steinberg sign, None for the local-origin target
    source: str

    def field(self) -> ResidueField:
        return self.entries[0].field

    def multiset_key(self):
        return tuple(sorted(e.key() for e in self.entries))

    def matches(self, others: Sequence[FFElement]) -> bool:
        return self.multiset_key() == tuple(sorted(e.key() for e in others))

    @property
    def weight_total(self) -> int:
        """k' = j + 2k - 2."""
        return self.j + 2 * self.k - 2


def _check_jkp(j: int, k: int, p: int, F: ResidueField):
    if j < 0 or j % 2 != 0:
        raise PreconditionError(f"j must be even and >= 0, got {j}")
    if k < 3:
        raise PreconditionError(f"k must be >= 3, got {k}")
    if not is_prime(p):
        raise PreconditionError(f"p must be prime, got {p}")
    if p % F.ell == 0:
        raise PreconditionError(f"p = {p} must differ from the residue characteristic")


def target_quadruple(
    j: int, k: int, p: int, source: str, F: ResidueField
) -> list[SatakeQuadruple]:
    """Target Satake quadruples reduced in F.

    LevelPNewform: [s p^{(j+2k-2)/2}, s p^{(j+2k-4)/2}, p^{k-2}, p^{j+k-1}]
    for both Steinberg signs s (the sign is shared by the first two entries).
    Level1LocalOrigin: [p^{j+k}, p^{k-3}, p^{j+k-1}, p^{k-2}].
    """
    _check_jkp(j, k, p, F)
    pe = F.from_int(p)
    if source == "LevelPNewform":
        exps = [(j + 2 * k - 2) // 2, (j + 2 * k - 4) // 2, k - 2, j + k - 1]
        out = []
        for sign in (1, -1):
            entries = [pe**e for e in exps]
            if sign < 0:
                entries[0] = -entries[0]
                entries[1] = -entries[1]
            out.append(
                SatakeQuadruple(tuple(entries), True, j, k, p, sign, source)
            )
        return out
    if source == "Level1LocalOrigin":
        exps = [j + k, k - 3, j + k - 1, k - 2]
        entries = tuple(pe**e for e in exps)
        return [SatakeQuadruple(entries, True, j, k, p, None, source)]
    raise PreconditionError(f"unknown target source {source!r}")


# ---------------------------------------------------------------------------
# type matching
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchResult:
    possible: bool
    witness: Optional[dict] = None


def _scaled_AB(target: SatakeQuadruple):
    F = target.field()
    pe = F.from_int(target.p)
    kp = target.weight_total
    A = pe ** (kp // 2)
    B = pe ** ((kp - 2) // 2)
    return pe, A, B


def type_match(
    record: ReprTypeRecord, target: SatakeQuadruple, p: int, F: ResidueField
) -> MatchResult:
    """Decide whether the record's character pattern, free unramified values
    ranging over F^x (sigma quadratic where the trivial central character
    forces it), can reproduce the target multiset mod Lambda.

    Families I and II are never excluded by this comparison; the free
    characters absorb the standard targets outright. Type III is brute-forced
    over all values of sigma(p); IV, V and VI over the sign of sigma(p).
    """
    if p != target.p or F != target.field():
        raise PreconditionError("type_match: target metadata mismatch")
    fam = record.family
    pe, A, B = _scaled_AB(target)
    if fam in ("I", "II"):
        return MatchResult(True, _free_family_witness(fam, target, pe, A, B))
    one = F.one()
    minus = -one
    if fam == "VI":
        for s in (one, minus):
            if target.matches([s * A, s * A, s * B, s * B]):
                return MatchResult(True, {"sigma(p)": _fmt(s)})
        return MatchResult(False)
    if fam == "V":
        for s in (one, minus):
            if target.matches([s * A, minus * s * A, minus * s * B, s * B]):
                return MatchResult(True, {"sigma(p)": _fmt(s), "xi(p)": "-1"})
        return MatchResult(False)
    if fam == "IV":
        for s in (one, minus):
            if target.matches([s * pe * A, s * A, s * B, s * B * pe.inverse()]):
                return MatchResult(True, {"sigma(p)": _fmt(s)})
        return MatchResult(False)
    if fam == "III":
        for beta in F.elements():
            if beta.is_zero():
                continue
            binv = beta.inverse()
            if target.matches([A * beta, B * beta, A * binv, B * binv]):
                return MatchResult(
                    True, {"sigma(p)": _fmt(beta), "chi(p)": _fmt(binv * binv)}
                )
        return MatchResult(False)
    raise PreconditionError(f"unknown family {fam!r}")


def _fmt(x: FFElement) -> str:
    return str(x.repr_poly) if not x.is_zero() else "0"


def _free_family_witness(fam, target, pe, A, B):
    """Explicit parameter assignment for families I / II when the standard
    pairing works; None when the target is nonstandard."""
    t = list(target.entries)
    kp = target.weight_total
    psq = pe ** (kp - 1)
    if fam == "II":
        for s in (target.field().one(), -target.field().one()):
            pair = sorted([(s * A).key(), (s * B).key()])
            for i, jx in itertools.permutations(range(4), 2):
                if sorted([t[i].key(), t[jx].key()]) == pair:
                    rest = [t[r] for r in range(4) if r not in (i, jx)]
                    if (rest[0] * rest[1]).key() == psq.key():
                        return {
                            "delta = chi*sigma(p)": _fmt(s),
                            "chi^2*sigma(p)": _fmt(rest[0]),
                            "sigma(p)": _fmt(rest[1]),
                        }
        return None
    # family I: split the target into two pairs with product p^{k'-1}
    for i, jx in itertools.combinations(range(4), 2):
        rest = [r for r in range(4) if r not in (i, jx)]
        if (t[i] * t[jx]).key() == psq.key() and (
            t[rest[0]] * t[rest[1]]
        ).key() == psq.key():
            return {
                "chi1*chi2*sigma(p)": _fmt(t[i]),
                "sigma(p)": _fmt(t[jx]),
                "chi1*sigma(p)": _fmt(t[rest[0]]),
                "chi2*sigma(p)": _fmt(t[rest[1]]),
            }
    return None


# ---------------------------------------------------------------------------
# obstruction congruences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerCongruence:
    """The condition p^exponent = sign (mod Lambda). ``sign`` is one of
    "+1" (forced), "+-1" (either sign can occur), "-+1" (the sign opposite
    to the Steinberg sign of the target)."""

    exponent: int
    sign: str

    def holds(self, p: int, F: ResidueField) -> bool:
        """Either-sign evaluation: the sound necessary-condition reading."""
        x = F.from_int(p) ** self.exponent
        if self.sign == "+1":
            return x.is_one()
        return x.is_one() or (-x).is_one()

    def __str__(self):
        return f"p^{self.exponent} = {self.sign} mod Lambda"


def obstruction_congruences(type_id: str, j: int) -> list[PowerCongruence]:
    """The per-type congruence list from the elimination case analysis.
    Types I and II carry no conditions and are rejected."""
    if j % 2 != 0:
        raise PreconditionError("obstruction_congruences: j must be even")
    fam = _family_of(type_id)
    if fam in ("I", "II"):
        raise PreconditionError(f"type {type_id}: unconditional, no obstructions")
    vi = [
        PowerCongruence(1, "+1"),
        PowerCongruence((j + 2) // 2, "+-1"),
        PowerCongruence(j // 2, "+-1"),
    ]
    v = [
        PowerCongruence(1, "+1"),
        PowerCongruence((j + 2) // 2, "-+1"),
        PowerCongruence(j // 2, "-+1"),
    ]
    iv = [
        PowerCongruence((j + 4) // 2, "+-1"),
        PowerCongruence((j + 2) // 2, "+-1"),
        PowerCongruence(j // 2, "+-1"),
        PowerCongruence((j - 2) // 2, "+-1"),
    ]
    if fam == "VI":
        return vi
    if fam == "V":
        return v
    if fam == "IV":
        return iv
    # III reduces to the VI case (sigma(p) = +-1) and the IV case
    # (sigma(p) = +-p)
    seen = []
    for c in vi + iv:
        if c not in seen:
            seen.append(c)
    return seen


# ---------------------------------------------------------------------------
# inertia guard and witness primes
# ---------------------------------------------------------------------------


def borel_guard(ell: int, e: int, f: int) -> bool:
    """True iff ell >= max(6f + 2, e + 2), the bound forcing Borel
    induction."""
    if not is_prime(ell):
        raise PreconditionError(f"borel_guard: {ell} is not prime")
    if e < 1 or f < 1:
        raise PreconditionError("borel_guard: e and f must be >= 1")
    return ell >= max(6 * f + 2, e + 2)


def witness_prime(ell: int, f: int) -> int:
    """Smallest prime l' != ell with l'^{3f} != 1 and l'^{4f} != 1 mod ell.
    Existence is guaranteed by counting classes once ell >= 6f + 2."""
    if not is_prime(ell):
        raise PreconditionError(f"witness_prime: {ell} is not prime")
    if f < 1:
        raise PreconditionError("witness_prime: f must be >= 1")
    if ell < 6 * f + 2:
        raise PreconditionError(
            f"witness_prime: guard violated, need ell >= {6 * f + 2}"
        )
    cand = 2
    while True:
        if cand != ell and is_prime(cand):
            if pow(cand, 3 * f, ell) != 1 and pow(cand, 4 * f, ell) != 1:
                return cand
        cand += 1


# ---------------------------------------------------------------------------
# local-origin rarity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalOriginResult:
    blocked: bool
    t: Optional[int] = None

    def __str__(self):
        if self.blocked:
            return "blocked"
        return f"possible (t = {self.t})"


def local_origin_rarity(j: int, p: int, F: ResidueField) -> LocalOriginResult:
    """Test p^{j+2t} = 1 mod Lambda for t = 0..3: a local-origin congruence
    for a new paramodular form forces one of these, so all four failing
    blocks it. j = 0 (the lift regime) is rejected."""
    if j <= 0 or j % 2 != 0:
        raise PreconditionError("local_origin_rarity: j must be even and > 0")
    if not is_prime(p) or p % F.ell == 0:
        raise PreconditionError("local_origin_rarity: p must be a prime unit in F")
    for t in range(4):
        if ff_pow_is_one(p, j + 2 * t, F):
            return LocalOriginResult(False, t)
    return LocalOriginResult(True)


# ---------------------------------------------------------------------------
# the verdict pipeline
# ---------------------------------------------------------------------------


class Conclusion(enum.Enum):
    NEW_PARAMODULAR_FORCED_IIA = "type IIa or level-1 replacement"
    LEVEL1_REPLACEMENT_POSSIBLE = "level-1 replacement possible"
    RAMANUJAN_CONGRUENCE = "Ramanujan congruence (Bernoulli criterion positive)"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Outcome of the three-part elimination run for (j, k, p; ell, e, f)."""

    j: int
    k: int
    p: int
    ell: int
    e: int
    f: int
    borel_guard_pass: bool
    power_conditions: Optional[dict[int, bool]]  # t -> p^{j+2t-2} != 1 holds
    bernoulli_valuation: Optional[int]
    admissible_types: Optional[frozenset[str]]
    conclusion: Conclusion
    level1_replacement_possible: bool = False
    witnesses: dict = field(default_factory=dict, compare=False)

    @property
    def kprime(self) -> int:
        return self.j + 2 * self.k - 2


def admissible_types_for(
    j: int, k: int, p: int, F: ResidueField
) -> tuple[frozenset[str], dict]:
    """Run type_match on every table row against both Steinberg-sign targets;
    a type is admissible when some sign admits a match. Returns the set and
    the per-type witness assignments."""
    targets = target_quadruple(j, k, p, "LevelPNewform", F)
    admissible = set()
    witnesses: dict[str, list] = {}
    for rec in REPR_TYPE_TABLE:
        for tgt in targets:
            res = type_match(rec, tgt, p, F)
            if res.possible:
                admissible.add(rec.type_id)
                if res.witness is not None:
                    witnesses.setdefault(rec.type_id, []).append(
                        {"steinberg_sign": tgt.sign, **res.witness}
                    )
    return frozenset(admissible), witnesses


def bernoulli_valuation(kprime: int, p: int, ell: int) -> int:
    """ord_ell of B_{k'} (p^{k'} - 1) / (2 k')."""
    if kprime < 4 or kprime % 2 != 0:
        raise PreconditionError("bernoulli_valuation: k' must be even and >= 4")
    value = bernoulli(kprime) * (p**kprime - 1) / (2 * kprime)
    return ord_at(value, ell)


def verdict(j: int, k: int, p: int, ell: int, e: int, f: int) -> Verdict:
    """The full elimination pipeline.

    Part 1: the inertia guard ell >= max(6f+2, e+2). Part 2: the four power
    conditions p^{j+2t-2} != 1 mod Lambda for t = 0..3 (checked in the
    residue field F_{ell^f}). Part 3: vanishing of the Bernoulli valuation
    ord_ell(B_{k'}(p^{k'}-1)/2k'). All three passing leaves only types I and
    II and forces either a new paramodular eigenform of type IIa or a level-1
    replacement for the elliptic side of the congruence.
    """
    if j <= 0 or j % 2 != 0:
        raise PreconditionError(f"verdict: j must be even and > 0, got {j}")
    if k < 3:
        raise PreconditionError(f"verdict: k must be >= 3, got {k}")
    if not is_prime(p):
        raise PreconditionError(f"verdict: p = {p} is not prime")
    if not is_prime(ell):
        raise PreconditionError(f"verdict: ell = {ell} is not prime")
    if p == ell:
        raise PreconditionError("verdict: p and ell must differ")
    kprime = j + 2 * k - 2
    if ell <= kprime:
        raise PreconditionError(
            f"verdict: ell must exceed j + 2k - 2 = {kprime}, got {ell}"
        )
    if e < 1 or f < 1:
        raise PreconditionError("verdict: e and f must be >= 1")

    guard = borel_guard(ell, e, f)
    if not guard:
        return Verdict(
            j, k, p, ell, e, f,
            borel_guard_pass=False,
            power_conditions=None,
            bernoulli_valuation=None,
            admissible_types=None,
            conclusion=Conclusion.INCONCLUSIVE,
        )

    F = ResidueField.create(ell, f)
    power = {t: not ff_pow_is_one(p, j + 2 * t - 2, F) for t in range(4)}
    val = bernoulli_valuation(kprime, p, ell)
    admissible, witnesses = admissible_types_for(j, k, p, F)

    if not all(power.values()):
        conclusion = Conclusion.INCONCLUSIVE
        level1 = False
    elif val > 0:
        conclusion = Conclusion.RAMANUJAN_CONGRUENCE
        level1 = False
    else:
        conclusion = Conclusion.NEW_PARAMODULAR_FORCED_IIA
        level1 = True
    return Verdict(
        j, k, p, ell, e, f,
        borel_guard_pass=True,
        power_conditions=power,
        bernoulli_valuation=val,
        admissible_types=admissible,
        conclusion=conclusion,
        level1_replacement_possible=level1,
        witnesses=witnesses,
    )
