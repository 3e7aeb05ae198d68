"""paracong: Eisenstein congruence toolkit for paramodular forms.

Exact elliptic modular form eigendata (q-expansions and trace formula),
critical L-value candidate primes, congruence verification between elliptic
and genus-2 Hecke eigen-systems, and the Satake-parameter elimination engine
deciding which local representation types at p can carry a congruence.
"""

from .exactmath import (
    ExactRational,
    FFElement,
    PolyMod,
    PolyOverQ,
    ResidueField,
    bernoulli,
    factor_poly_mod,
    factor_poly_rational,
    ff_pow_is_one,
    ord_at,
)
from .errors import PreconditionError, ReconstructionError

__version__ = "0.1.0"
