"""Numeric backends shared by every module.

Two kinds of scalar flow through the library:

* exact rationals (``gmpy2.mpq``) -- arbitrary precision, decidable
  equality, used whenever the input squared lengths are rational and no
  square roots are required;
* IEEE float64 -- used for everything that needs orthogonalization, and
  for large instances where exact arithmetic is too slow.

All float comparisons against zero go through the thresholds collected
in :class:`Tolerances`; exact comparisons are literal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

RATIONAL = "rational"
FLOAT = "float"
BACKENDS = (RATIONAL, FLOAT)


@dataclass(frozen=True)
class Tolerances:
    """Float-backend thresholds (exact backend ignores them).

    rank_rel: pivot threshold for rank decisions, relative to the
        largest pivot seen.
    residual_rel: acceptance threshold for residuals, relative to the
        natural scale of the quantity checked.
    """

    rank_rel: float = 1e-9
    residual_rel: float = 1e-10


DEFAULT_TOLERANCES = Tolerances()


def exact(value):
    """Coerce ``value`` to an exact rational.

    Accepts ints, mpq, Fraction, and floats (floats convert to their
    exact binary value).
    """
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def coerce(value, backend):
    """Coerce a scalar to the arithmetic of ``backend``."""
    if backend == FLOAT:
        return float(value)
    if backend == RATIONAL:
        return exact(value)
    raise ValueError(f"unknown backend {backend!r}")


def is_exact(value) -> bool:
    """True when ``value`` carries exact (int/rational) arithmetic."""
    return not isinstance(value, float)


def parse_number(text: str):
    """Parse a number string from the interchange format.

    ``"p/q"`` and plain integer strings parse exactly; anything with a
    decimal point or exponent parses as float64.
    """
    s = text.strip()
    try:
        if "/" in s:
            return mpq(s)
        if "." in s or "e" in s or "E" in s:
            return float(s)
        return mpq(s)
    except ValueError:
        raise ValueError(f"cannot parse number {text!r}") from None


def format_number(value) -> str:
    """Inverse of :func:`parse_number`; round-trips losslessly."""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Fraction):
        value = mpq(value.numerator, value.denominator)
    return str(value)  # mpq/int render as "p/q" or "p"
