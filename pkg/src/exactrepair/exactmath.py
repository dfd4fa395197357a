"""Exact combinatorics shared by every bound computation.

Rationals are plain :class:`fractions.Fraction` values; nothing in here
touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

__all__ = [
    "Fraction",
    "binomial",
    "hypergeom_weight",
    "hypergeom_support",
    "to_exact",
    "from_exact",
    "to_decimal",
]


def binomial(a: int, b: int) -> int:
    """C(a, b), zero-extended to b < 0 and b > a.

    The zero extension lets summations run over loose limits without
    special-casing the edges of the support.
    """
    if a < 0:
        raise ValueError(f"binomial: top argument must be >= 0, got {a}")
    if b < 0 or b > a:
        return 0
    return comb(a, b)


def hypergeom_weight(population: int, successes: int, draws: int, observed: int) -> Fraction:
    """Probability that ``draws`` picks without replacement hit exactly
    ``observed`` of the ``successes`` marked items out of ``population``.
    """
    if not 0 <= draws <= population:
        raise ValueError(f"need 0 <= draws <= population, got draws={draws}, population={population}")
    if not 0 <= successes <= population:
        raise ValueError(
            f"need 0 <= successes <= population, got successes={successes}, population={population}"
        )
    num = binomial(successes, observed) * binomial(population - successes, draws - observed)
    return Fraction(num, binomial(population, draws))


def hypergeom_support(population: int, successes: int, draws: int) -> range:
    lo = max(0, draws - (population - successes))
    hi = min(successes, draws)
    return range(lo, hi + 1)


def to_exact(x: Fraction) -> str:
    # always "p/q", even for integers, so every exact column has one shape
    return f"{x.numerator}/{x.denominator}"


def from_exact(s: str) -> Fraction:
    return Fraction(s)


def to_decimal(x: Fraction) -> str:
    # Fraction.__float__ is correctly rounded
    return repr(float(x))
