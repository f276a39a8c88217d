"""Exact rational scalars and shared binomial coefficients.

All arithmetic in this package is arbitrary-precision rational; no floating
point is used anywhere. ``gmpy2.mpq`` is preferred for speed, with
``fractions.Fraction`` as a drop-in fallback so the package stays importable
without the C extension.
"""

from __future__ import annotations

from math import comb

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as Rat

RAT_ZERO = Rat(0)
RAT_ONE = Rat(1)


def rat(num: int, den: int = 1):
    """Exact rational num/den."""
    return Rat(num, den)


def binom(n: int, k: int) -> int:
    """Binomial coefficient with C(n, k) = 0 whenever k < 0 or k > n.

    The out-of-range convention keeps sums like sum_{h >= g} C(2h+2, h-g) * E(d,h)
    finite and unambiguous; every module takes its binomials from here.
    """
    if k < 0 or k > n or n < 0:
        return 0
    return comb(n, k)


def rat_str(x) -> str:
    """Render exactly: an integer string, or ``p/q`` for non-integers."""
    num, den = x.numerator, x.denominator
    if den == 1:
        return str(num)
    return f"{num}/{den}"


def rat_from_parts(num: str, den: str):
    """Rebuild an exact rational from decimal integer strings (cache files)."""
    d = int(den)
    if d == 0:
        raise ValueError("zero denominator")
    return Rat(int(num), d)
