"""Numeric bracketing of the balancing threshold sigma(n).

The upper side is the smallest m whose counting condition
``2^m > (e(m/n + 2) sqrt(n+1))^n`` provably holds; the lower side is the
largest known non-balancing family that embeds into R^n by zero padding.
Threshold comparisons are certified: a padded float filter decides the easy
cases and anything near the boundary falls back to exact big-integer
arithmetic with rational enclosures of e, so no answer ever rests on
unchecked rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ParameterError
from .geometry import DEFAULT_POINT_BUDGET, shell_profile

DEFAULT_THRESHOLD_CAP = 1_000_000
_LOG2_E = math.log2(math.e)
_FLOAT_GUARD = 1e-9  # relative padding far above worst-case libm error


@lru_cache(maxsize=None)
def _e_enclosure(terms: int) -> tuple[Fraction, Fraction]:
    """Rational lo < e < hi from the Taylor series with remainder bound."""
    total = Fraction(0)
    fact = 1
    for j in range(terms + 1):
        if j:
            fact *= j
        total += Fraction(1, fact)
    return total, total + Fraction(2, fact * (terms + 1))


def _threshold_exact(m: int, n: int) -> bool:
    """Certified truth of 2^m > (e(m/n+2) sqrt(n+1))^n via integers only.

    Squaring removes the square root: compare 4^m n^2n against
    e^2n (m+2n)^2n (n+1)^n using rational enclosures of e, widening the
    enclosure until it decides.
    """
    lhs_core = (1 << (2 * m)) * n ** (2 * n)
    mid = (m + 2 * n) ** (2 * n) * (n + 1) ** n
    terms = 30
    while True:
        lo, hi = _e_enclosure(terms)
        if lhs_core * hi.denominator ** (2 * n) > hi.numerator ** (2 * n) * mid:
            return True
        if lhs_core * lo.denominator ** (2 * n) <= lo.numerator ** (2 * n) * mid:
            return False
        terms *= 2


def threshold_condition_holds(m: int, n: int) -> bool:
    """Whether m vectors in R^n are forced balancing by the counting bound."""
    if m < 1 or n < 1:
        raise ParameterError("need m >= 1 and n >= 1")
    rhs = n * (_LOG2_E + math.log2(m + 2 * n) - math.log2(n)
               + 0.5 * math.log2(n + 1))
    pad = _FLOAT_GUARD * abs(rhs) + _FLOAT_GUARD
    if m > rhs + pad:
        return True
    if m < rhs - pad:
        return False
    return _threshold_exact(m, n)


def prop1_threshold(n: int, cap: int = DEFAULT_THRESHOLD_CAP) -> int | None:
    """Smallest m with 2^m > (e(m/n+2) sqrt(n+1))^n, or None beyond the cap.

    The condition is monotone in m (the left side doubles per step while the
    right side grows by at most sqrt(e)), so a binary search applies.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    lo, hi = 0, 1
    while not threshold_condition_holds(hi, n):
        lo = hi
        if hi >= cap:
            return None
        hi = min(hi * 2, cap)
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if threshold_condition_holds(mid, n):
            hi = mid
        else:
            lo = mid
    return hi


def _volume_exact(m: int, n: int) -> bool:
    """Certified truth of C(m+2n, n) < (e(m/n+2))^n."""
    lhs = math.comb(m + 2 * n, n) * n ** n
    mid = (m + 2 * n) ** n
    terms = 30
    while True:
        lo, hi = _e_enclosure(terms)
        if lhs * lo.denominator ** n < lo.numerator ** n * mid:
            return True
        if lhs * hi.denominator ** n >= hi.numerator ** n * mid:
            return False
        terms *= 2


def binomial_volume_bound_holds(m: int, n: int) -> bool:
    """Exact check of C(m+2n, n) < (e(alpha+2))^n with alpha = m/n."""
    if m < 1 or n < 1:
        raise ParameterError("need m >= 1 and n >= 1")
    lhs = math.log2(math.comb(m + 2 * n, n))
    rhs = n * (_LOG2_E + math.log2(m + 2 * n) - math.log2(n))
    pad = _FLOAT_GUARD * (abs(lhs) + abs(rhs)) + _FLOAT_GUARD
    if lhs < rhs - pad:
        return True
    if lhs > rhs + pad:
        return False
    return _volume_exact(m, n)


def shell_pigeonhole_bound(d: int, D: int) -> Fraction:
    """((2D+1)^d - 1) / (d D^2): guaranteed cardinality of the best shell."""
    if d < 1 or D < 1:
        raise ParameterError("need d >= 1 and D >= 1")
    return Fraction((2 * D + 1) ** d - 1, d * D * D)


def shell_bound_beats_power(d: int) -> bool:
    """With D = 2^d, whether the pigeonhole bound exceeds 4^((d^2-d-log2 d)/2).

    Equivalent integer form: bound^2 * d^2 > 4^(d^2 - d), since
    4^(log2 d) = d^2.  Exact for every d >= 2.
    """
    if d < 2:
        raise ParameterError("comparison needs d >= 2")
    bound = shell_pigeonhole_bound(d, 2 ** d)
    lhs = bound.numerator ** 2 * d * d
    rhs = 4 ** (d * d - d) * bound.denominator ** 2
    return lhs > rhs


# ---------------------------------------------------------------------------
# sigma(n) bracketing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaBracket:
    """Bracket for one dimension: lower_m vectors exist that are not
    balancing (so sigma(n) > lower_m), upper_m forces balancing
    (sigma(n) <= upper_m)."""

    n: int
    lower_m: int | None
    lower_source: str | None
    upper_m: int | None
    lower_ratio: float | None
    upper_ratio: float | None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "lower_m": self.lower_m,
            "lower_source": self.lower_source,
            "upper_m": self.upper_m,
            "lower_ratio": self.lower_ratio,
            "upper_ratio": self.upper_ratio,
        }


def _int_root(n: int, d: int) -> int:
    """Largest L with L^d <= n."""
    if d == 1:
        return n
    L = int(round(n ** (1.0 / d)))
    while L ** d > n:
        L -= 1
    while (L + 1) ** d <= n:
        L += 1
    return L


def best_lower_family(n: int, d_limit: int = 4,
                      budget: int = DEFAULT_POINT_BUDGET) -> tuple[int, str]:
    """Largest known non-balancing family embeddable in R^n by zero padding.

    Candidates: the single unit vector (never balancing: the inequality is
    strict), the 34-vector example in R^25, and generated instances for each
    lattice dimension d with the planner's box D = 2^d, taking the largest
    side L with L^d <= n (L >= 2^d keeps the growth exponent above 1).
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    best, source = 1, "single-unit-vector"
    if n >= 25:
        if 34 > best:
            best, source = 34, "figure-34"
    for d in range(1, d_limit + 1):
        D = 2 ** d
        if (2 * D + 1) ** d > budget:
            break
        _rsq, size, r = shell_profile(d, D, budget)
        k = 0
        while 4 ** (k + 1) <= size:
            k += 1
        L = _int_root(n, d)
        if L < max(D, 2 * r + 1):
            continue
        m = (k + 1) * (L - 2 * r) ** d
        if m > best:
            best, source = m, f"construction(d={d},L={L})"
    return best, source


def sigma_bracket(n: int, cap: int = DEFAULT_THRESHOLD_CAP,
                  d_limit: int = 4,
                  budget: int = DEFAULT_POINT_BUDGET) -> SigmaBracket:
    """Both sides of the bracket plus their ratios against n log2 n."""
    lower_m, source = best_lower_family(n, d_limit, budget)
    upper_m = prop1_threshold(n, cap)
    denom = n * math.log2(n) if n > 1 else 0.0
    lower_ratio = lower_m / denom if denom else None
    upper_ratio = upper_m / denom if (upper_m is not None and denom) else None
    return SigmaBracket(n, lower_m, source, upper_m, lower_ratio, upper_ratio)
