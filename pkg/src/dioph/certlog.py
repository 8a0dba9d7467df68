"""Certified natural logarithm with directed rational bounds.

``ln_frac(x, k)`` returns an :class:`Enclosure` of ln(x) for rational x > 0
with width at most about 2**-k. The reduction is x = 2**e * m with m in
[1, 2), ln m = 2 atanh((m-1)/(m+1)) summed in fixed point with per-term
directed rounding and an explicit ulp budget, ln 2 from the series
sum 1/(n 2**n) with a geometric tail bound. No floating point is involved, so
results are deterministic and safe to use in certificates.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .enclosure import Enclosure, Rat, _frac


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@lru_cache(maxsize=None)
def _ln2_fixed(w: int):
    """(lo, hi) integers with lo/2^w <= ln 2 <= hi/2^w."""
    total = 0
    n = 1
    while n <= w:
        total += (1 << (w - n)) // n
        n += 1
    # Each of the w terms was floored (loss < 1 apiece) and the dropped tail
    # is below 2^(w-N)/(N+1) < 1 at N = w.
    return total, total + w + 2


@lru_cache(maxsize=None)
def _atanh_fixed(num: int, den: int, w: int):
    """(lo, hi) integers bounding atanh(num/den) * 2^w, for 0 <= num/den <= 1/3."""
    if num == 0:
        return 0, 0
    z_lo = (num << w) // den
    z_hi = _ceil_div(num << w, den)
    z2_lo = (z_lo * z_lo) >> w
    z2_hi = _ceil_div(z_hi * z_hi, 1 << w)
    p_lo, p_hi = z_lo, z_hi
    sum_lo = 0
    sum_hi = 0
    terms = 0
    odd = 1
    while p_hi > 1:
        sum_lo += p_lo // odd
        sum_hi += _ceil_div(p_hi, odd)
        p_lo = (p_lo * z2_lo) >> w
        p_hi = _ceil_div(p_hi * z2_hi, 1 << w)
        odd += 2
        terms += 1
    # Tail after the last added term: geometric with ratio z^2 <= 1/9, so the
    # remaining mass is below 2 * p_hi <= 2; add the per-term flooring budget.
    return sum_lo, sum_hi + terms + 4


def ln_frac(x: Rat, k: int) -> Enclosure:
    """Enclosure of ln(x) for rational x > 0, width about 2**-k."""
    f = _frac(x)
    if f <= 0:
        raise ValueError("ln of a nonpositive rational")
    e = f.numerator.bit_length() - f.denominator.bit_length()
    m = f / Fraction(2) ** e
    if m >= 2:
        e += 1
        m /= 2
    elif m < 1:
        e -= 1
        m *= 2
    w = k + 32 + abs(e).bit_length()
    lo2, hi2 = _ln2_fixed(w)
    scale = Fraction(1, 1 << w)
    ln2 = Enclosure(lo2 * scale, hi2 * scale)
    out = ln2 * e
    if m != 1:
        z = (m - 1) / (m + 1)
        alo, ahi = _atanh_fixed(z.numerator, z.denominator, w)
        out = out + Enclosure(2 * alo * scale, 2 * ahi * scale)
    return out


def ln_enclosure(x, k: int) -> Enclosure:
    """Enclosure of ln over a rational point or an Enclosure with lo > 0."""
    if isinstance(x, Enclosure):
        if x.lo <= 0:
            raise ValueError("ln of an enclosure touching (-inf, 0]")
        if x.is_point():
            return ln_frac(x.lo, k)
        return Enclosure(ln_frac(x.lo, k).lo, ln_frac(x.hi, k).hi)
    return ln_frac(x, k)
