"""Real-number oracles with certified enclosures.

An oracle stands for one well-defined real number and can produce arbitrarily
tight rational enclosures of it on demand. Requests are rounded up to dyadic
precision levels (64, 128, 256, ...) and the published enclosure at a level is
the intersection of the raw enclosures at every level up to it, so refinement
is monotone: higher-precision answers always nest inside lower-precision ones.

The string grammar accepted by :func:`parse_oracle`:

    rat:<p>/<q>
    const:<name>         (sqrt2, sqrt3, sqrt5, golden, log2, zeta2, zeta3, e)
    cf:[a0;a1,a2,...]
    cf:[a0;a1,...]+periodic:[b1,...]
    cf:liouville:<B>
    affine:<a>/<b>:<oracle>

Rationals may be written p/q, as plain integers, or as exact decimal strings.
"""

from __future__ import annotations

import os
import re
from fractions import Fraction
from math import factorial
from typing import Optional

from .enclosure import Enclosure, Rat, _frac, sqrt_enclosure
from .certlog import _ln2_fixed
from .errors import HalfInteger, Inconclusive, PreconditionError, Unrepresentable

DEFAULT_PRECISION_CAP = 1 << 20
_MIN_LEVEL = 64


def resolve_cap(cap: Optional[int] = None) -> int:
    """Effective precision cap: explicit argument, else env, else default."""
    if cap is not None:
        return cap
    env = os.environ.get("DIOPH_PRECISION_CAP")
    if env:
        return int(env)
    return DEFAULT_PRECISION_CAP


def level_for(k: int) -> int:
    L = _MIN_LEVEL
    while L < k:
        L *= 2
    return L


class RealOracle:
    """Base class. Subclasses implement ``_raw(k)`` with width <= 2**-k."""

    spec: str = "?"

    def __init__(self):
        self._canon: dict[int, Enclosure] = {}

    def _raw(self, k: int) -> Enclosure:
        raise NotImplementedError

    def enclose(self, k: int) -> Enclosure:
        """Canonical enclosure with width <= 2**-k, monotone in k."""
        if k < 1:
            raise PreconditionError("BAD_PRECISION", f"precision {k} must be >= 1")
        L = level_for(k)
        got = self._canon.get(L)
        if got is not None:
            return got
        levels = [L]
        while levels[-1] > _MIN_LEVEL:
            levels.append(levels[-1] // 2)
        acc = None
        for lv in reversed(levels):
            cached = self._canon.get(lv)
            if cached is not None:
                acc = cached
                continue
            raw = self._raw(lv)
            acc = raw if acc is None else acc.intersect(raw)
            self._canon[lv] = acc
        return self._canon[L]

    def exact_value(self) -> Optional[Fraction]:
        """The exact rational value when the oracle is rational, else None."""
        return None

    def __repr__(self):
        return f"<oracle {self.spec}>"


class RationalOracle(RealOracle):
    def __init__(self, value: Rat, spec: Optional[str] = None):
        super().__init__()
        self.value = _frac(value)
        self.spec = spec or f"rat:{self.value.numerator}/{self.value.denominator}"

    def _raw(self, k: int) -> Enclosure:
        return Enclosure.point(self.value)

    def exact_value(self) -> Optional[Fraction]:
        return self.value


class SqrtOracle(RealOracle):
    def __init__(self, n: int, name: str):
        super().__init__()
        self.n = n
        self.spec = f"const:{name}"

    def _raw(self, k: int) -> Enclosure:
        return sqrt_enclosure(self.n, k + 2)


class GoldenOracle(RealOracle):
    spec = "const:golden"

    def _raw(self, k: int) -> Enclosure:
        s = sqrt_enclosure(5, k + 4)
        return (s + 1) * Fraction(1, 2)


def _series_pad(k: int) -> int:
    """Working-precision pad absorbing one truncation ulp per series term.

    Term counts grow linearly in the bit budget, so a constant pad stops
    meeting the width contract once k is large; k.bit_length() extra bits
    keep (terms * ulp) below 2**-k at every k.
    """
    return 8 + (k + 8).bit_length()


class Log2Oracle(RealOracle):
    spec = "const:log2"

    def _raw(self, k: int) -> Enclosure:
        w = k + _series_pad(k)
        lo, hi = _ln2_fixed(w)
        sc = Fraction(1, 1 << w)
        return Enclosure(lo * sc, hi * sc)


class EOracle(RealOracle):
    spec = "const:e"

    def _raw(self, k: int) -> Enclosure:
        w = k + _series_pad(k)
        term = 1 << w
        total = term
        n = 1
        while term:
            term //= n
            total += term
            n += 1
        sc = Fraction(1, 1 << w)
        return Enclosure(total * sc, (total + n + 2) * sc)


class Zeta2Oracle(RealOracle):
    """3 * sum 1/(n^2 C(2n,n)); term ratio < 1/4 gives the tail bound."""

    spec = "const:zeta2"

    def _raw(self, k: int) -> Enclosure:
        w = k + _series_pad(k)
        c = 1
        total = 0
        n = 1
        while True:
            c = c * (2 * (2 * n - 1)) // n
            t = (1 << w) // (n * n * c)
            if t == 0:
                break
            total += t
            n += 1
        sc = Fraction(3, 1 << w)
        return Enclosure(total * sc, (total + n + 2) * sc)


class Zeta3Oracle(RealOracle):
    """(5/2) * sum (-1)^(n-1)/(n^3 C(2n,n)), alternating."""

    spec = "const:zeta3"

    def _raw(self, k: int) -> Enclosure:
        w = k + _series_pad(k)
        c = 1
        total = 0
        sign = 1
        n = 1
        while True:
            c = c * (2 * (2 * n - 1)) // n
            t = (1 << w) // (n * n * n * c)
            if t == 0:
                break
            total += sign * t
            sign = -sign
            n += 1
        slack = n + 2
        sc = Fraction(5, 2 << w)
        return Enclosure((total - slack) * sc, (total + slack) * sc)


class CFOracle(RealOracle):
    """Value defined by its continued-fraction quotients.

    Three quotient sources: a finite explicit list (the value is rational and
    the expansion terminates), an explicit prefix followed by a repeating
    periodic block, or the rule a_j = B**(j!) for j >= 1 with a_0 = 0,
    truncated at a configurable index bound (quotients past the bound raise
    UNREPRESENTABLE since their sizes grow beyond any usable precision).
    """

    LIOUVILLE_DEFAULT_CAP = 8

    def __init__(self, prefix, periodic=None, liouville_base=None, liouville_cap=None):
        super().__init__()
        self.periodic = list(periodic) if periodic else None
        self.liouville_base = liouville_base
        self.liouville_cap = (
            self.LIOUVILLE_DEFAULT_CAP if liouville_cap is None else liouville_cap
        )
        if liouville_base is not None:
            if liouville_base < 2:
                raise PreconditionError(
                    "BAD_CF", f"liouville base {liouville_base} must be >= 2"
                )
            self.prefix = [0]
            self.spec = f"cf:liouville:{liouville_base}"
        else:
            self.prefix = [int(a) for a in prefix]
            if not self.prefix:
                raise PreconditionError("BAD_CF", "empty quotient list")
            if self.prefix[0] < 0:
                raise PreconditionError("BAD_CF", "a0 must be >= 0")
            if any(a < 1 for a in self.prefix[1:]):
                raise PreconditionError("BAD_CF", "quotients after a0 must be >= 1")
            body = ";".join(
                [str(self.prefix[0])] + ([",".join(map(str, self.prefix[1:]))] if len(self.prefix) > 1 else [])
            )
            self.spec = f"cf:[{body}]"
            if self.periodic:
                if any(a < 1 for a in self.periodic):
                    raise PreconditionError("BAD_CF", "periodic quotients must be >= 1")
                self.spec += "+periodic:[" + ",".join(map(str, self.periodic)) + "]"
        self._conv: list[tuple[int, int]] = []

    def is_finite(self) -> bool:
        return self.periodic is None and self.liouville_base is None

    def quotient(self, j: int) -> int:
        if self.liouville_base is not None:
            if j == 0:
                return 0
            if j > self.liouville_cap:
                raise Unrepresentable(
                    f"liouville quotient index {j} exceeds the bound "
                    f"{self.liouville_cap}"
                )
            return self.liouville_base ** factorial(j)
        if j < len(self.prefix):
            return self.prefix[j]
        if self.periodic:
            return self.periodic[(j - len(self.prefix)) % len(self.periodic)]
        raise IndexError(j)

    def quotient_count(self) -> Optional[int]:
        """Number of quotients when finite, else None."""
        if self.is_finite():
            return len(self.prefix)
        if self.liouville_base is not None:
            return self.liouville_cap + 1
        return None

    def _convergent(self, j: int) -> tuple[int, int]:
        while len(self._conv) <= j:
            i = len(self._conv)
            a = self.quotient(i)
            if i == 0:
                self._conv.append((a, 1))
            elif i == 1:
                self._conv.append((a * self._conv[0][0] + 1, a))
            else:
                p1, q1 = self._conv[i - 1]
                p2, q2 = self._conv[i - 2]
                self._conv.append((a * p1 + p2, a * q1 + q2))
        return self._conv[j]

    def _raw(self, k: int) -> Enclosure:
        n = self.quotient_count()
        if self.is_finite():
            p, q = self._convergent(n - 1)
            return Enclosure.point(Fraction(p, q))
        j = 1
        while True:
            if n is not None and j >= n:
                raise Unrepresentable(
                    f"{self.spec}: available quotients give width above 2**-{k}"
                )
            p0, q0 = self._convergent(j - 1)
            p1, q1 = self._convergent(j)
            if q0 * q1 >= 1 << k:
                a, b = Fraction(p0, q0), Fraction(p1, q1)
                return Enclosure(min(a, b), max(a, b))
            j += 1

    def exact_value(self) -> Optional[Fraction]:
        if self.is_finite():
            p, q = self._convergent(len(self.prefix) - 1)
            return Fraction(p, q)
        return None


class AffineOracle(RealOracle):
    def __init__(self, a: Rat, b: Rat, inner: RealOracle):
        super().__init__()
        self.a = _frac(a)
        self.b = _frac(b)
        if self.a == 0:
            raise PreconditionError("BAD_AFFINE", "scale a must be nonzero")
        self.inner = inner
        self.spec = (
            f"affine:{self.a.numerator}/{self.a.denominator}"
            f"/{self.b.numerator}/{self.b.denominator}:{inner.spec}"
        )

    def _raw(self, k: int) -> Enclosure:
        extra = (abs(self.a.numerator) // self.a.denominator + 1).bit_length() + 2
        return self.inner.enclose(k + extra) * self.a + self.b

    def exact_value(self) -> Optional[Fraction]:
        v = self.inner.exact_value()
        return None if v is None else self.a * v + self.b


CATALOG = {
    "sqrt2": lambda: SqrtOracle(2, "sqrt2"),
    "sqrt3": lambda: SqrtOracle(3, "sqrt3"),
    "sqrt5": lambda: SqrtOracle(5, "sqrt5"),
    "golden": GoldenOracle,
    "log2": Log2Oracle,
    "zeta2": Zeta2Oracle,
    "zeta3": Zeta3Oracle,
    "e": EOracle,
}


def parse_rational(text: str) -> Fraction:
    """p/q, integer, or exact decimal string."""
    s = text.strip()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError("BAD_RATIONAL", f"cannot parse rational {text!r}") from exc


_CF_LIST = re.compile(r"^\[(-?\d+)(?:;((?:\d+)(?:,\d+)*))?\]$")
_INT_LIST = re.compile(r"^\[(\d+(?:,\d+)*)\]$")


def _parse_cf_body(body: str):
    m = _CF_LIST.match(body.strip())
    if not m:
        raise PreconditionError("BAD_CF", f"cannot parse CF list {body!r}")
    quots = [int(m.group(1))]
    if m.group(2):
        quots.extend(int(x) for x in m.group(2).split(","))
    return quots


def _parse_int_list(body: str):
    m = _INT_LIST.match(body.strip())
    if not m:
        raise PreconditionError("BAD_CF", f"cannot parse quotient block {body!r}")
    return [int(x) for x in m.group(1).split(",")]


def parse_oracle(spec: str) -> RealOracle:
    s = spec.strip()
    if s.startswith("rat:"):
        return RationalOracle(parse_rational(s[4:]))
    if s.startswith("const:"):
        name = s[6:].strip()
        if name not in CATALOG:
            raise PreconditionError(
                "BAD_CONST", f"unknown constant {name!r}; have {sorted(CATALOG)}"
            )
        return CATALOG[name]()
    if s.startswith("cf:"):
        rest = s[3:]
        if rest.startswith("liouville:"):
            return CFOracle(None, liouville_base=int(rest[len("liouville:"):]))
        if "+periodic:" in rest:
            head, tail = rest.split("+periodic:", 1)
            return CFOracle(_parse_cf_body(head), periodic=_parse_int_list(tail))
        return CFOracle(_parse_cf_body(rest))
    if s.startswith("affine:"):
        rest = s[7:]
        idx = rest.find(":")
        if idx < 0:
            raise PreconditionError("BAD_AFFINE", f"missing inner oracle in {spec!r}")
        head, inner = rest[:idx], rest[idx + 1:]
        fields = head.split("/")
        if len(fields) == 2:
            a, b = parse_rational(fields[0]), parse_rational(fields[1])
        elif len(fields) == 4:
            a = Fraction(int(fields[0]), int(fields[1]))
            b = Fraction(int(fields[2]), int(fields[3]))
        else:
            raise PreconditionError(
                "BAD_AFFINE",
                f"{head!r} is ambiguous; use a/b with integers or "
                "a_num/a_den/b_num/b_den",
            )
        return AffineOracle(a, b, parse_oracle(inner))
    raise PreconditionError("BAD_ORACLE", f"cannot parse oracle spec {spec!r}")


def sign_of_form(oracle: RealOracle, q: Rat, p: Rat, cap: Optional[int] = None) -> int:
    """Certified sign of q*xi - p; INCONCLUSIVE if the cap is reached first."""
    q = _frac(q)
    p = _frac(p)
    v = oracle.exact_value()
    if v is not None:
        t = q * v - p
        return (t > 0) - (t < 0)
    cap = resolve_cap(cap)
    k = _MIN_LEVEL
    while k <= cap:
        enc = oracle.enclose(k) * q - p
        s = enc.sign()
        if s is not None:
            return s
        k *= 2
    raise Inconclusive(f"sign of {q}*({oracle.spec}) - {p} undecided", cap)


def nearest_int(oracle: RealOracle, u: Rat, cap: Optional[int] = None):
    """(v, dist) with v the certified nearest integer to u*xi.

    ``dist`` is an enclosure of |u*xi - v|. Exactly half-integer products (only
    possible for rational oracles) raise HALF_INTEGER since the nearest
    integer is then ill-defined.
    """
    u = _frac(u)
    v = oracle.exact_value()
    if v is not None:
        t = u * v
        twice = 2 * t
        if twice.denominator == 1 and twice.numerator % 2 != 0:
            raise HalfInteger(f"{u}*{oracle.spec} is exactly half-integral")
        m = (t + Fraction(1, 2)).__floor__()
        return m, Enclosure.point(abs(t - m))
    cap = resolve_cap(cap)
    k = _MIN_LEVEL
    while k <= cap:
        enc = oracle.enclose(k) * u
        m = (enc.lo + Fraction(1, 2)).__floor__()
        if enc.hi < m + Fraction(1, 2):
            return m, (enc - m).abs()
        k *= 2
    raise Inconclusive(f"nearest integer to {u}*({oracle.spec}) undecided", cap)


def floor_certified(oracle: RealOracle, cap: Optional[int] = None) -> int:
    v = oracle.exact_value()
    if v is not None:
        return v.__floor__()
    cap = resolve_cap(cap)
    k = _MIN_LEVEL
    while k <= cap:
        m = oracle.enclose(k).floor_unique()
        if m is not None:
            return m
        k *= 2
    raise Inconclusive(f"floor of {oracle.spec} undecided", cap)
