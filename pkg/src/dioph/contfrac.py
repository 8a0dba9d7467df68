"""Certified continued-fraction expansion and convergents.

``expand`` produces the first ``depth`` quotients of an oracle's value. For
oracles defined directly by their quotients the generator is consulted (the
output is bit-exact by definition); for exactly rational oracles the Euclidean
algorithm runs and the expansion is flagged terminated; otherwise quotients
are extracted by the floor-and-invert recurrence in integer Mobius form
applied to a base enclosure, restarting at doubled precision whenever a floor
is not yet determined by the interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .certlog import ln_frac
from .enclosure import Enclosure
from .errors import Degenerate, Inconclusive
from .oracle import CFOracle, RealOracle, _MIN_LEVEL, resolve_cap


@dataclass(frozen=True)
class CFExpansion:
    quotients: tuple
    certified: bool
    terminated: bool


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class MuEstimate:
    mu_lower: Fraction
    depth: int
    witness_index: Optional[int]


def _expand_rational(value: Fraction, depth: int) -> CFExpansion:
    p, q = value.numerator, value.denominator
    quots = []
    while q and len(quots) < depth:
        a, r = divmod(p, q)
        quots.append(a)
        p, q = q, r
    return CFExpansion(tuple(quots), certified=True, terminated=(q == 0))


def expand(oracle: RealOracle, depth: int, cap: Optional[int] = None) -> CFExpansion:
    """Quotients a_0 .. a_depth of the value of ``oracle``.

    Depth counts quotients after a_0, so the result holds depth + 1 values.
    Rational values yield their full (possibly shorter) expansion with
    ``terminated`` set. Raises INCONCLUSIVE if the precision cap is hit and
    UNREPRESENTABLE if a quotient generator runs out.
    """
    if depth < 0:
        raise Degenerate(f"depth {depth} must be >= 0")
    count = depth + 1
    if isinstance(oracle, CFOracle):
        if oracle.is_finite():
            n = min(count, len(oracle.prefix))
            return CFExpansion(
                tuple(oracle.prefix[:n]),
                certified=True,
                terminated=(n == len(oracle.prefix)),
            )
        quots = tuple(oracle.quotient(j) for j in range(count))
        return CFExpansion(quots, certified=True, terminated=False)
    v = oracle.exact_value()
    if v is not None:
        return _expand_rational(v, count)
    cap = resolve_cap(cap)
    k = _MIN_LEVEL
    while k <= cap:
        enc = oracle.enclose(k)
        quots = []
        A, B, C, D = 1, 0, 0, 1
        while len(quots) < count:
            den = enc * C + D
            if den.contains_zero():
                break
            y = (enc * A + B) / den
            a = y.floor_unique()
            if a is None:
                break
            quots.append(a)
            A, B, C, D = C, D, A - a * C, B - a * D
        if len(quots) == count:
            return CFExpansion(tuple(quots), certified=True, terminated=False)
        k *= 2
    raise Inconclusive(f"CF expansion of {oracle.spec} stalled at depth {depth}", cap)


def convergents(cf: CFExpansion) -> list:
    """Convergent list p_k/q_k for the expansion, lowest terms guaranteed."""
    out = []
    p1, q1 = 1, 0
    p0, q0 = 0, 1
    for i, a in enumerate(cf.quotients):
        p1, q1, p0, q0 = a * p1 + p0, a * q1 + q0, p1, q1
        out.append(Convergent(p1, q1, i))
    return out


def mu_estimate(oracle: RealOracle, depth: int, cap: Optional[int] = None) -> MuEstimate:
    """Finite-depth irrationality-exponent lower estimate.

    Pointwise exponents 1 + ln(q_{k+1}) / ln(q_k) are evaluated over the top
    half of the explored convergent ladder (skipping q_k < 2) and the maximum
    is reported with directed-down rounding, together with the index at which
    it was witnessed. Rational values have no such exponent and raise
    DEGENERATE.
    """
    if depth < 2:
        raise Degenerate(f"depth {depth} must be >= 2")
    cf = expand(oracle, depth, cap=cap)
    if cf.terminated:
        raise Degenerate(f"{oracle.spec} is rational; exponent ladder undefined")
    cons = convergents(cf)
    n = len(cons)
    best: Optional[Fraction] = None
    best_k: Optional[int] = None
    for k in range(n // 2, n - 1):
        qk, qk1 = cons[k].q, cons[k + 1].q
        if qk < 2:
            continue
        ratio = 1 + ln_frac(qk1, 96).lo / ln_frac(qk, 96).hi
        if best is None or ratio > best:
            best, best_k = ratio, k
    if best is None:
        return MuEstimate(Fraction(2), depth, None)
    return MuEstimate(best, depth, best_k)
