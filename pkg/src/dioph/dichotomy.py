"""Two-case approximation dichotomy and fractional-window search.

Given parameters (c, c', eps, Q) with 1 < c < c', 0 < eps < 1, Q > 1 and a
real value xi, one of two certificates is produced:

- case (ii): an integer pair (q, p) with Q <= q <= c Q, p the nearest integer
  to q xi, and eps <= |q xi - p| < c' eps; searched first and returned with
  the smallest such q;
- case (i): a reduced fraction v/u with u below an explicit bound and
  |u xi - v| within an explicit distance bound, found by scanning the
  convergents and semiconvergents of xi in increasing denominator order.

The distance band of case (ii) translates into at most two windows for the
fractional part of q xi, one on each side of 1/2. The window search is exact
at every size: rational xi reduces to a residue-class query solved by
Euclidean descent in O(log) steps; irrational xi is replaced by a convergent
surrogate whose error is below one eighth of the window, candidate q are
enumerated in increasing order on the enlarged surrogate window, and each
candidate is verified against the true value with certified enclosures, so
the first verified hit is the true minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .contfrac import convergents, expand
from .enclosure import Enclosure, Rat, _frac
from .errors import (
    Inconclusive,
    NeitherCaseCertified,
    PreconditionError,
    RangeTooLarge,
    Unrepresentable,
)
from .oracle import CFOracle, RealOracle, _MIN_LEVEL, resolve_cap

DIRECT_THRESHOLD = 4096
DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class LemmaParams:
    c: Fraction
    c_prime: Fraction
    eps: Fraction
    Q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", _frac(self.c))
        object.__setattr__(self, "c_prime", _frac(self.c_prime))
        object.__setattr__(self, "eps", _frac(self.eps))
        object.__setattr__(self, "Q", _frac(self.Q))
        if not (1 < self.c < self.c_prime < 2):
            raise PreconditionError(
                "BAD_PARAMS",
                f"need 1 < c < c' < 2, got c={self.c}, c'={self.c_prime}",
            )
        if not (0 < self.eps < 1):
            raise PreconditionError("BAD_PARAMS", f"need 0 < eps < 1, got {self.eps}")
        if not self.Q > 1:
            raise PreconditionError("BAD_PARAMS", f"need Q > 1, got {self.Q}")

    @property
    def bound_u(self) -> Fraction:
        """Denominator bound for case (i)."""
        c, cp = self.c, self.c_prime
        return (2 * c * c) / ((c - 1) * (cp - c)) / self.eps

    @property
    def dist_factor(self) -> Fraction:
        """B with |xi - v/u| <= B / (u Q), i.e. |u xi - v| <= B / Q."""
        c, cp = self.c, self.c_prime
        return (2 / (c - 1)) * (1 + c * c / (cp - c))


@dataclass(frozen=True)
class CaseIWitness:
    u: int
    v: int
    bound_u: Fraction
    bound_dist: Fraction


@dataclass(frozen=True)
class CaseIIWitness:
    q: int
    p: int  # nearest integer to q xi


@dataclass(frozen=True)
class SearchStats:
    candidates: int
    precision_bits: int


@dataclass(frozen=True)
class DisjunctionResult:
    outcome: str  # "case_i" or "case_ii"
    witness: Union[CaseIWitness, CaseIIWitness]
    residual: Optional[Enclosure]  # enclosure of q xi - p for case (ii), signed
    stats: SearchStats


class _Stats:
    __slots__ = ("candidates", "bits")

    def __init__(self):
        self.candidates = 0
        self.bits = 0

    def bump_bits(self, k: int):
        if k > self.bits:
            self.bits = k

    def frozen(self) -> SearchStats:
        return SearchStats(self.candidates, self.bits)


def _first_hit(a: int, b: int, m: int, c: int) -> Optional[int]:
    """Minimal t >= 0 with (a t + b) mod m < c, or None. Euclidean descent.

    When a > m/2 the problem is mirrored first (y -> c - 1 - y maps the hit
    set onto itself with multiplier m - a), so the modulus at least halves
    every other level; without this the descent is linear in m when m/a has
    partial quotient 1. The descent is run on an explicit stack because the
    depth, though logarithmic, can exceed the interpreter limit for the
    enormous denominators of near-rational values.
    """
    if c <= 0:
        return None
    stack = []
    t = None
    while True:
        if c >= m:
            t = 0
            break
        a %= m
        b %= m
        if b < c:
            t = 0
            break
        if a == 0:
            break
        if 2 * a > m:
            a, b = m - a, (c - 1 - b) % m
            continue
        x0 = -((b - m) // a)  # ceil((m - b) / a), first wrap
        w1 = a * x0 + b - m
        if w1 < c:
            t = x0
            break
        r = (-m) % a
        stack.append((a, m, x0, w1, r))
        a, b, m = r, w1, a
    if t is None:
        return None
    while stack:
        a, m, x0, w1, r = stack.pop()
        wj = (w1 + t * r) % a
        t = x0 + (t * m + wj - w1) // a
    return t


def _residue_hits(a: int, b: int, m: int, lo: int, hi: int, t_max: int):
    """Yield ascending t in [0, t_max] with (a t + b) mod m in [lo, hi]."""
    if lo > hi:
        return
    width = hi - lo + 1
    base = (b - lo) % m
    t = _first_hit(a % m, base, m, width)
    while t is not None and t <= t_max:
        yield t
        step = _first_hit(a % m, (base + a * (t + 1)) % m, m, width)
        t = None if step is None else t + 1 + step


def _merge_ascending(*iters):
    heads = []
    its = []
    for it in iters:
        it = iter(it)
        nxt = next(it, None)
        if nxt is not None:
            heads.append(nxt)
            its.append(it)
    while heads:
        i = min(range(len(heads)), key=lambda j: heads[j])
        yield heads[i]
        nxt = next(its[i], None)
        if nxt is None:
            del heads[i], its[i]
        else:
            heads[i] = nxt


def _frac_window_check(oracle, q, t_lo, t_hi, cap, stats):
    """(hit, p) deciding whether frac(q xi) lies in [t_lo, t_hi].

    Irrational membership is certified strictly inside the open window;
    endpoint cases exist only for rational oracles and are decided exactly.
    """
    stats.candidates += 1
    v = oracle.exact_value()
    if v is not None:
        t = q * v
        p = t.__floor__()
        return t_lo <= t - p <= t_hi, p
    k = _MIN_LEVEL
    while k <= cap:
        stats.bump_bits(k)
        enc = oracle.enclose(k) * q
        p = enc.floor_unique()
        if p is not None:
            f = enc - p
            if f.lo > t_lo and f.hi < t_hi:
                return True, p
            if f.hi < t_lo or f.lo > t_hi:
                return False, p
        k *= 2
    raise Inconclusive(f"window membership for q={q} undecided", cap)


def _safe_expand(oracle: RealOracle, total: int):
    """expand() for ``total`` quotients, clamped to the supply of truncated
    CF generators. Callers here count quotients including a_0."""
    if isinstance(oracle, CFOracle):
        n = oracle.quotient_count()
        if n is not None:
            total = min(total, n)
    return expand(oracle, total - 1)


def _surrogate(oracle: RealOracle, accuracy_den: int):
    """A convergent p_K/q_K of xi with q_K q_{K+1} >= accuracy_den."""
    depth = 16
    while True:
        cf = _safe_expand(oracle, depth)
        cons = convergents(cf)
        for i in range(1, len(cons)):
            if cons[i - 1].q * cons[i].q >= accuracy_den:
                return cons[i - 1]
        if cf.terminated:
            return cons[-1]
        if len(cf.quotients) < depth:
            raise Unrepresentable(
                f"{oracle.spec}: quotient supply too small for a surrogate of "
                f"accuracy 1/{accuracy_den}"
            )
        depth *= 2


def find_fractional_hit(
    oracle: RealOracle,
    q_lo: Rat,
    q_hi: Rat,
    t_lo: Rat,
    t_hi: Rat,
    structured: bool = True,
    budget: int = DEFAULT_BUDGET,
    cap: Optional[int] = None,
):
    """Smallest integer q in [q_lo, q_hi] with frac(q xi) in [t_lo, t_hi].

    Returns (q, p) with p = floor(q xi), or None when no q qualifies. With
    ``structured=False`` only direct enumeration is used and ranges longer
    than ``budget`` raise RANGE_TOO_LARGE.
    """
    t_lo, t_hi = _frac(t_lo), _frac(t_hi)
    if not (0 < t_lo < t_hi < 1):
        raise PreconditionError(
            "BAD_WINDOW", f"need 0 < t_lo < t_hi < 1, got [{t_lo}, {t_hi}]"
        )
    stats = _Stats()
    return _find_hit(
        oracle, _frac(q_lo), _frac(q_hi), t_lo, t_hi, structured, budget,
        resolve_cap(cap), stats,
    )


def _find_hit(oracle, q_lo, q_hi, t_lo, t_hi, structured, budget, cap, stats):
    n_lo = max(1, q_lo.__ceil__())
    n_hi = q_hi.__floor__()
    if n_lo > n_hi or t_lo > t_hi:
        return None
    v = oracle.exact_value()
    if v is not None:
        a, m = v.numerator, v.denominator
        lo_i = (t_lo * m).__ceil__()
        hi_i = (t_hi * m).__floor__()
        for t in _residue_hits(a, n_lo * a, m, lo_i, hi_i, n_hi - n_lo):
            q = n_lo + t
            stats.candidates += 1
            return q, (q * v).__floor__()
        return None
    span = n_hi - n_lo
    if not structured:
        if span + 1 > budget:
            raise RangeTooLarge(
                f"range of {span + 1} exceeds budget {budget} with structured "
                "search disabled"
            )
        return _direct_scan(oracle, n_lo, n_hi, t_lo, t_hi, cap, stats)
    if span <= DIRECT_THRESHOLD:
        return _direct_scan(oracle, n_lo, n_hi, t_lo, t_hi, cap, stats)
    width = t_hi - t_lo
    delta = width / 8
    need = (8 * n_hi / width).__ceil__()
    sur = _surrogate(oracle, need)
    a, m = sur.p, sur.q
    lo_i = ((t_lo - delta) * m).__ceil__()
    hi_i = ((t_hi + delta) * m).__floor__()
    streams = [_residue_hits(a, n_lo * a, m, max(lo_i, 0), min(hi_i, m - 1), span)]
    if lo_i < 0:
        streams.append(_residue_hits(a, n_lo * a, m, m + lo_i, m - 1, span))
    if hi_i >= m:
        streams.append(_residue_hits(a, n_lo * a, m, 0, hi_i - m, span))
    seen = 0
    for t in _merge_ascending(*streams):
        seen += 1
        if seen > budget:
            raise RangeTooLarge(f"candidate stream exceeded budget {budget}")
        hit, p = _frac_window_check(oracle, n_lo + t, t_lo, t_hi, cap, stats)
        if hit:
            return n_lo + t, p
    return None


def _direct_scan(oracle, n_lo, n_hi, t_lo, t_hi, cap, stats):
    for q in range(n_lo, n_hi + 1):
        hit, p = _frac_window_check(oracle, q, t_lo, t_hi, cap, stats)
        if hit:
            return q, p
    return None


def _approx_fractions(oracle: RealOracle, u_limit: Fraction):
    """Convergents and semiconvergents (u, v) in increasing denominator order."""
    depth = 16
    while True:
        cf = _safe_expand(oracle, depth)
        cons = convergents(cf)
        if cf.terminated or cons[-1].q >= u_limit:
            break
        if len(cf.quotients) < depth:
            raise Unrepresentable(
                f"{oracle.spec}: quotient supply ends below denominator bound "
                f"{u_limit}"
            )
        depth *= 2
    out = []
    p_prev, q_prev = 1, 0
    for i, c in enumerate(cons):
        if i >= 1:
            a = cf.quotients[i]
            p0, q0 = cons[i - 1].p, cons[i - 1].q
            for j in range(1, a):
                u = q_prev + j * q0
                if u >= u_limit:
                    return out
                out.append((u, p_prev + j * p0))
            p_prev, q_prev = p0, q0
        if c.q >= u_limit:
            return out
        out.append((c.q, c.p))
    return out


def _certify_le(oracle, u, v, bound: Fraction, cap, stats) -> bool:
    """Certified |u xi - v| <= bound (inclusive)."""
    val = oracle.exact_value()
    if val is not None:
        return abs(u * val - v) <= bound
    k = _MIN_LEVEL
    while k <= cap:
        stats.bump_bits(k)
        d = (oracle.enclose(k) * u - v).abs()
        if d.hi <= bound:
            return True
        if d.lo > bound:
            return False
        k *= 2
    raise Inconclusive(f"distance certificate for {v}/{u} undecided", cap)


def _band_side_hit(
    oracle, q_from, q_to, lo, hi, lo_strict, hi_strict,
    structured, budget, cap, stats,
):
    """Minimal q with frac(q xi) in the window, honouring endpoint strictness.

    Strict endpoints only matter for rational values, where hits landing
    exactly on a strict endpoint are skipped and the search resumes at q + 1.
    Irrational hits are always certified strictly inside the window.
    """
    if lo > hi or (lo == hi and (lo_strict or hi_strict)):
        return None
    exact = oracle.exact_value()
    if lo == hi and exact is None:
        # an irrational fractional part never equals the rational endpoint
        return None
    cur = _frac(q_from)
    while True:
        hit = _find_hit(oracle, cur, q_to, lo, hi, structured, budget, cap, stats)
        if hit is None:
            return None
        q, p = hit
        if exact is None:
            return q, p
        f = q * exact - p
        if (lo_strict and f == lo) or (hi_strict and f == hi):
            cur = Fraction(q + 1)
            continue
        return q, p


def _residual_signed(oracle, q, p, eps, cpe, cap, stats):
    """(enclosure of q xi - p, certified eps <= |q xi - p| < c' eps)."""
    v = oracle.exact_value()
    if v is not None:
        r = q * v - p
        return Enclosure.point(r), eps <= abs(r) < cpe
    k = _MIN_LEVEL
    while k <= cap:
        stats.bump_bits(k)
        enc = oracle.enclose(k) * q - p
        a = enc.abs()
        if a.lo >= eps and a.hi < cpe:
            return enc, True
        if a.hi < eps or a.lo >= cpe:
            return enc, False
        k *= 2
    raise Inconclusive(f"residual certificate for q={q} undecided", cap)


def solve_disjunction(
    oracle: RealOracle,
    params: LemmaParams,
    structured: bool = True,
    budget: int = DEFAULT_BUDGET,
    cap: Optional[int] = None,
) -> DisjunctionResult:
    """Produce a case (ii) witness if one exists, else a case (i) witness.

    Integer shifts of the value drop out of both certificates, so any real
    value is accepted. When epsilon sits close to 1/2 the residual band
    pinches shut and adversarial parameters can admit no witness of either
    kind; that situation raises NEITHER_CASE_CERTIFIED rather than
    returning a weakened claim.
    """
    cap = resolve_cap(cap)
    stats = _Stats()
    c, cp, eps, Q = params.c, params.c_prime, params.eps, params.Q
    half = Fraction(1, 2)
    cpe = cp * eps
    best = None  # (q, nearest p)
    if eps <= half:
        plus = _band_side_hit(
            oracle, Q, c * Q, eps, min(cpe, half), False, cpe <= half,
            structured, budget, cap, stats,
        )
        if plus is not None:
            best = plus
        top = c * Q if best is None else Fraction(best[0] - 1)
        minus = _band_side_hit(
            oracle, Q, top, max(1 - cpe, half), 1 - eps, True, False,
            structured, budget, cap, stats,
        )
        if minus is not None:
            q, floor_p = minus
            best = (q, floor_p + 1)
    if best is not None:
        q, p = best
        residual, certified = _residual_signed(oracle, q, p, eps, cpe, cap, stats)
        if not certified:
            raise NeitherCaseCertified(
                f"case (ii) candidate q={q} failed residual certification"
            )
        return DisjunctionResult(
            "case_ii", CaseIIWitness(q, p), residual, stats.frozen()
        )
    bound_u = params.bound_u
    factor = params.dist_factor
    for u, v in _approx_fractions(oracle, bound_u):
        if _certify_le(oracle, u, v, factor / Q, cap, stats):
            witness = CaseIWitness(u, v, bound_u, factor / (u * Q))
            return DisjunctionResult("case_i", witness, None, stats.frozen())
    raise NeitherCaseCertified(
        f"no witness for either case at c={c}, c'={cp}, eps={eps}, Q={Q}"
    )
