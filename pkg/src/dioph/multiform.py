"""Simultaneous approximation and families of integer linear forms.

A :class:`PointVec` is a coordinate vector (xi_0, ..., xi_m) with a nonzero
rational leading coordinate; distances are always measured on the normalized
ratios xi_j / xi_0. A :class:`FormSequence` is an indexed family of integer
forms against a fixed point, optionally with a scale sequence whose asymptotic
per-step growth is a power of e (the lcm scales of the zeta recurrences).

``dirichlet_witness`` finds a denominator certified to approximate every
coordinate at once, ``omega0_search`` measures the simultaneous exponent over
a denominator range, ``tau_empirical`` measures the decay exponent of a form
family, and ``nesterenko_report`` combines both into the implied dimension
bound tau + 1 with a cross-check against 1/omega.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

from .certlog import ln_frac
from .enclosure import Enclosure
from .errors import (
    CertificateError,
    Degenerate,
    Inconclusive,
    PreconditionError,
    ZeroFormValue,
)
from .oracle import (
    _MIN_LEVEL,
    AffineOracle,
    EOracle,
    RationalOracle,
    RealOracle,
    Zeta2Oracle,
    Zeta3Oracle,
    nearest_int,
    resolve_cap,
)
from .seqbuild import RateEstimate, _measure_core

_PREFILTER_BITS = 96


@dataclass(frozen=True)
class LinearForm:
    """Integer form l . (xi_0, ..., xi_m)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise PreconditionError("BAD_FORM", "a form needs at least 2 coefficients")
        if all(c == 0 for c in self.coeffs):
            raise PreconditionError("BAD_FORM", "zero form")

    @property
    def height(self) -> int:
        return max(abs(c) for c in self.coeffs)


@dataclass(frozen=True)
class PointVec:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(self.coords) < 2:
            raise PreconditionError("BAD_POINT", "a point needs at least 2 coordinates")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def ratio_oracles(self):
        """Oracles for xi_j / xi_0, j >= 1; needs a nonzero rational xi_0."""
        xi0 = self.coords[0].exact_value()
        if xi0 is None:
            raise PreconditionError(
                "BAD_POINT", "leading coordinate must be an exact rational"
            )
        if xi0 == 0:
            raise Degenerate("leading coordinate is zero")
        if xi0 == 1:
            return self.coords[1:]
        return tuple(AffineOracle(1 / xi0, 0, c) for c in self.coords[1:])


def evaluate_form(
    form: LinearForm,
    point: PointVec,
    cap: Optional[int] = None,
    rel_bits: int = 48,
    index: Optional[int] = None,
) -> Enclosure:
    """Signed enclosure of the form value, separated from zero.

    Exact zeros (all-rational points) raise ZERO_FORM_VALUE; values that
    cannot be separated within the precision cap raise INCONCLUSIVE.
    """
    if len(form.coeffs) != len(point.coords):
        raise PreconditionError("BAD_FORM", "form and point dimensions differ")
    exacts = [c.exact_value() for c in point.coords]
    if all(x is not None for x in exacts):
        val = sum(l * x for l, x in zip(form.coeffs, exacts))
        if val == 0:
            where = "" if index is None else f" at index {index}"
            raise ZeroFormValue(f"form {form.coeffs} vanishes exactly{where}", index)
        return Enclosure.point(val)
    cap = resolve_cap(cap)
    pad = sum(abs(c) for c in form.coeffs).bit_length() + 2
    k = _MIN_LEVEL
    while k <= cap:
        enc = Enclosure.point(0)
        for l, c in zip(form.coeffs, point.coords):
            if l:
                enc = enc + c.enclose(k + pad) * l
        a = enc.abs()
        if a.lo > 0 and a.width <= a.lo / (1 << rel_bits):
            return enc
        k *= 2
    raise Inconclusive(f"form value {form.coeffs} not separated from zero", cap)


@dataclass(frozen=True)
class SimultaneousWitness:
    q0: int
    qs: tuple
    dist: Enclosure
    omega_point: Fraction
    within_dirichlet: bool
    search_bound: int


def _fixed_points(ratios, q_scale_bits: int):
    """Midpoint of each ratio at 2**96 fixed point, for integer prefiltering."""
    k = max(128, _PREFILTER_BITS + q_scale_bits + 8)
    out = []
    for r in ratios:
        mid = r.enclose(k).mid
        out.append((mid.numerator << _PREFILTER_BITS) // mid.denominator)
    return out


def _approx_score(q: int, fixed) -> int:
    M = 1 << _PREFILTER_BITS
    worst = 0
    for X in fixed:
        r = (q * X) % M
        d = min(r, M - r)
        if d > worst:
            worst = d
    return worst


def _max_dist(ratios, q: int, cap) -> tuple:
    """(enclosure of max_j ||q * ratio_j||, nearest integers)."""
    encs = []
    qs = []
    for r in ratios:
        v, d = nearest_int(r, q, cap)
        qs.append(v)
        encs.append(d)
    lo = max(e.lo for e in encs)
    hi = max(e.hi for e in encs)
    return Enclosure(lo, hi), tuple(qs)


def _refined_max_dist(ratios, q: int, cap: int, width_bits: int = 80):
    enc, qs = _max_dist(ratios, q, cap)
    if enc.is_point():
        return enc, qs
    k = _MIN_LEVEL
    while enc.width > Fraction(1, 1 << width_bits):
        if k > cap:
            raise Inconclusive(f"max distance at q={q} will not tighten", cap)
        encs = [(r.enclose(k) * q - v).abs() for r, v in zip(ratios, qs)]
        enc = Enclosure(max(e.lo for e in encs), max(e.hi for e in encs))
        k *= 2
    return enc, qs


def _omega_point(dist_hi: Fraction, q: int) -> Fraction:
    """Directed-down pointwise exponent -log dist / log q."""
    if dist_hi <= 0:
        raise CertificateError("INTERNAL", "omega of a zero distance")
    if dist_hi >= 1:
        return Fraction(0)
    return ln_frac(1 / dist_hi, 96).lo / ln_frac(q, 96).hi


def dirichlet_witness(
    point: PointVec,
    Q: int,
    cap: Optional[int] = None,
    mode: str = "first",
) -> SimultaneousWitness:
    """Simultaneous approximation witness with q0 <= Q**dim.

    ``first`` (default) returns the smallest q0 whose worst-coordinate
    distance is certified <= 1/Q, the pigeonhole guarantee; ``best`` scans
    the whole range and returns the q0 with the smallest certified distance
    (ties to the smaller q0).
    """
    if Q < 2:
        raise PreconditionError("BAD_PARAMS", f"Q={Q} must be >= 2")
    if mode not in ("best", "first"):
        raise PreconditionError("BAD_PARAMS", f"unknown mode {mode!r}")
    ratios = point.ratio_oracles()
    m = len(ratios)
    bound = Q**m
    rcap = resolve_cap(cap)
    fixed = _fixed_points(ratios, bound.bit_length())
    M = 1 << _PREFILTER_BITS
    err_scaled = bound + 2
    target = Fraction(1, Q)
    if mode == "first":
        # integer threshold: approx <= 1/Q + err cannot miss a true hit
        thr = (M + Q - 1) // Q + err_scaled
        for q in range(1, bound + 1):
            if _approx_score(q, fixed) > thr:
                continue
            enc, qs = _refined_max_dist(ratios, q, rcap)
            if enc.is_point() and enc.lo == 0:
                raise PreconditionError(
                    "INFINITE_WITNESS", f"q0={q} matches every coordinate exactly"
                )
            if enc.hi <= target:
                return SimultaneousWitness(
                    q, qs, enc, _omega_point(enc.hi, q) if q > 1 else Fraction(0),
                    True, bound,
                )
        raise CertificateError(
            "PIGEONHOLE_FAILED", f"no q0 <= {bound} certified below 1/{Q}"
        )
    best_scaled = None
    for q in range(1, bound + 1):
        s = _approx_score(q, fixed)
        if best_scaled is None or s < best_scaled:
            best_scaled = s
    near = best_scaled + 2 * err_scaled
    candidates = [
        q for q in range(1, bound + 1) if _approx_score(q, fixed) <= near
    ]
    scored = []
    for q in candidates:
        enc, qs = _refined_max_dist(ratios, q, rcap)
        if enc.is_point() and enc.lo == 0:
            raise PreconditionError(
                "INFINITE_WITNESS", f"q0={q} matches every coordinate exactly"
            )
        scored.append((enc.hi, q, enc, qs))
    scored.sort(key=lambda t: (t[0], t[1]))
    _, q, enc, qs = scored[0]
    omega = _omega_point(enc.hi, q) if q > 1 else Fraction(0)
    return SimultaneousWitness(q, qs, enc, omega, enc.hi <= target, bound)


@dataclass(frozen=True)
class OmegaReport:
    q_bound: int
    best_q: int
    omega_best: Fraction
    best_dist: Enclosure
    tail_q: int
    omega_tail: Fraction
    tail_dist: Enclosure


def omega0_search(
    point: PointVec, q_bound: int, cap: Optional[int] = None
) -> OmegaReport:
    """Largest pointwise exponent over q0 in [2, q_bound], plus the same
    restricted to the top half of the range.

    Candidates are ranked with integer fixed-point arithmetic and the records
    re-verified with exact enclosures, so the reported exponents are certified
    lower bounds at their denominators. omega_best is monotone in q_bound.
    """
    if q_bound < 2:
        raise PreconditionError("BAD_PARAMS", f"q_bound={q_bound} must be >= 2")
    ratios = point.ratio_oracles()
    rcap = resolve_cap(cap)
    fixed = _fixed_points(ratios, q_bound.bit_length())
    M = 1 << _PREFILTER_BITS
    half = q_bound // 2

    def approx_omega(q: int) -> float:
        s = _approx_score(q, fixed)
        if s == 0:
            return float("inf")
        return -math.log(s / M) / math.log(q)

    def pick(qs_range):
        top = heapq.nlargest(8, ((approx_omega(q), -q) for q in qs_range))
        verified = []
        for _, negq in top:
            q = -negq
            enc, _ = _refined_max_dist(ratios, q, rcap)
            if enc.is_point() and enc.lo == 0:
                raise PreconditionError(
                    "INFINITE_WITNESS", f"q0={q} matches every coordinate exactly"
                )
            verified.append((_omega_point(enc.hi, q), -q, enc))
        verified.sort(reverse=True)
        w, negq, enc = verified[0]
        return -negq, w, enc

    best_q, omega_best, best_enc = pick(range(2, q_bound + 1))
    tail_q, omega_tail, tail_enc = pick(range(max(2, half + 1), q_bound + 1))
    return OmegaReport(
        q_bound, best_q, omega_best, best_enc, tail_q, omega_tail, tail_enc
    )


@dataclass(frozen=True)
class FormSequence:
    ns: tuple
    forms: tuple
    point: PointVec
    provenance: str = "user"
    scales: Optional[tuple] = None
    scale_e_power: Optional[int] = None

    def __post_init__(self):
        if len(self.ns) != len(self.forms):
            raise PreconditionError("BAD_FORM", "index and form counts differ")
        if self.scales is not None and len(self.scales) != len(self.forms):
            raise PreconditionError("BAD_FORM", "scale and form counts differ")

    def __len__(self):
        return len(self.forms)

    @classmethod
    def from_uv(cls, rows, oracle: RealOracle, provenance: str = "user"):
        """Rows (n, u, v) for forms u*xi - v against the point (1, xi)."""
        ns = []
        forms = []
        for n, u, v in rows:
            ns.append(int(n))
            forms.append(LinearForm((-int(v), int(u))))
        point = PointVec((RationalOracle(1, spec="rat:1"), oracle))
        return cls(tuple(ns), tuple(forms), point, provenance)


def _scale_growth(seq: FormSequence) -> Optional[Enclosure]:
    if seq.scale_e_power is None:
        return None
    return EOracle().enclose(128).pow_int(seq.scale_e_power)


def tau_empirical(
    seq: FormSequence,
    window=None,
    regularity_delta: Fraction = Fraction(1, 4),
    cap: Optional[int] = None,
) -> RateEstimate:
    """Decay exponent of a form family, with the same adaptive ratio
    estimation, regularity gate and diagnostics as the two-term case."""
    if len(seq) < 3:
        raise PreconditionError("BAD_FORM", "need at least 3 forms")
    rcap = resolve_cap(cap)
    raw_res = []
    for n, form in zip(seq.ns, seq.forms):
        enc = evaluate_form(form, seq.point, rcap, index=n)
        raw_res.append(enc.abs())
    raw_h = [Fraction(f.height) for f in seq.forms]
    growth = _scale_growth(seq)
    return _measure_core(
        list(seq.ns), raw_res, raw_h, window, seq.scales, growth, regularity_delta
    )


@dataclass(frozen=True)
class NesterenkoReport:
    tau_hat: Fraction
    implied_dim_bound: Fraction
    omega_tail: Fraction
    consistent: Optional[bool]
    rate: RateEstimate
    omega: OmegaReport


def nesterenko_report(
    seq: FormSequence,
    omega_bound: int,
    window=None,
    slack: Fraction = Fraction(1, 10),
    cap: Optional[int] = None,
) -> NesterenkoReport:
    """Dimension bound tau + 1 implied by a decaying form family, with the
    exponent chain cross-check tau <= 1/omega + slack."""
    rate = tau_empirical(seq, window=window, cap=cap)
    omega = omega0_search(seq.point, omega_bound, cap=cap)
    implied = rate.tau_hat + 1
    if omega.omega_tail > 0:
        consistent = rate.tau_hat <= 1 / omega.omega_tail + slack
    else:
        consistent = None
    return NesterenkoReport(
        rate.tau_hat, implied, omega.omega_tail, consistent, rate, omega
    )


def apery_forms(s: int, count: int) -> FormSequence:
    """Integer forms from the zeta(3) / zeta(2) recurrences, indices 0..count.

    The rational solution pairs (a_n, b_n) are promoted to integer forms by
    the lcm-power scales 2*lcm(1..n)**3 (s=3) and lcm(1..n)**2 (s=2); the
    scales are recorded so rate measurement can descale and multiply back the
    asymptotic growth e**3 or e**2.
    """
    if s not in (2, 3):
        raise PreconditionError("BAD_PARAMS", f"s={s} must be 2 or 3")
    if count < 2:
        raise PreconditionError("BAD_PARAMS", f"count={count} must be >= 2")
    if s == 3:
        a = [Fraction(1), Fraction(5)]
        b = [Fraction(0), Fraction(6)]

        def step(n, y):
            return (
                (34 * n**3 - 51 * n**2 + 27 * n - 5) * y[n - 1]
                - (n - 1) ** 3 * y[n - 2]
            ) / n**3

        def scale_of(d):
            return 2 * d**3

        point = PointVec((RationalOracle(1, spec="rat:1"), Zeta3Oracle()))
        power = 3
    else:
        a = [Fraction(1), Fraction(3)]
        b = [Fraction(0), Fraction(5)]

        def step(n, y):
            return (
                (11 * n**2 - 11 * n + 3) * y[n - 1] + (n - 1) ** 2 * y[n - 2]
            ) / n**2

        def scale_of(d):
            return d**2

        point = PointVec((RationalOracle(1, spec="rat:1"), Zeta2Oracle()))
        power = 2
    for n in range(2, count + 1):
        a.append(step(n, a))
        b.append(step(n, b))
    d = 1
    ns = []
    forms = []
    scales = []
    for n in range(count + 1):
        if n >= 2:
            d = lcm(d, n)
        S = scale_of(d)
        U = S * a[n]
        V = S * b[n]
        if U.denominator != 1 or V.denominator != 1:
            raise CertificateError(
                "INTEGRALITY", f"scaled pair at n={n} is not integral"
            )
        ns.append(n)
        forms.append(LinearForm((-int(V), int(U))))
        scales.append(Fraction(S))
    return FormSequence(
        tuple(ns),
        tuple(forms),
        point,
        provenance=f"apery{s}",
        scales=tuple(scales),
        scale_e_power=power,
    )
