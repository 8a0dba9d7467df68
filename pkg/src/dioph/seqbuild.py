"""Construction of good approximation sequences and rate measurement.

``build_sequence`` drives the two-case dichotomy once per index n against
shrinking bands around target sizes (Q_n, eps_n), producing entries whose
coefficient and residual ratios are certified to lie in
[lambda_n^(-1/2), lambda_n^(1/2)] and [mu_n^(-1/2), mu_n^(1/2)] with
lambda_n = 1 + eta_n, mu_n = 1 + 2 eta_n. The band certificates are exact
rational squared comparisons.

``measure_rates`` estimates the geometric decay alpha and growth beta of a
given sequence. Headline values come from consecutive ratios at the window
end, Richardson-extrapolated when the ratio sequence is stable and otherwise
replaced by the window geometric mean; per-index roots and raw ratios are
kept as diagnostics. A regularity gate zeroes the decay exponent when
consecutive log-residual quotients stray far from 1, and a no-decay gate
covers sequences whose residuals do not shrink.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .certlog import ln_enclosure, ln_frac
from .dichotomy import LemmaParams, solve_disjunction
from .enclosure import (
    Enclosure,
    Rat,
    _frac,
    dyadic_below,
    root_enclosure,
    sqrt_lower,
)
from .errors import (
    CaseIPersists,
    CertificateError,
    Inconclusive,
    PreconditionError,
    RateViolation,
    ZeroResidual,
)
from .oracle import (
    AffineOracle,
    RealOracle,
    _MIN_LEVEL,
    floor_certified,
    nearest_int,
    resolve_cap,
)

ETA_GRID_BITS = 40
ETA_MAX = Fraction(9, 20)
SHRINK = 1 - Fraction(1, 1 << 40)


@dataclass(frozen=True)
class RateSpec:
    """Target sizes per index: geometric (Q_n, eps_n) = (beta^n, alpha^n) or
    an explicit table of rows."""

    kind: str
    alpha: Optional[Fraction] = None
    beta: Optional[Fraction] = None
    table: Optional[dict] = None

    @classmethod
    def geometric(cls, alpha: Rat, beta: Rat) -> "RateSpec":
        a, b = _frac(alpha), _frac(beta)
        if not (0 < a < 1 < b):
            raise PreconditionError(
                "BAD_PARAMS", f"geometric rates need 0 < alpha < 1 < beta, got {a}, {b}"
            )
        return cls("geometric", alpha=a, beta=b)

    @classmethod
    def from_table(cls, rows) -> "RateSpec":
        table = {}
        for n, Q, eps in rows:
            table[int(n)] = (_frac(Q), _frac(eps))
        if not table:
            raise PreconditionError("BAD_PARAMS", "empty rate table")
        ns = sorted(table)
        for a, b in zip(ns, ns[1:]):
            if table[a][0] >= table[b][0] or table[a][1] <= table[b][1]:
                raise PreconditionError(
                    "BAD_PARAMS",
                    "rate table must have Q increasing and eps decreasing",
                )
        for n in ns:
            Q, eps = table[n]
            if not (Q > 1 and 0 < eps < 1):
                raise PreconditionError(
                    "BAD_PARAMS", f"row n={n} needs Q > 1 and 0 < eps < 1"
                )
        return cls("table", table=table)

    def targets(self, n: int):
        if self.kind == "geometric":
            return self.beta**n, self.alpha**n
        if n not in self.table:
            raise PreconditionError("BAD_PARAMS", f"rate table has no row for n={n}")
        return self.table[n]


@dataclass(frozen=True)
class EtaSchedule:
    """Band half-width schedule eta_n, positive and nonincreasing.

    The default rule is min(9/20, 1/ln(n+3)) rounded down to the 2**-40 grid;
    the clamp keeps 1 + 2 eta below 2 at the smallest indices. Custom tables
    are used as given and must respect eta < 1/2 themselves.
    """

    table: Optional[dict] = None

    @classmethod
    def default_rule(cls) -> "EtaSchedule":
        return cls(None)

    @classmethod
    def custom(cls, pairs) -> "EtaSchedule":
        table = {int(n): _frac(v) for n, v in pairs}
        ns = sorted(table)
        if not ns:
            raise PreconditionError("BAD_PARAMS", "empty eta table")
        for a, b in zip(ns, ns[1:]):
            if table[a] < table[b]:
                raise PreconditionError("BAD_PARAMS", "eta table must be nonincreasing")
        for n in ns:
            if not (0 < table[n] < Fraction(1, 2)):
                raise PreconditionError(
                    "BAD_PARAMS", f"eta at n={n} must be in (0, 1/2)"
                )
        return cls(table)

    def value(self, n: int) -> Fraction:
        if self.table is not None:
            if n not in self.table:
                raise PreconditionError("BAD_PARAMS", f"eta table has no row for n={n}")
            return self.table[n]
        ln_hi = ln_frac(n + 3, 96).hi
        eta = dyadic_below(1 / ln_hi, ETA_GRID_BITS)
        return min(ETA_MAX, eta)


@dataclass(frozen=True)
class ApproxSequenceEntry:
    n: int
    u: int
    v: int
    residual: Enclosure
    ratio_u: Fraction
    ratio_res: Enclosure
    case_taken: str


@dataclass(frozen=True)
class BuildResult:
    entries: tuple
    shift: int
    eta_used: dict

    def __iter__(self):
        return iter(self.entries)


def _rate_precheck(rates: RateSpec, n_range, mu_upper: Fraction, slack: Fraction):
    bound = 1 / (mu_upper - 1) + slack
    if rates.kind == "geometric":
        ratio_hi = ln_frac(1 / rates.alpha, 96).hi / ln_frac(rates.beta, 96).lo
        if ratio_hi > bound:
            raise RateViolation(
                f"-log eps / log Q ~ {float(ratio_hi):.4f} exceeds "
                f"1/(mu_upper-1) + {slack} = {float(bound):.4f}"
            )
        return
    for n in n_range:
        Q, eps = rates.targets(n)
        ratio_hi = ln_frac(1 / eps, 96).hi / ln_frac(Q, 96).lo
        if ratio_hi > bound:
            raise RateViolation(
                f"row n={n}: -log eps / log Q ~ {float(ratio_hi):.4f} exceeds "
                f"{float(bound):.4f}"
            )


def build_sequence(
    oracle: RealOracle,
    mu_upper: Rat,
    rates: RateSpec,
    n_range,
    eta: Optional[EtaSchedule] = None,
    case1_fraction: Fraction = Fraction(1, 5),
    rate_slack: Fraction = Fraction(1, 20),
    structured: bool = True,
    cap: Optional[int] = None,
) -> BuildResult:
    """Run the banded construction for each n in ``n_range``.

    The value is normalized into (0, 1) by subtracting its floor; output
    numerators are shifted back so that u*xi - v refers to the original
    value. Raises RATE_VIOLATION if the target rates are too steep for
    mu_upper (slack 1/20 by default) and CASE_I_PERSISTS when case (i) hits
    more than ``case1_fraction`` of the top half of the range.
    """
    mu_upper = _frac(mu_upper)
    if mu_upper <= 1:
        raise PreconditionError("BAD_PARAMS", f"mu_upper {mu_upper} must be > 1")
    ns = list(n_range)
    if not ns:
        raise PreconditionError("BAD_PARAMS", "empty index range")
    eta = eta or EtaSchedule.default_rule()
    _rate_precheck(rates, ns, mu_upper, rate_slack)
    shift = floor_certified(oracle, cap)
    inner = oracle if shift == 0 else AffineOracle(1, -shift, oracle)
    entries = []
    eta_used = {}
    for n in ns:
        Q, eps = rates.targets(n)
        h = eta.value(n)
        if not (0 < h <= ETA_MAX):
            raise PreconditionError("BAD_PARAMS", f"eta_{n}={h} outside (0, 9/20]")
        eta_used[n] = h
        lam = 1 + h
        mu = 1 + 2 * h
        params = LemmaParams(
            lam * SHRINK,
            mu * SHRINK,
            eps / sqrt_lower(mu, 64),
            Q / sqrt_lower(lam, 64),
        )
        res = solve_disjunction(inner, params, structured=structured, cap=cap)
        if res.outcome == "case_ii":
            q, p = res.witness.q, res.witness.p
            if not (q * q <= lam * Q * Q and Q * Q <= lam * q * q):
                raise CertificateError(
                    "BAND_VIOLATION", f"coefficient band failed at n={n}, q={q}"
                )
            r = res.residual.abs()
            if not (r.lo**2 * mu >= eps**2 and r.hi**2 <= mu * eps**2):
                raise CertificateError(
                    "BAND_VIOLATION", f"residual band failed at n={n}, q={q}"
                )
            entries.append(
                ApproxSequenceEntry(
                    n=n,
                    u=q,
                    v=p + shift * q,
                    residual=res.residual,
                    ratio_u=Fraction(q) / Q,
                    ratio_res=Enclosure(r.lo / eps, r.hi / eps),
                    case_taken="ii",
                )
            )
        else:
            w = res.witness
            r = _form_enclosure(inner, w.u, w.v, resolve_cap(cap))
            a = r.abs()
            entries.append(
                ApproxSequenceEntry(
                    n=n,
                    u=w.u,
                    v=w.v + shift * w.u,
                    residual=r,
                    ratio_u=Fraction(w.u) / Q,
                    ratio_res=Enclosure(a.lo / eps, a.hi / eps),
                    case_taken="i",
                )
            )
    half_start = ns[len(ns) // 2]
    top = [e for e in entries if e.n >= half_start]
    bad = sum(1 for e in top if e.case_taken == "i")
    if top and Fraction(bad, len(top)) > case1_fraction:
        raise CaseIPersists(
            f"case (i) hit {bad}/{len(top)} of the top half; "
            f"mu_upper={mu_upper} likely at or below the true exponent",
            entries=entries,
        )
    return BuildResult(tuple(entries), shift, eta_used)


def _form_enclosure(
    oracle: RealOracle, u: int, v: int, cap: int, rel_bits: int = 48
) -> Enclosure:
    """Signed enclosure of u xi - v, separated from zero to 2**-rel_bits."""
    exact = oracle.exact_value()
    if exact is not None:
        r = u * exact - v
        if r == 0:
            raise ZeroResidual(f"u={u}, v={v} annihilates the rational value")
        return Enclosure.point(r)
    k = _MIN_LEVEL
    while k <= cap:
        enc = oracle.enclose(k) * u - v
        a = enc.abs()
        if a.lo > 0 and a.width <= a.lo / (1 << rel_bits):
            return enc
        k *= 2
    raise Inconclusive(f"residual |{u} xi - {v}| not separated from 0", cap)


def lemma1_bound(alpha_hat: Rat, beta_hat: Rat, bits: int = 96) -> Fraction:
    """Certified-rounding upper evaluation of 1 - log(beta)/log(alpha)."""
    a, b = _frac(alpha_hat), _frac(beta_hat)
    if not (0 < a < 1 < b):
        raise PreconditionError(
            "BAD_PARAMS", f"need 0 < alpha_hat < 1 < beta_hat, got {a}, {b}"
        )
    return 1 + ln_frac(b, bits).hi / ln_frac(1 / a, bits).lo


@dataclass(frozen=True)
class RateEstimate:
    alpha_hat: Fraction
    beta_hat: Fraction
    tau_hat: Fraction
    method: str
    regular: bool
    decayed: bool
    window: tuple
    alpha_enclosure: Enclosure
    beta_enclosure: Enclosure
    diagnostics: dict = field(repr=False, default_factory=dict)


def _normalize_entries(entries):
    rows = []
    for i, e in enumerate(entries):
        if isinstance(e, ApproxSequenceEntry):
            rows.append((e.n, e.u, e.v))
        elif len(e) == 3:
            rows.append((int(e[0]), int(e[1]), int(e[2])))
        else:
            u, v = e
            rows.append((i + 1, int(u), int(v)))
    return rows


def _window_positions(ns, window):
    if window is None:
        start = len(ns) // 2
        return list(range(start, len(ns)))
    lo, hi = window
    pos = [i for i, n in enumerate(ns) if lo <= n <= hi]
    return pos


def _richardson(x0: Enclosure, x1: Enclosure, n0: int, n1: int) -> Enclosure:
    return ((x1 * n1) - (x0 * n0)) * Fraction(1, n1 - n0)


def _estimate_limit(values, ns, positions):
    """Ratio-based limit estimate over the window; returns (enclosure, method).

    ``values`` are positive Enclosures. Richardson extrapolation of the last
    two consecutive ratios when they are stable to 2**-6, else the window
    geometric mean of the total ratio.
    """
    ratios = []
    for a, b in zip(positions, positions[1:]):
        ratios.append((ns[b], values[b] / values[a]))
    if len(ratios) >= 2:
        (n0, x0), (n1, x1) = ratios[-2], ratios[-1]
        m0, m1 = x0.mid, x1.mid
        stable = m1 > 0 and abs(m1 - m0) <= m1 / 64 and x1.width <= m1 / 64
        if stable:
            return _richardson(x0, x1, n0, n1), "ratio-richardson"
    p0, p1 = positions[0], positions[-1]
    span = ns[p1] - ns[p0]
    total = values[p1] / values[p0]
    return root_enclosure(total, span, 64), "ratio-geomean"


def measure_rates(
    entries,
    oracle: RealOracle,
    window=None,
    scales: Optional[Sequence] = None,
    scale_growth: Optional[Enclosure] = None,
    regularity_delta: Fraction = Fraction(1, 4),
    cap: Optional[int] = None,
) -> RateEstimate:
    """Estimate decay alpha, growth beta and exponent tau for a sequence.

    ``entries`` are (n, u, v) rows (ApproxSequenceEntry and (u, v) pairs are
    accepted). When ``scales`` is given the ratios are measured on the
    descaled data and multiplied back by ``scale_growth``, the certified
    per-step growth factor of the scale sequence.
    """
    rows = _normalize_entries(entries)
    if len(rows) < 3:
        raise PreconditionError("BAD_PARAMS", "need at least 3 entries")
    cap = resolve_cap(cap)
    ns = [r[0] for r in rows]
    raw_res = [_form_enclosure(oracle, u, v, cap).abs() for _, u, v in rows]
    raw_h = [Fraction(abs(u)) for _, u, _ in rows]
    if any(h == 0 for h in raw_h):
        raise PreconditionError("BAD_PARAMS", "zero coefficient u in entries")
    return _measure_core(
        ns, raw_res, raw_h, window, scales, scale_growth, regularity_delta
    )


def _measure_core(
    ns,
    raw_res,
    raw_h,
    window,
    scales,
    scale_growth,
    regularity_delta: Fraction,
) -> RateEstimate:
    """Shared ratio-estimation engine over residual enclosures and heights."""
    if scales is not None and len(scales) != len(ns):
        raise PreconditionError("BAD_PARAMS", "scales must align with entries")
    pos = _window_positions(ns, window)
    if len(pos) < 2:
        raise PreconditionError("BAD_PARAMS", "window keeps fewer than 2 entries")
    if scales is not None:
        sc = [_frac(s) for s in scales]
        core_res = [raw_res[i] * (1 / sc[i]) for i in range(len(ns))]
        core_h = [Enclosure.point(raw_h[i] / sc[i]) for i in range(len(ns))]
        growth = scale_growth if scale_growth is not None else Enclosure.point(1)
    else:
        core_res = raw_res
        core_h = [Enclosure.point(h) for h in raw_h]
        growth = Enclosure.point(1)
    alpha_core, method_a = _estimate_limit(core_res, ns, pos)
    beta_core, method_b = _estimate_limit(core_h, ns, pos)
    alpha_enc = alpha_core * growth
    beta_enc = beta_core * growth
    p0, p1 = pos[0], pos[-1]
    decayed = raw_res[p1].hi < raw_res[p0].lo
    ln_res = [ln_enclosure(raw_res[i], 64).mid for i in pos]
    pairs = list(zip(ln_res, ln_res[1:]))
    in_band = 0
    exponents = []
    for la, lb in pairs:
        if la == 0:
            exponents.append(None)
            continue
        e = lb / la
        exponents.append(e)
        if 1 - regularity_delta <= e <= 1 + regularity_delta:
            in_band += 1
    regular = bool(pairs) and 2 * in_band >= len(pairs)
    alpha_hat = alpha_enc.hi
    beta_hat = beta_enc.hi
    if decayed and regular and alpha_enc.hi < 1 and beta_enc.lo > 1:
        tau_hat = ln_frac(1 / alpha_enc.hi, 96).lo / ln_frac(beta_enc.hi, 96).hi
    else:
        tau_hat = Fraction(0)
    diag = {
        "alpha_roots": [
            root_enclosure(raw_res[i], max(ns[i], 1), 32).hi for i in pos
        ],
        "beta_roots": [
            root_enclosure(raw_h[i], max(ns[i], 1), 32).hi for i in pos
        ],
        "alpha_ratios": [
            (raw_res[b] / raw_res[a]).mid for a, b in zip(pos, pos[1:])
        ],
        "beta_ratios": [raw_h[b] / raw_h[a] for a, b in zip(pos, pos[1:])],
        "decay_exponents": exponents,
        "tau_pointwise": _tau_pointwise(raw_res, raw_h, pos),
    }
    return RateEstimate(
        alpha_hat=alpha_hat,
        beta_hat=beta_hat,
        tau_hat=tau_hat,
        method=f"{method_a}/{method_b}",
        regular=regular,
        decayed=decayed,
        window=(ns[p0], ns[p1]),
        alpha_enclosure=alpha_enc,
        beta_enclosure=beta_enc,
        diagnostics=diag,
    )


def _tau_pointwise(raw_res, raw_h, pos):
    out = []
    for i in pos:
        if raw_h[i] < 2 or raw_res[i].hi >= 1:
            out.append(None)
            continue
        num = -ln_enclosure(raw_res[i], 64).mid
        den = ln_frac(raw_h[i], 64).mid
        out.append(num / den if den else None)
    return out


@dataclass(frozen=True)
class DensityData:
    alpha_xi: Fraction
    beta_u: Fraction
    nu_estimate: Fraction
    distances: tuple


def density_data(u_seq, oracle: RealOracle, cap: Optional[int] = None) -> DensityData:
    """Finite-range density quantities for a nondecreasing positive u sequence.

    alpha_xi is the largest consecutive ratio of the nearest-integer
    distances, beta_u the largest consecutive ratio of the u, and
    nu_estimate = log sqrt(alpha_xi * beta_u), rounded up.
    """
    us = [int(u) for u in u_seq]
    if len(us) < 2:
        raise PreconditionError("BAD_PARAMS", "need at least 2 denominators")
    if any(u <= 0 for u in us) or any(b < a for a, b in zip(us, us[1:])):
        raise PreconditionError(
            "BAD_PARAMS", "u sequence must be positive and nondecreasing"
        )
    dists = []
    for u in us:
        v, d = nearest_int(oracle, u, cap)
        d = _tighten_positive(oracle, u, v, d, resolve_cap(cap))
        dists.append(d)
    alpha = max((b / a).hi for a, b in zip(dists, dists[1:]))
    beta = max(Fraction(b, a) for a, b in zip(us, us[1:]))
    prod = alpha * beta
    nu = ln_frac(prod, 96).hi / 2 if prod != 1 else Fraction(0)
    return DensityData(alpha, beta, nu, tuple(dists))


def _tighten_positive(oracle, u, v: int, d: Enclosure, cap: int) -> Enclosure:
    if d.is_point():
        if d.lo == 0:
            raise ZeroResidual(f"u={u} lands exactly on an integer")
        return d
    k = _MIN_LEVEL
    while True:
        if d.lo > 0 and d.width <= d.lo / (1 << 48):
            return d
        if k > cap:
            raise Inconclusive(f"distance for u={u} not separated from 0", cap)
        d = (oracle.enclose(k) * u - v).abs()
        k *= 2
