import math
from fractions import Fraction as F

import pytest

from dioph.errors import (
    Degenerate,
    PreconditionError,
    ZeroFormValue,
)
from dioph.multiform import (
    FormSequence,
    LinearForm,
    PointVec,
    apery_forms,
    dirichlet_witness,
    evaluate_form,
    nesterenko_report,
    omega0_search,
    tau_empirical,
)
from dioph.oracle import GoldenOracle, RationalOracle, SqrtOracle, parse_oracle

ONE = RationalOracle(1, spec="rat:1")
GOLDEN = GoldenOracle()
SQRT2 = SqrtOracle(2, "sqrt2")
SQRT3 = SqrtOracle(3, "sqrt3")


class TestBasics:
    def test_form_validation(self):
        assert LinearForm((-3, 2)).height == 3
        with pytest.raises(PreconditionError):
            LinearForm((5,))
        with pytest.raises(PreconditionError):
            LinearForm((0, 0))

    def test_point_validation(self):
        pv = PointVec((ONE, SQRT2, SQRT3))
        assert pv.dim == 2
        with pytest.raises(PreconditionError):
            PointVec((SQRT2,))

    def test_ratio_oracles(self):
        assert PointVec((ONE, SQRT2)).ratio_oracles() == (SQRT2,)
        scaled = PointVec((RationalOracle(F(1, 2)), SQRT2)).ratio_oracles()
        enc = scaled[0].enclose(80)
        assert enc.lo**2 < 8 < enc.hi**2
        with pytest.raises(PreconditionError):
            PointVec((SQRT2, GOLDEN)).ratio_oracles()
        with pytest.raises(Degenerate):
            PointVec((RationalOracle(0), SQRT2)).ratio_oracles()

    def test_evaluate_form(self):
        with pytest.raises(PreconditionError):
            evaluate_form(LinearForm((1, 2, 3)), PointVec((ONE, SQRT2)))
        with pytest.raises(ZeroFormValue):
            evaluate_form(LinearForm((-1, 2)), PointVec((ONE, RationalOracle(F(1, 2)))))


def _binomial_value(s: int, n: int) -> int:
    term = lambda k: math.comb(n, k) ** 2 * math.comb(n + k, k) ** s
    return sum(term(k) for k in range(n + 1))


class TestAperyForms:
    def test_zeta3_matches_binomial_sums(self):
        seq = apery_forms(3, 30)
        assert seq.ns == tuple(range(31))
        assert seq.scale_e_power == 3
        for n in seq.ns:
            assert seq.forms[n].coeffs[1] == seq.scales[n] * _binomial_value(2, n)

    def test_zeta2_matches_binomial_sums(self):
        seq = apery_forms(2, 30)
        assert seq.scale_e_power == 2
        for n in seq.ns:
            assert seq.forms[n].coeffs[1] == seq.scales[n] * _binomial_value(1, n)

    def test_frozen_prefixes(self):
        a3 = apery_forms(3, 10)
        assert list(a3.scales[:4]) == [2, 2, 16, 432]
        assert a3.forms[2].coeffs == (-1404, 1168)
        a2 = apery_forms(2, 5)
        assert [f.coeffs for f in a2.forms[:3]] == [(0, 1), (-5, 3), (-125, 76)]
        assert list(a2.scales[:5]) == [1, 1, 4, 36, 144]

    def test_small_positive_value(self):
        a3 = apery_forms(3, 10)
        enc = evaluate_form(a3.forms[2], a3.point, index=2)
        assert 0 < enc.lo and enc.hi < F(1, 100)


class TestTauEmpirical:
    def test_fibonacci_forms(self):
        fib = [0, 1]
        while len(fib) < 45:
            fib.append(fib[-1] + fib[-2])
        rows = [(k, fib[k + 1], fib[k + 2]) for k in range(20, 41)]
        seq = FormSequence.from_uv(rows, GOLDEN)
        est = tau_empirical(seq)
        assert est.regular and est.decayed
        assert est.window == (30, 40)
        assert F(95, 100) <= est.tau_hat <= 1 + F(1, 10**12)

    def test_constant_form_has_no_decay(self):
        f = LinearForm((1, -1))
        point = PointVec((ONE, RationalOracle(F(3, 2))))
        est = tau_empirical(FormSequence((0, 1, 2, 3), (f, f, f, f), point))
        assert est.tau_hat == 0
        assert not est.decayed

    def test_zeta2_window(self):
        est = tau_empirical(apery_forms(2, 60), window=(30, 60))
        assert float(est.tau_hat) == pytest.approx(0.09220634322294138, abs=1e-12)
        assert est.method == "ratio-richardson/ratio-richardson"

    def test_needs_three_forms(self):
        f = LinearForm((1, -1))
        point = PointVec((ONE, SQRT2))
        with pytest.raises(PreconditionError):
            tau_empirical(FormSequence((0, 1), (f, f), point))

    def test_sequence_validation(self):
        f = LinearForm((1, -1))
        point = PointVec((ONE, SQRT2))
        with pytest.raises(PreconditionError):
            FormSequence((0, 1), (f,), point)
        with pytest.raises(PreconditionError):
            FormSequence((0,), (f,), point, scales=(1, 2))


class TestDirichlet:
    def test_golden(self):
        w = dirichlet_witness(PointVec((ONE, GOLDEN)), 3)
        assert (w.q0, w.qs) == (2, (3,))
        assert w.within_dirichlet
        # |2 phi - 3| = sqrt5 - 2
        assert (2 + w.dist.lo) ** 2 <= 5 <= (2 + w.dist.hi) ** 2
        assert float(w.dist.hi) == pytest.approx(0.2360679774997897, abs=1e-12)

    def test_two_irrationals(self):
        w = dirichlet_witness(PointVec((ONE, SQRT2, SQRT3)), 10)
        assert (w.q0, w.qs) == (41, (58, 71))
        assert w.within_dirichlet
        # the worst coordinate is sqrt2: |41 sqrt2 - 58| = 58 - 41 sqrt2
        assert (58 - w.dist.hi) ** 2 <= 2 * 41**2 <= (58 - w.dist.lo) ** 2
        assert float(w.dist.hi) == pytest.approx(0.017243942703102998, abs=1e-12)

    def test_best_mode_not_worse(self):
        point = PointVec((ONE, SQRT2, SQRT3))
        first = dirichlet_witness(point, 10)
        best = dirichlet_witness(point, 10, mode="best")
        assert best.dist.hi <= first.dist.hi

    def test_validation(self):
        with pytest.raises(PreconditionError):
            dirichlet_witness(PointVec((ONE, GOLDEN)), 1)
        with pytest.raises(PreconditionError):
            dirichlet_witness(PointVec((ONE, GOLDEN)), 3, mode="exhaustive")

    def test_rational_point_rejected(self):
        with pytest.raises(PreconditionError, match="INFINITE_WITNESS"):
            dirichlet_witness(PointVec((ONE, RationalOracle(F(1, 2)))), 4)


def test_omega_search_zeta3():
    rep = omega0_search(PointVec((ONE, parse_oracle("const:zeta3"))), 10**4)
    assert rep.best_q == 5
    assert float(rep.omega_best) == pytest.approx(2.843921968092333, abs=1e-12)
    assert rep.tail_q == 6612
    assert float(rep.omega_tail) == pytest.approx(0.9457710187750794, abs=1e-12)


class TestNesterenko:
    def test_zeta3_forms(self):
        rep = nesterenko_report(apery_forms(3, 40), 200)
        assert F(1075, 1000) <= rep.implied_dim_bound <= F(1085, 1000)
        assert rep.consistent is True
        assert rep.implied_dim_bound == rep.tau_hat + 1

    def test_fibonacci_forms(self):
        fib = [0, 1]
        while len(fib) < 45:
            fib.append(fib[-1] + fib[-2])
        rows = [(k, fib[k + 1], fib[k + 2]) for k in range(20, 41)]
        rep = nesterenko_report(FormSequence.from_uv(rows, GOLDEN), 10**4)
        assert F(195, 100) <= rep.implied_dim_bound <= 2 + F(1, 10**12)
        assert float(rep.omega_tail) == pytest.approx(1.0912429684370228, abs=1e-12)
        assert rep.consistent is True
