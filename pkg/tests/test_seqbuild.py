from fractions import Fraction as F

import pytest

from dioph.contfrac import convergents, expand
from dioph.errors import (
    CaseIPersists,
    PreconditionError,
    RateViolation,
    ZeroResidual,
)
from dioph.oracle import CFOracle, GoldenOracle, RationalOracle, SqrtOracle
from dioph.seqbuild import (
    ETA_MAX,
    EtaSchedule,
    RateSpec,
    build_sequence,
    density_data,
    lemma1_bound,
    measure_rates,
)

SQRT2 = SqrtOracle(2, "sqrt2")
GOLDEN = GoldenOracle()


class TestRateSpec:
    def test_geometric_targets(self):
        r = RateSpec.geometric(F(1, 2), 3)
        assert r.targets(3) == (27, F(1, 8))
        assert r.targets(0) == (1, 1)

    @pytest.mark.parametrize("a,b", [(F(3, 2), 3), (F(1, 2), 1), (0, 2), (F(1, 2), F(1, 2))])
    def test_geometric_invalid(self, a, b):
        with pytest.raises(PreconditionError):
            RateSpec.geometric(a, b)

    def test_table(self):
        r = RateSpec.from_table([(1, 10, F(1, 2)), (2, 100, F(1, 4))])
        assert r.targets(2) == (100, F(1, 4))
        with pytest.raises(PreconditionError):
            r.targets(3)

    def test_table_invalid(self):
        with pytest.raises(PreconditionError):
            RateSpec.from_table([])
        with pytest.raises(PreconditionError):
            RateSpec.from_table([(1, 100, F(1, 2)), (2, 10, F(1, 4))])
        with pytest.raises(PreconditionError):
            RateSpec.from_table([(1, 10, F(1, 4)), (2, 100, F(1, 2))])
        with pytest.raises(PreconditionError):
            RateSpec.from_table([(1, 1, F(1, 2))])


class TestEtaSchedule:
    def test_default_clamps_small_indices(self):
        sched = EtaSchedule.default_rule()
        assert sched.value(0) == ETA_MAX
        assert sched.value(100) < sched.value(10) < ETA_MAX

    def test_default_nonincreasing(self):
        sched = EtaSchedule.default_rule()
        vals = [sched.value(n) for n in range(0, 60, 5)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_custom(self):
        sched = EtaSchedule.custom([(1, F(1, 4)), (2, F(1, 8))])
        assert sched.value(2) == F(1, 8)
        with pytest.raises(PreconditionError):
            sched.value(3)

    def test_custom_invalid(self):
        with pytest.raises(PreconditionError):
            EtaSchedule.custom([])
        with pytest.raises(PreconditionError):
            EtaSchedule.custom([(1, F(1, 8)), (2, F(1, 4))])
        with pytest.raises(PreconditionError):
            EtaSchedule.custom([(1, F(1, 2))])


def test_lemma1_bound_roundings():
    v = lemma1_bound(F(1, 2), 4)
    assert 3 <= v <= 3 + F(1, 10**30)
    v = lemma1_bound(F(1, 4), 2)
    assert F(3, 2) <= v <= F(3, 2) + F(1, 10**30)
    with pytest.raises(PreconditionError):
        lemma1_bound(2, 3)


@pytest.fixture(scope="module")
def sqrt2_run():
    return build_sequence(SQRT2, F(21, 10), RateSpec.geometric(F(1, 2), 3), range(50, 101))


def test_build_structure(sqrt2_run):
    res = sqrt2_run
    assert res.shift == 1
    assert [e.n for e in res.entries] == list(range(50, 101))
    assert all(e.case_taken == "ii" for e in res.entries)
    assert all(e.u >= 1 for e in res.entries)
    # every residual has a certified sign
    assert all(e.residual.lo > 0 or e.residual.hi < 0 for e in res.entries)
    assert set(res.eta_used) == set(range(50, 101))
    assert all(0 < v <= ETA_MAX for v in res.eta_used.values())


def test_build_ratio_band(sqrt2_run):
    rus = [e.ratio_u for e in sqrt2_run.entries]
    assert float(min(rus)) == pytest.approx(0.8937586785862298, abs=1e-12)
    assert float(max(rus)) == pytest.approx(0.9069339421309558, abs=1e-12)


def test_measured_rates(sqrt2_run):
    est = measure_rates(sqrt2_run.entries, SQRT2)
    assert float(est.alpha_hat) == pytest.approx(0.4974344226274423, abs=1e-12)
    assert float(est.beta_hat) == pytest.approx(2.9997964831518185, abs=1e-12)
    assert float(est.tau_hat) == pytest.approx(0.6356516083872789, abs=1e-12)
    assert est.method == "ratio-geomean/ratio-richardson"
    assert est.window == (75, 100)
    assert est.regular and est.decayed
    assert est.alpha_enclosure.lo <= est.alpha_hat <= est.alpha_enclosure.hi
    assert est.beta_enclosure.lo <= est.beta_hat <= est.beta_enclosure.hi


def test_measure_rates_validation():
    with pytest.raises(PreconditionError):
        measure_rates([(1, 1, 1), (2, 2, 3)], SQRT2)
    with pytest.raises(PreconditionError):
        measure_rates([(1, 1, 1), (2, 0, 3), (3, 2, 3)], SQRT2)


def test_rate_violation():
    # -log eps / log Q ~ 1.71 exceeds 1/(mu-1) + slack = 0.55
    with pytest.raises(RateViolation):
        build_sequence(SQRT2, 3, RateSpec.geometric(F(1, 2), F(3, 2)), range(5, 10))


def test_case_i_persists():
    # a value glued to 1/3 never lands in the fractional band, so case (i)
    # with u = 3 wins at every index and the exponent guess gets flagged
    near_third = CFOracle((0, 3, 10**40))
    with pytest.raises(CaseIPersists) as info:
        build_sequence(near_third, F(21, 10), RateSpec.geometric(F(1, 2), 3), range(5, 11))
    err = info.value
    assert "3/3" in str(err)
    assert [e.case_taken for e in err.entries] == ["i"] * 6
    assert {e.u for e in err.entries} == {3}


def test_zero_residual_build():
    with pytest.raises(ZeroResidual) as info:
        build_sequence(
            RationalOracle(F(1, 3)), 2, RateSpec.from_table([(1, 1000, F(1, 5))]), [1]
        )
    assert "u=3" in str(info.value)


class TestDensityData:
    def test_deep_window(self):
        qs = [c.q for c in convergents(expand(GOLDEN, 45))[35:45]]
        dd = density_data(qs, GOLDEN)
        assert float(dd.alpha_xi) == pytest.approx(0.6180339887498949, abs=1e-12)
        assert float(dd.beta_u) == pytest.approx(1.618033988749897, abs=1e-12)
        assert float(dd.nu_estimate) == pytest.approx(6.199510332313967e-16, rel=1e-9)
        assert len(dd.distances) == 10
        # golden convergent distances shrink strictly
        assert all(b.hi < a.lo for a, b in zip(dd.distances, dd.distances[1:]))

    def test_shallow_window(self):
        qs = [c.q for c in convergents(expand(GOLDEN, 45))[5:15]]
        ds = density_data(qs, GOLDEN)
        assert float(ds.alpha_xi) == pytest.approx(0.6180339887498955, abs=1e-12)
        assert ds.beta_u == F(13, 8)
        assert float(ds.nu_estimate) == pytest.approx(0.002147995361049214, abs=1e-12)

    def test_validation(self):
        with pytest.raises(PreconditionError):
            density_data([5], GOLDEN)
        with pytest.raises(PreconditionError):
            density_data([5, 3], GOLDEN)
        with pytest.raises(PreconditionError):
            density_data([0, 3], GOLDEN)

    def test_rational_multiple_raises(self):
        with pytest.raises(ZeroResidual):
            density_data([3, 6], RationalOracle(F(1, 3)))
