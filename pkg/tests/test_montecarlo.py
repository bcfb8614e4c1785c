import math

import numpy as np
import pytest

from heavytail.distributions import (
    DegenerateAtZero,
    Empirical,
    Exponential,
    FiniteSupport,
    Geometric,
    ParetoShifted,
    SequenceSpec,
    Zeta,
)
from heavytail.errors import DivisionDomainError, UnstableError
from heavytail.montecarlo import (
    MCConfig,
    lemma1_ratio,
    lemma4_ratio,
    mc_fixed_n_tail,
    mc_stopped_tail,
    mc_stopped_tail_grid,
    subexp_ratio,
    wilson_interval,
)
from heavytail.tail_algebra import StoppedFunctional, stopped_tail

EX2 = SequenceSpec.periodic((ParetoShifted(0.0, 3.0), ParetoShifted(1.0, 3.0)))


def test_config_validation():
    with pytest.raises(ValueError):
        MCConfig(samples=10)
    with pytest.raises(ValueError):
        MCConfig(ci_level="0.5")
    assert MCConfig(ci_level=0.95).z == pytest.approx(1.959964, rel=1e-6)
    assert MCConfig().z == 3.0


def test_worker_cap_from_environment(monkeypatch):
    monkeypatch.setenv("HEAVYTAIL_THREADS", "1")
    assert MCConfig(workers=8).worker_count() == 1


def test_wilson_interval_contains_proportion():
    lo, hi = wilson_interval(0, 1000, 3.0)
    assert lo == 0.0 and 0 < hi < 0.01
    lo, hi = wilson_interval(500, 1000, 3.0)
    assert lo < 0.5 < hi


def test_results_do_not_depend_on_worker_count(monkeypatch):
    seq = SequenceSpec.periodic((ParetoShifted(0.0, 2.0), Exponential(1.0)))
    cfg1 = MCConfig(samples=60000, seed=3, block_size=4096, workers=1)
    cfg4 = MCConfig(samples=60000, seed=3, block_size=4096, workers=4)
    a = mc_stopped_tail_grid("maxsum", seq, Geometric(0.7), [2.0, 10.0], cfg1)
    b = mc_stopped_tail_grid("maxsum", seq, Geometric(0.7), [2.0, 10.0], cfg4)
    assert [(e.lower, e.value, e.upper) for e in a] == [(e.lower, e.value, e.upper) for e in b]


def test_seed_changes_the_estimate():
    seq = SequenceSpec.iid(Exponential(1.0))
    a = mc_stopped_tail("sum", seq, Geometric(0.5), 2.0, MCConfig(samples=20000, seed=1))
    b = mc_stopped_tail("sum", seq, Geometric(0.5), 2.0, MCConfig(samples=20000, seed=2))
    assert a.value != b.value


@pytest.mark.parametrize(
    "func,expect",
    [
        # compound geometric exponential: q exp(-(1-q) x)
        ("sum", 0.5 * math.exp(-0.5 * 3.0)),
        # max of a geometric number of Exp(1): 1 - (1-q)/(1 - q(1-p))
        ("max", 1 - 0.5 / (1 - 0.5 * (1 - math.exp(-3.0)))),
        ("maxsum", 0.5 * math.exp(-0.5 * 3.0)),
    ],
)
def test_stratified_estimate_covers_closed_forms(func, expect):
    est = mc_stopped_tail(func, SequenceSpec.iid(Exponential(1.0)), Geometric(0.5), 3.0, MCConfig(samples=200000, seed=5))
    assert est.lower <= expect <= est.upper
    assert est.detail["se"] > 0


def test_mc_agrees_with_series_on_negative_support():
    for x in (5.0, 15.0):
        mc = mc_stopped_tail("maxsum", EX2, Zeta(6.0), x, MCConfig(samples=300000, seed=8))
        br = stopped_tail("maxsum", EX2, Zeta(6.0), x)
        assert max(mc.lower, br.lower) <= min(mc.upper, br.upper)


def test_pooled_stratum_is_used_beyond_cap():
    # eta concentrated above the cap: everything goes through the pooled stratum
    eta = FiniteSupport.from_mapping({10: 0.5, 12: 0.5})
    seq = SequenceSpec.iid(Exponential(1.0))
    est = mc_stopped_tail("max", seq, eta, 3.0, MCConfig(samples=100000, seed=2, strata_cap=4))
    p = math.exp(-3.0)
    expect = 0.5 * (1 - (1 - p) ** 10) + 0.5 * (1 - (1 - p) ** 12)
    assert est.lower <= expect <= est.upper


def test_degenerate_components_give_zero():
    seq = SequenceSpec.iid(DegenerateAtZero())
    for f in StoppedFunctional:
        est = mc_stopped_tail(f, seq, Geometric(0.5), 0.5, MCConfig(samples=5000))
        assert est.value == 0.0


def test_fixed_n_tail_wilson():
    seq = SequenceSpec.iid(Exponential(1.0))
    est = mc_fixed_n_tail("sum", seq, 2, 2.0, MCConfig(samples=100000, seed=4))
    assert est.lower <= 3 * math.exp(-2.0) <= est.upper


def test_lemma1_ratio_is_at_least_one_and_shares_paths():
    at = lemma1_ratio(EX2, 3, [8.0, 12.0], MCConfig(samples=200000, seed=6))
    for r in at:
        assert r.upper >= 1.0
        assert r.lower <= r.value <= r.upper
    plain = lemma1_ratio(EX2, 3, 8.0, MCConfig(samples=200000, seed=6), conditional=False)
    assert plain.value >= 1.0  # pathwise dominance is exact for indicator counts
    assert plain.detail["hits_den"] == at[0].detail["hits_den"]


def test_lemma1_ratio_errors():
    with pytest.raises(ValueError):
        lemma1_ratio(EX2, 1, 10.0, MCConfig())
    with pytest.raises(UnstableError):
        lemma1_ratio(EX2, 2, 500.0, MCConfig(samples=10000))


def test_lemma4_ratio_paths():
    seq = SequenceSpec.iid(ParetoShifted(0.0, 3.0))
    one = lemma4_ratio(seq, 1, 100.0)
    assert (one.value, one.lower, one.upper) == (1.0, 1.0, 1.0)
    r = lemma4_ratio(seq, 3, 200.0)
    assert r.method == "grid_convolution" and 0.95 < r.value < 1.1
    with pytest.raises(ValueError):
        lemma4_ratio(seq, 3, 1.0)
    with pytest.raises(DivisionDomainError):
        lemma4_ratio(SequenceSpec.iid(DegenerateAtZero()), 2, 1.0)


def test_lemma4_ratio_monte_carlo_fallback():
    seq = SequenceSpec.iid(Empirical(tuple(np.linspace(-2.0, 40.0, 50)), bounded_below_declared=False))
    r = lemma4_ratio(seq, 2, 39.0, MCConfig(samples=200000, seed=1))
    assert r.method == "monte_carlo"
    assert r.lower <= r.value <= r.upper


def test_subexp_ratio():
    p = subexp_ratio(ParetoShifted(0.0, 3.0), 1e3)
    assert 1.95 < p.lower <= p.upper < 2.05
    e = subexp_ratio(Exponential(1.0), 1e8)
    # 1 + x without overflow or underflow
    assert e.lower <= 1 + 1e8 <= e.upper
    assert e.upper / e.lower - 1 < 1e-6
    with pytest.raises(DivisionDomainError):
        subexp_ratio(DegenerateAtZero(), 1.0)
