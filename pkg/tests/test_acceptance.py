"""Acceptance suite: one test per criterion, run at the required tolerances.

The conftest hook prints a PASS/FAIL line per criterion at the end of the run.
"""

import itertools
import math
import time

import numpy as np
import pytest

from heavytail import cli
from heavytail.diagnostics import (
    CLASSES,
    GridSpec,
    c_indicator,
    check_theorem4,
    check_theorem5,
    diagnose,
    inclusion_violations,
    matuszewska_upper,
    ratio_sum_curve,
    rv_alpha_fit,
)
from heavytail.distributions import (
    CaiTang,
    DegenerateAtZero,
    Empirical,
    Exponential,
    FiniteSupport,
    Geometric,
    ParetoShifted,
    SequenceSpec,
    Zeta,
)
from heavytail.montecarlo import MCConfig, lemma1_ratio, lemma4_ratio, mc_stopped_tail_grid, subexp_ratio
from heavytail.tail_algebra import StoppedFunctional, stopped_tail

EX1 = SequenceSpec.periodic(
    (DegenerateAtZero(), DegenerateAtZero(), Exponential(1.0)), head={1: CaiTang(0.5)}, pivot=1, phi_exponent=1.0
)
EX2 = SequenceSpec.periodic((ParetoShifted(0.0, 3.0), ParetoShifted(1.0, 3.0)))


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_01_matuszewska_index():
    with Timer() as t:
        est = matuszewska_upper(ParetoShifted(0.0, 3.0), GridSpec())
    assert not est.infinite
    assert 2.8 <= est.j_plus <= 3.2
    assert t.elapsed < 1


def test_criterion_02_example2_condition_b():
    with Timer() as t:
        report = check_theorem5(EX2, Zeta(6.0), GridSpec())
    cond = report.condition("b")
    assert cond.detail["depth"] == 64
    assert np.allclose(cond.detail["curve"], 1.0, rtol=0, atol=1e-9)
    assert abs(cond.statistic - 1.0) <= 1e-9
    assert t.elapsed < 1


def test_criterion_03_example1_condition_c():
    with Timer() as t:
        grid = GridSpec()
        x, curve = ratio_sum_curve(EX1, 1, 1.0, grid, depth=64)
        report = check_theorem4(EX1, Geometric(0.5), grid)
    assert np.all(curve[x >= 32] <= 2.0)
    # the checker reports the same curve
    assert report.condition("c").detail["curve"] == curve.tolist()
    assert t.elapsed < 1


def test_criterion_04_c_minus_r_witness():
    with Timer() as t:
        c = c_indicator(CaiTang(0.5))
        rv = rv_alpha_fit(CaiTang(0.5))
    assert c.verdict == "pass" and c.statistic < 1.1
    assert rv.verdict == "fail" and rv.residual > 0.05
    assert t.elapsed < 1


def test_criterion_05_zeta_moments():
    with Timer() as t:
        finite = Zeta(6.0).moment(4.5)
        divergent = Zeta(6.0).moment(5.5)
    assert finite.finite and math.isfinite(finite.value)
    assert not divergent.finite and divergent.value == math.inf
    assert t.elapsed < 1


def _enumerate(func, laws, pmf, x):
    """Exact P(functional > x) by running over every outcome of discrete laws."""
    total = 0.0
    for n, w in enumerate(pmf):
        if w == 0 or n == 0:
            continue
        atoms = [np.unique(np.asarray(d.values), return_counts=True) for d in laws[:n]]
        p_n = 0.0
        for combo in itertools.product(*[range(a[0].size) for a in atoms]):
            vals = [atoms[k][0][i] for k, i in enumerate(combo)]
            prob = math.prod(atoms[k][1][i] / atoms[k][1].sum() for k, i in enumerate(combo))
            if func is StoppedFunctional.RANDOM_SUM:
                stat = sum(vals)
            elif func is StoppedFunctional.RANDOM_MAX:
                stat = max(vals)
            else:
                stat = max(0.0, *itertools.accumulate(vals))
            if stat > x:
                p_n += prob
        total += w * p_n
    return total


def test_criterion_06_series_vs_enumeration():
    with Timer() as t:
        seq = SequenceSpec.periodic(
            (Empirical((0.0, 0.3, 2.5, 2.5)), Empirical((-1.0, 1.25, 4.0)), Empirical((0.5, 3.1))),
            head={1: Empirical((2.0, 5.5))},
        )
        eta = FiniteSupport((0.1, 0.2, 0.15, 0.25, 0.2, 0.1))
        laws = seq.laws(5)
        for func in StoppedFunctional:
            for x in (2.05, 4.2, 7.07):
                exact = _enumerate(func, laws, eta.probs, x)
                est = stopped_tail(func, seq, eta, x, h=1 / 64)
                if func is StoppedFunctional.RANDOM_MAX:
                    assert est.value == pytest.approx(exact, rel=1e-12)
                else:
                    assert est.lower <= exact <= est.upper, (func, x, est, exact)
        # continuous laws for the maximum: closed-form product per n
        cseq = SequenceSpec.periodic((Exponential(1.0), ParetoShifted(0.0, 3.0), CaiTang(0.5)))
        for x in (1.0, 5.0, 40.0):
            exact = 0.0
            for n, w in enumerate(eta.probs):
                cdf = math.prod(1 - d.survival(x) for d in cseq.laws(n))
                exact += w * (1 - cdf) if n else 0.0
            est = stopped_tail("max", cseq, eta, x)
            assert est.value == pytest.approx(exact, rel=1e-12)
    assert t.elapsed < 10


def test_criterion_07_oracle_agreement():
    with Timer() as t:
        xs = (20.0, 50.0, 100.0)
        eta = Zeta(6.0)
        func = StoppedFunctional.RANDOM_MAX_OF_SUMS
        mc = mc_stopped_tail_grid(func, EX2, eta, xs, MCConfig(samples=10_000_000, seed=42))
        for x, ci in zip(xs, mc):
            br = stopped_tail(func, EX2, eta, x)
            assert max(br.lower, ci.lower) <= min(br.upper, ci.upper), (x, br, ci)
    assert t.elapsed < 120


def test_criterion_08_lemma4_surrogate():
    with Timer() as t:
        seq = SequenceSpec.iid(ParetoShifted(0.0, 3.0))
        near = lemma4_ratio(seq, 2, 1e3, h=1e3 / 2**14)
        far = lemma4_ratio(seq, 2, 1e4, h=1e4 / 2**14)
    assert 0.95 <= near.lower and near.upper <= 1.05
    # certified: the worst case at 1e4 is closer to 1 than the best case at 1e3
    near_gap = min(abs(near.lower - 1), abs(near.upper - 1)) if not near.lower <= 1 <= near.upper else 0.0
    far_gap = max(abs(far.lower - 1), abs(far.upper - 1))
    assert far_gap < near_gap
    assert t.elapsed < 30


def test_criterion_09_lemma1_surrogate():
    with Timer() as t:
        at30, at60 = lemma1_ratio(EX2, 3, [30.0, 60.0], MCConfig(samples=10_000_000, seed=42))
    assert 1.0 <= at30.lower and at30.upper <= 1.1, at30
    assert at60.value < at30.value, (at30, at60)
    assert t.elapsed < 120


def test_criterion_10_subexponential_ratio():
    with Timer() as t:
        pareto = subexp_ratio(ParetoShifted(0.0, 3.0), 1e3)
        expo = subexp_ratio(Exponential(1.0), 20.0)
    assert 1.8 <= pareto.lower and pareto.upper <= 2.2
    assert expo.method == "exact" and expo.detail["closed_form"] == "erlang"
    assert abs(expo.value - 21.0) <= 1e-6
    assert t.elapsed < 30


def test_criterion_11_inclusion_chain():
    with Timer() as t:
        families = [
            ParetoShifted(0.0, 1.0),
            ParetoShifted(0.0, 2.0),
            ParetoShifted(0.0, 3.0),
            ParetoShifted(1.0, 3.0),
            Exponential(1.0),
            Exponential(0.5),
            CaiTang(0.5),
            CaiTang(0.25),
        ]
        for d in families:
            rep = diagnose(d)
            assert set(rep.verdicts) == set(CLASSES)
            assert inclusion_violations(rep.verdicts) == [], (d, rep.verdicts)
    assert t.elapsed < 5


def test_criterion_12_determinism(tmp_path):
    with Timer() as t:
        for name in ("a", "b"):
            assert cli.main(["reproduce", "2", "--seed", "7", "--out", str(tmp_path / name)]) == 0
        files = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert {"tail.csv", "diagnosis.json", "diagnosis.csv", "check.json"} <= set(files)
        for f in files:
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes(), f
    assert t.elapsed < 180
