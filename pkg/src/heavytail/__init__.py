"""Tails of randomly stopped sums, maxima and maxima of sums of independent,
not necessarily identically distributed, heavy-tailed random variables."""

from .distributions import (
    CaiTang,
    CountingDistribution,
    DegenerateAt,
    DegenerateAtZero,
    Empirical,
    Exponential,
    FiniteSupport,
    Geometric,
    ParetoShifted,
    PointMass,
    Poisson,
    SequenceSpec,
    SeriesValue,
    TailDistribution,
    Zeta,
    positive_part,
)
from .diagnostics import DiagnosisReport, GridSpec, HypothesisReport, check, diagnose, matuszewska_upper
from .montecarlo import MCConfig, lemma1_ratio, lemma4_ratio, mc_stopped_tail, subexp_ratio
from .rng import RandomStream
from .tail_algebra import StoppedFunctional, TailEstimate, max_tail_n, stopped_tail, sum_tail

__version__ = "0.1.0"

__all__ = [
    "CaiTang", "CountingDistribution", "DegenerateAt", "DegenerateAtZero", "DiagnosisReport", "Empirical",
    "Exponential", "FiniteSupport", "Geometric", "GridSpec", "HypothesisReport", "MCConfig", "ParetoShifted",
    "PointMass", "Poisson", "RandomStream", "SequenceSpec", "SeriesValue", "StoppedFunctional", "TailDistribution",
    "TailEstimate", "Zeta", "check", "diagnose", "lemma1_ratio", "lemma4_ratio", "matuszewska_upper", "max_tail_n",
    "mc_stopped_tail", "positive_part", "stopped_tail", "subexp_ratio", "sum_tail",
]
