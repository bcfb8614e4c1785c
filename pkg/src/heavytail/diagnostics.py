"""Finite-grid diagnostics for heavy-tail class membership and closure hypotheses.

Every ``lim sup`` / ``lim inf`` in a class definition is replaced by an
extremum over the upper half of a geometric grid of ``x`` values. Verdicts are
three-valued and always ship with the statistic that produced them; nothing
here certifies a limit.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .distributions import CountingDistribution, SequenceSpec, TailDistribution
from .errors import NonConvergentError, PivotNotInSupportError, ZeroTailError

log = logging.getLogger(__name__)

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
CLASSES = ("H", "L", "D", "C", "R", "S")
# (subclass, superclass) edges of the inclusion diagram
INCLUSIONS = (("R", "C"), ("C", "L"), ("C", "D"), ("C", "S"), ("S", "L"), ("L", "H"), ("D", "H"))

LOG_UNDERFLOW = math.log(1e-290)
O_SMALL_FINAL = 0.01
BOUNDED_CAP = 1e6
GROWTH_FACTOR = 1.5


@dataclass(frozen=True)
class GridSpec:
    x_min: float = 1e2
    x_max: float = 1e8
    points: int = 121
    y_list: tuple = (0.5, 0.75, 0.9, 0.95, 0.99)
    z_list: tuple = tuple(2.0**k for k in range(4, 11))

    def __post_init__(self):
        object.__setattr__(self, "y_list", tuple(float(y) for y in self.y_list))
        object.__setattr__(self, "z_list", tuple(float(z) for z in self.z_list))
        if not 0 < self.x_min < self.x_max:
            raise ValueError("need 0 < x_min < x_max")
        if self.points < 4:
            raise ValueError("need at least 4 grid points")
        ys, zs = np.array(self.y_list), np.array(self.z_list)
        if ys.size == 0 or np.any((ys <= 0) | (ys >= 1)) or np.any(np.diff(ys) <= 0):
            raise ValueError("y_list must be strictly increasing inside (0, 1)")
        if zs.size == 0 or np.any(zs <= 1) or np.any(np.diff(zs) <= 0):
            raise ValueError("z_list must be strictly increasing and > 1")

    @property
    def xs(self) -> np.ndarray:
        return np.geomspace(self.x_min, self.x_max, self.points)

    @property
    def top(self) -> np.ndarray:
        xs = self.xs
        return xs[xs.size // 2 :]

    def to_dict(self):
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "points": self.points,
            "y_list": list(self.y_list),
            "z_list": list(self.z_list),
        }


@dataclass(frozen=True)
class Indicator:
    name: str
    verdict: str
    statistic: float
    detail: dict = field(default_factory=dict, compare=False)

    def to_dict(self):
        return {"name": self.name, "verdict": self.verdict, "statistic": self.statistic, **self.detail}


def _log_tail(d: TailDistribution, x) -> np.ndarray:
    lt = np.atleast_1d(np.asarray(d.log_survival(np.asarray(x, dtype=float)), dtype=float))
    if np.any(lt == -np.inf):
        bad = float(np.asarray(x, dtype=float).ravel()[np.argmax(lt == -np.inf)])
        raise ZeroTailError(f"survival vanishes at x={bad:g}")
    return lt


def _bounded(curve) -> str:
    """``pass`` if finite, below the cap and not growing from the lower to the upper half."""
    curve = np.asarray(curve, dtype=float)
    stat = float(np.max(curve))
    if not stat < BOUNDED_CAP:
        return FAIL
    half = curve.size // 2
    if np.max(curve[half:]) > GROWTH_FACTOR * max(np.max(curve[:half]), 1e-300):
        return INCONCLUSIVE
    return PASS


def _nonincreasing(values, rtol=1e-9) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(np.all(v[1:] <= v[:-1] * (1 + rtol) + 1e-15))


# ---------------------------------------------------------------------------
# class indicators
# ---------------------------------------------------------------------------


def heavy_indicator(d: TailDistribution, grid: GridSpec = GridSpec(), deltas=(0.01, 0.1, 1.0)) -> Indicator:
    """Average slope of ``log survival(x) + delta x`` over the top half, minimized over ``delta``."""
    x = grid.top
    lt = _log_tail(d, x)
    slopes = {delta: float((lt[-1] + delta * x[-1] - lt[0] - delta * x[0]) / (x[-1] - x[0])) for delta in deltas}
    stat = min(slopes.values())
    return Indicator("H", PASS if stat > 0 else FAIL, stat, {"slopes": {str(k): v for k, v in slopes.items()}})


def long_indicator(d: TailDistribution, grid: GridSpec = GridSpec(), y_shift: float = 1.0) -> Indicator:
    if not y_shift > 0:
        raise ValueError("y_shift must be positive")
    x = grid.top
    dev = np.abs(np.expm1(_log_tail(d, x + y_shift) - _log_tail(d, x)))
    final = float(dev[-1])
    if final >= 0.05:
        verdict = FAIL
    elif dev[-1] <= dev[0] * (1 + 1e-9) + 1e-15:
        verdict = PASS
    else:
        verdict = INCONCLUSIVE
    return Indicator("L", verdict, float(dev.max()), {"final": final, "y_shift": y_shift})


def c_curve(d: TailDistribution, grid: GridSpec = GridSpec()) -> np.ndarray:
    """``C(y) = max over the top half of survival(xy) / survival(x)``, one entry per ``y``."""
    x = grid.top
    lt = _log_tail(d, x)
    with np.errstate(over="ignore"):
        return np.array([float(np.exp(np.max(_log_tail(d, x * y) - lt))) for y in grid.y_list])


def c_indicator(d: TailDistribution, grid: GridSpec = GridSpec()) -> Indicator:
    curve = c_curve(d, grid)
    last = float(curve[-1])
    if not last < 1.1:
        verdict = FAIL
    elif _nonincreasing(curve):
        verdict = PASS
    else:
        verdict = INCONCLUSIVE
    return Indicator("C", verdict, last, {"y": list(grid.y_list), "curve": curve.tolist()})


def d_indicator(d: TailDistribution, grid: GridSpec = GridSpec()) -> Indicator:
    x = grid.xs
    with np.errstate(over="ignore"):
        curve = np.exp(_log_tail(d, x / 2) - _log_tail(d, x))
    return Indicator("D", _bounded(curve), float(curve.max()), {"final": float(curve[-1])})


def subexp_indicator(d: TailDistribution, grid: GridSpec = GridSpec(), cfg=None) -> Indicator:
    """Two-fold convolution ratio at the three largest grid points."""
    from .montecarlo import subexp_ratio

    xs = grid.xs[-3:]
    ratios = [subexp_ratio(d, float(x), cfg) for x in xs]
    values = [r.value for r in ratios]
    lows = [r.lower for r in ratios]
    highs = [r.upper for r in ratios]
    if any(hi < 1.7 or lo > 2.3 for lo, hi in zip(lows, highs)):
        verdict = FAIL
    elif all(1.7 <= lo and hi <= 2.3 for lo, hi in zip(lows, highs)):
        slack = max(h - l for l, h in zip(lows, highs))
        verdict = PASS if abs(values[-1] - 2) <= abs(values[0] - 2) + slack else INCONCLUSIVE
    else:
        verdict = INCONCLUSIVE
    detail = {"x": xs.tolist(), "ratio": values, "lower": lows, "upper": highs, "method": ratios[-1].method}
    return Indicator("S", verdict, float(values[-1]), detail)


@dataclass(frozen=True)
class MatuszewskaEstimate:
    j_plus: float
    infinite: bool
    z: tuple
    log_liminf: tuple

    def to_dict(self):
        return {"J_plus": self.j_plus, "infinite": self.infinite, "z": list(self.z), "log_liminf": list(self.log_liminf)}


def matuszewska_upper(d: TailDistribution, grid: GridSpec = GridSpec()) -> MatuszewskaEstimate:
    """Upper Matuszewska index from ``min over the top half of survival(xz) / survival(x)``."""
    x = grid.top
    lt = _log_tail(d, x)
    logs = []
    for z in grid.z_list:
        lz = np.asarray(d.log_survival(x * z), dtype=float)
        logs.append(float(np.min(lz - lt)))
    infinite = any(v < LOG_UNDERFLOW for v in logs)
    j = math.inf if infinite else max(-v / math.log(z) for v, z in zip(logs, grid.z_list))
    return MatuszewskaEstimate(j, infinite, grid.z_list, tuple(logs))


@dataclass(frozen=True)
class RVFit:
    alpha: float | None
    residual: float
    verdict: str

    def to_dict(self):
        return {"alpha": self.alpha, "residual": self.residual, "verdict": self.verdict}


def rv_alpha_fit(d: TailDistribution, grid: GridSpec = GridSpec()) -> RVFit:
    """Least-squares ``log survival = c - alpha log x`` on the top half."""
    x = grid.top
    lx, lt = np.log(x), _log_tail(d, x)
    slope, icpt = np.polyfit(lx, lt, 1)
    residual = float(np.max(np.abs(lt - (icpt + slope * lx))))
    ok = residual <= 0.05
    return RVFit(float(-slope) if ok else None, residual, PASS if ok else FAIL)


# ---------------------------------------------------------------------------
# full diagnosis
# ---------------------------------------------------------------------------


def enforce_inclusions(verdicts: dict) -> tuple[dict, list]:
    """Coerce verdicts so that no subclass passes while a superclass fails."""
    v = dict(verdicts)
    warnings = []
    changed = True
    while changed:
        changed = False
        for sub, sup in INCLUSIONS:
            if v[sub] == PASS and v[sup] == FAIL:
                v[sub] = INCONCLUSIVE
                warnings.append(f"{sub} passed while {sup} failed; {sub} set to inconclusive")
                changed = True
        if v["L"] == PASS and v["D"] == PASS and v["S"] == FAIL:
            v["S"] = INCONCLUSIVE
            warnings.append("L and D passed while S failed; S set to inconclusive")
            changed = True
    for w in warnings:
        log.warning(w)
    return v, warnings


def inclusion_violations(verdicts: dict) -> list:
    out = [(a, b) for a, b in INCLUSIONS if verdicts[a] == PASS and verdicts[b] == FAIL]
    if verdicts["L"] == PASS and verdicts["D"] == PASS and verdicts["S"] == FAIL:
        out.append(("L&D", "S"))
    return out


@dataclass(frozen=True)
class DiagnosisReport:
    law: dict
    verdicts: dict
    statistics: dict
    grid: GridSpec
    index_estimates: dict
    warnings: tuple = ()

    def to_dict(self):
        return {
            "law": self.law,
            "verdicts": dict(self.verdicts),
            "statistics": self.statistics,
            "grid": self.grid.to_dict(),
            "index_estimates": self.index_estimates,
            "warnings": list(self.warnings),
        }

    def csv_rows(self):
        return [(c, self.statistics[c]["statistic"], self.verdicts[c]) for c in CLASSES]


def diagnose(d: TailDistribution, grid: GridSpec = GridSpec(), cfg=None) -> DiagnosisReport:
    """Run every class indicator and index estimate on one law."""
    h = heavy_indicator(d, grid)
    lo = long_indicator(d, grid)
    dd = d_indicator(d, grid)
    c = c_indicator(d, grid)
    rv = rv_alpha_fit(d, grid)
    s = subexp_indicator(d, grid, cfg)
    j = matuszewska_upper(d, grid)
    raw = {"H": h.verdict, "L": lo.verdict, "D": dd.verdict, "C": c.verdict, "R": rv.verdict, "S": s.verdict}
    extra = []
    if (dd.verdict == PASS) == j.infinite and dd.verdict != INCONCLUSIVE:
        raw["D"] = INCONCLUSIVE
        extra.append("D indicator and Matuszewska index disagree; D set to inconclusive")
    verdicts, warns = enforce_inclusions(raw)
    stats = {k: ind.to_dict() for k, ind in (("H", h), ("L", lo), ("D", dd), ("C", c), ("S", s))}
    stats["R"] = {"name": "R", "verdict": rv.verdict, "statistic": rv.residual, "alpha": rv.alpha}
    index = {"J_plus": j.j_plus, "J_plus_infinite": j.infinite, "rv_alpha": rv.alpha, "matuszewska": j.to_dict()}
    return DiagnosisReport(d.to_dict(), verdicts, stats, grid, index, tuple(extra + warns))


# ---------------------------------------------------------------------------
# hypothesis checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionResult:
    name: str
    verdict: str
    statistic: float | None = None
    detail: dict = field(default_factory=dict, compare=False)

    def to_dict(self):
        return {"name": self.name, "verdict": self.verdict, "statistic": self.statistic, **self.detail}


@dataclass(frozen=True)
class HypothesisReport:
    theorem: str
    conditions: tuple

    @property
    def verdict(self) -> str:
        vs = [c.verdict for c in self.conditions]
        if FAIL in vs:
            return FAIL
        if INCONCLUSIVE in vs:
            return INCONCLUSIVE
        return PASS

    def condition(self, name) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"theorem": self.theorem, "verdict": self.verdict, "conditions": [c.to_dict() for c in self.conditions]}


def _combine(verdicts) -> str:
    verdicts = list(verdicts)
    if FAIL in verdicts:
        return FAIL
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return PASS


@lru_cache(maxsize=256)
def _c_verdict(d: TailDistribution, grid: GridSpec) -> str:
    try:
        return c_indicator(d, grid).verdict
    except ZeroTailError:
        return FAIL


@lru_cache(maxsize=256)
def _d_verdict(d: TailDistribution, grid: GridSpec) -> str:
    try:
        return d_indicator(d, grid).verdict
    except ZeroTailError:
        return FAIL


def o_small(dk: TailDistribution, ref: TailDistribution, grid: GridSpec = GridSpec()):
    """``survival_k = o(survival_ref)``: final ratio below 0.01 and nonincreasing on the top half."""
    x = grid.top
    lref = _log_tail(ref, x)
    with np.errstate(divide="ignore", over="ignore"):
        ratio = np.exp(np.asarray(dk.log_survival(x), dtype=float) - lref)
    ok = ratio[-1] < O_SMALL_FINAL and _nonincreasing(ratio)
    return (PASS if ok else FAIL), float(ratio[-1])


def _probe(seq: SequenceSpec, depth: int):
    """Representative indices grouped by distinct law."""
    out = {}
    for k in seq.representative_indices(depth):
        out.setdefault(seq.dist_at(k), []).append(k)
    return out


def _dominated_condition(name, seq, pivot, grid, depth, skip_pivot=True):
    """Each probed law other than the pivot is in C or has a tail that is o(pivot tail)."""
    ref = seq.dist_at(pivot)
    per_k = {}
    for law, ks in _probe(seq, depth).items():
        ks = [k for k in ks if not (skip_pivot and k == pivot)]
        if not ks:
            continue
        cv = _c_verdict(law, grid)
        if cv == PASS:
            v, why = PASS, "C"
        else:
            ov, _ = o_small(law, ref, grid)
            v = PASS if ov == PASS else (INCONCLUSIVE if cv == INCONCLUSIVE else FAIL)
            why = "o-small" if ov == PASS else "neither"
        for k in ks:
            per_k[k] = {"verdict": v, "reason": why}
    verdict = _combine(r["verdict"] for r in per_k.values())
    failing = sorted(k for k, r in per_k.items() if r["verdict"] != PASS)
    return ConditionResult(name, verdict, None, {"per_index": {str(k): r for k, r in sorted(per_k.items())}, "failing": failing})


def _all_c_condition(name, seq, grid, depth):
    per_k = {}
    for law, ks in _probe(seq, depth).items():
        v = _c_verdict(law, grid)
        for k in ks:
            per_k[k] = v
    failing = sorted(k for k, v in per_k.items() if v != PASS)
    return ConditionResult(name, _combine(per_k.values()), None, {"per_index": {str(k): v for k, v in sorted(per_k.items())}, "failing": failing})


def ratio_sum_curve(seq: SequenceSpec, pivot: int, phi_exponent: float, grid: GridSpec, depth: int = 64, n_min: int = 1):
    """``sup_{n_min <= n <= depth} sum_{k<=n} survival_k(x) / (phi(n) survival_pivot(x))`` per top-grid ``x``.

    For periodic rules the large-``n`` limit of the normalized sum is added to
    the supremum; it is ``+inf`` when ``phi`` grows slower than ``n`` and the
    pattern carries mass.
    """
    x = grid.top
    lref = _log_tail(seq.dist_at(pivot), x)
    n_max = max(depth, n_min)
    rel = np.empty((n_max, x.size))
    cache = {}
    for k in range(1, n_max + 1):
        law = seq.dist_at(k)
        if law not in cache:
            with np.errstate(divide="ignore", over="ignore"):
                cache[law] = np.exp(np.asarray(law.log_survival(x), dtype=float) - lref)
        rel[k - 1] = cache[law]
    n = np.arange(1, n_max + 1, dtype=float)[:, None]
    stat = np.cumsum(rel, axis=0) / n**phi_exponent
    curve = stat[n_min - 1 :].max(axis=0)
    if seq.rule != "explicit":
        with np.errstate(divide="ignore", over="ignore"):
            avg = np.mean([np.exp(np.asarray(d.log_survival(x), dtype=float) - lref) for d in seq.pattern], axis=0)
        if phi_exponent < 1:
            limit = np.where(avg > 0, np.inf, 0.0)
        elif phi_exponent == 1:
            limit = avg
        else:
            limit = np.zeros_like(avg)
        curve = np.maximum(curve, limit)
    else:
        tail = cache.get(seq.pattern[0])
        if tail is None:
            with np.errstate(divide="ignore", over="ignore"):
                tail = np.exp(np.asarray(seq.pattern[0].log_survival(x), dtype=float) - lref)
        if phi_exponent < 1:
            curve = np.maximum(curve, np.where(tail > 0, np.inf, 0.0))
        elif phi_exponent == 1:
            curve = np.maximum(curve, tail)
    return x, curve


def _ratio_condition(name, seq, pivot, phi_exponent, grid, depth, n_min=1):
    x, curve = ratio_sum_curve(seq, pivot, phi_exponent, grid, depth, n_min)
    verdict = _bounded(curve)
    return ConditionResult(name, verdict, float(np.max(curve)), {"x": x.tolist(), "curve": curve.tolist(), "depth": depth})


def _series_condition(name, series_fn, label):
    try:
        sv = series_fn()
    except NonConvergentError as exc:
        return ConditionResult(name, INCONCLUSIVE, None, {"quantity": label, "error": str(exc)})
    verdict = PASS if sv.finite else FAIL
    return ConditionResult(name, verdict, float(sv.value), {"quantity": label, "bound": sv.bound, "method": sv.method})


def _moment_search(name, eta, law, grid):
    """Find ``p > J+`` (half-integer grid above the estimate plus 0.2) with a finite ``E eta^(p+1)``."""
    try:
        j = matuszewska_upper(law, grid)
    except ZeroTailError as exc:
        return ConditionResult(name, FAIL, None, {"error": str(exc)})
    if j.infinite:
        return ConditionResult(name, FAIL, None, {"J_plus": "inf", "reason": "no finite p exceeds an infinite index"})
    start = math.floor(2 * (j.j_plus + 0.2)) / 2 + 0.5
    tried = []
    unsure = False
    p = start
    while p <= j.j_plus + 2 + 1e-12:
        try:
            sv = eta.moment(p + 1)
        except NonConvergentError:
            unsure = True
            tried.append({"p": p, "finite": None})
        else:
            tried.append({"p": p, "finite": sv.finite, "value": sv.value})
            if sv.finite:
                return ConditionResult(name, PASS, p, {"J_plus": j.j_plus, "p": p, "moment": sv.value, "tried": tried})
        p += 0.5
    return ConditionResult(name, INCONCLUSIVE if unsure else FAIL, None, {"J_plus": j.j_plus, "tried": tried})


def _pivot_condition(seq, eta, k):
    if not eta.in_support(k):
        raise PivotNotInSupportError(f"P(eta = {k}) = 0")
    return ConditionResult("pivot_in_support", PASS, float(eta.pmf(k)), {"index": k})


def _nonnegative_condition(seq, depth):
    bad = [k for k in seq.representative_indices(depth) if not seq.dist_at(k).nonnegative]
    return ConditionResult("nonnegative", FAIL if bad else PASS, None, {"failing": bad})


def _iid_condition(seq):
    return ConditionResult("iid", PASS if seq.is_iid else FAIL)


def check_theorem1(d, eta: CountingDistribution, grid: GridSpec = GridSpec(), cfg=None, deltas=(0.01, 0.1, 1.0)) -> HypothesisReport:
    """Random sums of iid nonnegative subexponential terms with a light-tailed count."""
    conds = []
    if isinstance(d, SequenceSpec):
        conds.append(_iid_condition(d))
        d = d.dist_at(1)
    conds.append(ConditionResult("nonnegative", PASS if d.nonnegative else FAIL))
    s = subexp_indicator(d, grid, cfg)
    conds.append(ConditionResult("subexponential", s.verdict, s.statistic, s.detail))
    probes = []
    verdict = FAIL
    for delta in deltas:
        try:
            sv = eta.exponential_moment(1 + delta)
            probes.append({"delta": delta, "finite": sv.finite, "value": sv.value})
            if sv.finite:
                verdict = PASS
                break
        except NonConvergentError:
            probes.append({"delta": delta, "finite": None})
            verdict = INCONCLUSIVE if verdict == FAIL else verdict
    conds.append(ConditionResult("exponential_moment", verdict, None, {"probes": probes}))
    return HypothesisReport("1", tuple(conds))


def check_theorem2(seq: SequenceSpec, eta: CountingDistribution, grid: GridSpec = GridSpec(), depth: int = 64) -> HypothesisReport:
    """Closure of D under random sums; the terms must be nonnegative."""
    k = seq.pivot
    conds = [_pivot_condition(seq, eta, k), _nonnegative_condition(seq, depth)]
    law = seq.dist_at(k)
    conds.append(ConditionResult("i", _d_verdict(law, grid), None, {"index": k}))
    conds.append(_ratio_condition("ii", seq, k, 1.0, grid, depth, n_min=k))
    conds.append(_moment_search("iii", eta, law, grid))
    return HypothesisReport("2", tuple(conds))


def check_theorem3(seq: SequenceSpec, eta: CountingDistribution, grid: GridSpec = GridSpec(), depth: int = 64) -> HypothesisReport:
    """Closure of C under random sums of real-valued terms, first term as pivot."""
    conds = [
        ConditionResult("a", _c_verdict(seq.dist_at(1), grid), None, {"index": 1}),
        _dominated_condition("b", seq, 1, grid, depth),
        _ratio_condition("c", seq, 1, 1.0, grid, depth),
        _moment_search("d", eta, seq.dist_at(1), grid),
    ]
    return HypothesisReport("3", tuple(conds))


def check_theorem4(seq: SequenceSpec, eta: CountingDistribution, grid: GridSpec = GridSpec(), depth: int = 64) -> HypothesisReport:
    """Closure of C under the randomly stopped maximum with pivot ``seq.pivot`` and ``phi(n) = n^a``."""
    k = seq.pivot
    if not seq.phi_exponent > 0:
        raise ValueError("phi exponent must be positive")
    conds = [_pivot_condition(seq, eta, k)]
    conds.append(ConditionResult("a", _c_verdict(seq.dist_at(k), grid), None, {"index": k}))
    conds.append(_dominated_condition("b", seq, k, grid, depth))
    conds.append(_ratio_condition("c", seq, k, seq.phi_exponent, grid, depth))
    a = seq.phi_exponent
    conds.append(_series_condition("phi_moment", lambda: eta.moment(a), f"E eta^{a:g}"))
    return HypothesisReport("4", tuple(conds))


def check_theorem5(seq: SequenceSpec, eta: CountingDistribution, grid: GridSpec = GridSpec(), depth: int = 64) -> HypothesisReport:
    """Closure of C under the randomly stopped maximum of sums."""
    conds = (
        _all_c_condition("a", seq, grid, depth),
        _ratio_condition("b", seq, 1, 1.0, grid, depth),
        _moment_search("c", eta, seq.dist_at(1), grid),
    )
    return HypothesisReport("5", conds)


def check_cor1(seq: SequenceSpec, eta: CountingDistribution, grid: GridSpec = GridSpec()) -> HypothesisReport:
    conds = (
        _iid_condition(seq),
        ConditionResult("C", _c_verdict(seq.dist_at(1), grid)),
        _series_condition("mean", lambda: eta.moment(1.0), "E eta"),
    )
    return HypothesisReport("cor1", conds)


def check_cor2(seq: SequenceSpec, eta: CountingDistribution, grid: GridSpec = GridSpec()) -> HypothesisReport:
    conds = (
        _iid_condition(seq),
        ConditionResult("C", _c_verdict(seq.dist_at(1), grid)),
        _moment_search("moment", eta, seq.dist_at(1), grid),
    )
    return HypothesisReport("cor2", conds)


CHECKERS = {
    "1": check_theorem1,
    "2": check_theorem2,
    "3": check_theorem3,
    "4": check_theorem4,
    "5": check_theorem5,
    "cor1": check_cor1,
    "cor2": check_cor2,
}


def check(theorem, seq: SequenceSpec, eta: CountingDistribution, grid: GridSpec = GridSpec(), cfg=None) -> HypothesisReport:
    key = str(theorem).lower()
    if key not in CHECKERS:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {sorted(CHECKERS)}")
    if key == "1":
        return check_theorem1(seq, eta, grid, cfg)
    return CHECKERS[key](seq, eta, grid)
