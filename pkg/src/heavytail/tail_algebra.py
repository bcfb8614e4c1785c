"""Tails of maxima, sums and maxima of sums, fixed and randomly stopped.

For a fixed number of terms ``n``:

* ``max_tail_n`` is exact: ``1 - prod F_k(x)`` evaluated in log space.
* ``sum_tail_grid`` brackets ``P(S_n > x)`` by rounding every increment down
  and up to a lattice of step ``h`` and convolving the two lattice laws; the
  rounded sums sandwich the true sum pathwise, so the bracket is certified up
  to floating-point error.
* ``maxsum_tail_mc_or_grid`` does the same for the running maximum of the
  partial sums using a killed lattice walk.

``stopped_tail`` mixes these per-``n`` terms with the pmf of the counting
variable and truncates the series with a certified remainder bound.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal, special

from .distributions import (
    CountingDistribution,
    Exponential,
    PointMass,
    SequenceSpec,
    positive_part,
)
from .errors import (
    BudgetExceededError,
    DegeneratePivotError,
    NoConvergenceError,
    UnsupportedError,
)

CELL_BUDGET = 200_000_000
_DIRECT_CONV_LIMIT = 16_000_000
_EPS = np.finfo(float).eps


class StoppedFunctional(enum.Enum):
    RANDOM_SUM = "random_sum"
    RANDOM_MAX = "random_max"
    RANDOM_MAX_OF_SUMS = "random_max_of_sums"

    @classmethod
    def parse(cls, value) -> "StoppedFunctional":
        if isinstance(value, cls):
            return value
        aliases = {"sum": cls.RANDOM_SUM, "max": cls.RANDOM_MAX, "maxsum": cls.RANDOM_MAX_OF_SUMS}
        if value in aliases:
            return aliases[value]
        return cls(value)


@dataclass(frozen=True)
class TailEstimate:
    """A tail probability with a bracket ``lower <= value <= upper``."""

    log_value: float
    lower: float
    upper: float
    method: str
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def value(self) -> float:
        # the log round trip can move the value one ulp outside the bracket
        return min(max(math.exp(self.log_value), self.lower), self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, p: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= p <= self.upper + slack

    @classmethod
    def exact(cls, value: float, **detail) -> "TailEstimate":
        value = min(max(float(value), 0.0), 1.0)
        return cls(_log(value), value, value, "exact", detail)

    @classmethod
    def bracket(cls, lower, upper, method, central=None, **detail) -> "TailEstimate":
        lower = min(max(float(lower), 0.0), 1.0)
        upper = min(max(float(upper), lower), 1.0)
        if central is None:
            central = 0.5 * (lower + upper)
        central = min(max(central, lower), upper)
        return cls(_log(central), lower, upper, method, detail)


def _log(p):
    return math.log(p) if p > 0 else -math.inf


# ---------------------------------------------------------------------------
# maxima
# ---------------------------------------------------------------------------


def _log_cdf_sum(seq: SequenceSpec, n, x):
    """``sum_{k <= n} log F_k(x)`` vectorized over ``n`` using the pattern."""
    n = np.asarray(n, dtype=np.int64)
    p = len(seq.pattern)
    total = np.zeros(n.shape)
    for r, d in enumerate(seq.pattern):
        count = np.maximum(0, (n - r + p - 1) // p)
        for k, _ in seq.head:
            if (k - 1) % p == r:
                count = count - (n >= k)
        lc = d.log_cdf(x)
        total = total + np.where(count > 0, count * lc if lc > -math.inf else -math.inf, 0.0)
    for k, d in seq.head:
        total = total + np.where(n >= k, d.log_cdf(x), 0.0)
    return total


def _max_terms(seq, n_values, x):
    if x < 0:
        return np.ones(np.shape(n_values))
    return -np.expm1(_log_cdf_sum(seq, n_values, x))


def max_tail_n(seq: SequenceSpec, n: int, x: float) -> TailEstimate:
    """Exact ``P(max(0, xi_1, ..., xi_n) > x)``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return TailEstimate.exact(1.0 if x < 0 else 0.0, n=0)
    return TailEstimate.exact(float(_max_terms(seq, n, x)), n=n)


def bonferroni_lower_max(seq: SequenceSpec, n: int, x: float) -> float:
    """Lower bound ``s (1 - s)`` with ``s = sum_{k <= n} survival_k(x)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = float(seq.tail_sum(n, x))
    return max(0.0, s * (1.0 - s))


# ---------------------------------------------------------------------------
# lattice engine
# ---------------------------------------------------------------------------


def _convolve(a, b):
    """Linear convolution plus a bound on its per-entry absolute error."""
    if a.size * b.size <= _DIRECT_CONV_LIMIT:
        return np.convolve(a, b), 0.0
    out = signal.fftconvolve(a, b)
    size = a.size + b.size - 1
    err = 8 * _EPS * math.log2(size) * math.sqrt(float(a @ a) * float(b @ b))
    return np.maximum(out, 0.0), err


class _LatticeWalk:
    """Partial sums of lattice-rounded increments, tracked up to cell ``top``.

    ``mode`` is ``"down"`` (floor) or ``"up"`` (ceil). Mass that leaves
    ``[offset, top]`` upward is dropped, so readouts below ``top`` are valid
    only when every increment is nonnegative. ``acc[t]`` accumulates
    ``P(max_{j<=n} S_j > t)``, which is ``P(S_n > t)`` for nonnegative
    increments.
    """

    def __init__(self, h, top, thresholds, mode):
        self.h = h
        self.top = int(top)
        self.mode = mode
        self.offset = 0
        self.p = np.array([1.0])
        self.thresholds = sorted(set(int(t) for t in thresholds))
        self.acc = {t: 0.0 for t in self.thresholds}
        self.err_p = 0.0
        self.err_acc = {t: 0.0 for t in self.thresholds}
        self._cache = {}

    def _increment(self, law, shift, hi):
        h = self.h
        lo = math.floor((law.support_lower - shift) / h)
        key = (law, shift, hi)
        if key in self._cache:
            return self._cache[key]
        jq0 = min(lo - 1, 0)
        j = np.arange(jq0, max(hi, jq0) + 1, dtype=float)
        if self.mode == "up":
            tail = np.asarray(law.survival(j * h + shift), dtype=float)
        else:
            tail = np.asarray(law.survival_left((j + 1) * h + shift), dtype=float)
        tail = np.minimum.accumulate(np.clip(tail, 0.0, 1.0))
        if hi >= lo:
            q = np.maximum(tail[lo - jq0 - 1 : hi - jq0] - tail[lo - jq0 : hi - jq0 + 1], 0.0)
        else:
            q = np.zeros(0)
        out = (lo, jq0, tail, q)
        self._cache[key] = out
        return out

    def step(self, law, shift=0.0):
        hi = self.top - self.offset
        lo, jq0, tail, q = self._increment(law, shift, hi)
        for t in self.thresholds:
            if t < self.offset:
                continue
            ps = self.p[: t - self.offset + 1]
            # Q(t - s) for the cells s = offset, offset + 1, ... held in ps
            qidx = (t - self.offset - np.arange(ps.size)) - jq0
            self.acc[t] += float(ps @ tail[qidx])
            self.err_acc[t] += self.err_p * ps.size
        if q.size == 0 or self.p.size == 0:
            self.p = np.zeros(0)
            return
        new, err = _convolve(self.p, q)
        self.err_p = self.err_p * float(q.sum()) + err
        new_offset = self.offset + lo
        keep = self.top - new_offset + 1
        self.p = new[: max(keep, 0)]
        self.offset = new_offset

    def readout(self, t):
        return self.acc[t], self.err_acc[t]


def _roundoff(lower, upper, n_steps, cells):
    """Widen brackets by a relative floating-point allowance.

    Every array in the walk is nonnegative, so each accumulated sum carries a
    relative rounding error of at most a few ``eps`` per term.
    """
    rho = 8 * _EPS * n_steps * (cells + 1)
    return np.clip(lower * (1 - rho), 0, 1), np.clip(np.maximum(upper * (1 + rho), lower), 0, 1)


def _auto_step(x, span=0.0):
    reach = max(abs(x) + span, 1.0)
    return 2.0 ** math.floor(math.log2(reach / 2048.0))


def _thresholds(t):
    """Cell thresholds for the lower (down) and upper (up) walks."""
    return math.floor(t + 1e-9), math.floor(t - 1e-9)


def _sum_brackets(seq, n_max, x, h):
    """Brackets of ``P(S_n > x)`` for ``n = 1..n_max`` via shifted lattices."""
    laws = seq.laws(n_max)
    if not all(d.bounded_below for d in laws):
        raise UnsupportedError("lattice convolution needs components bounded below")
    shifts = np.array([d.support_lower for d in laws])
    cum = np.cumsum(shifts)
    t = (x - cum) / h
    m_low = [_thresholds(v)[0] for v in t]
    m_up = [_thresholds(v)[1] for v in t]
    top = max(max(m_low), max(m_up), 0)
    if n_max * (top + 1) > CELL_BUDGET:
        raise BudgetExceededError(f"lattice needs {n_max * (top + 1)} cells")
    lower = np.ones(n_max)
    upper = np.ones(n_max)
    for mode, ms, out in (("down", m_low, lower), ("up", m_up, upper)):
        valid = [m for m in ms if m >= 0]
        walk = _LatticeWalk(h, top, valid, mode)
        for i, d in enumerate(laws):
            walk.step(d, shift=float(shifts[i]))
            if ms[i] >= 0:
                v, e = walk.readout(ms[i])
                out[i] = v - e if mode == "down" else v + e
    return _roundoff(lower, upper, n_max, top + 1)


def _maxsum_brackets(seq, n_max, x, h):
    """Brackets of ``P(max_{j<=n} S_j > x)`` for ``n = 1..n_max`` (killed walk)."""
    laws = seq.laws(n_max)
    if not all(d.bounded_below for d in laws):
        raise UnsupportedError("lattice walk needs components bounded below")
    if x < 0:
        return np.ones(n_max), np.ones(n_max)
    ml, mu = _thresholds(x / h)
    span = sum(min(d.support_lower, 0.0) for d in laws)
    width = max(ml, mu) - math.floor(span / h) + 1
    if n_max * width > CELL_BUDGET:
        raise BudgetExceededError(f"lattice walk needs {n_max * width} cells")
    res = []
    for mode, m in (("down", ml), ("up", mu)):
        walk = _LatticeWalk(h, m, [m], mode)
        vals = np.empty(n_max)
        for i, d in enumerate(laws):
            walk.step(d)
            v, e = walk.readout(m)
            vals[i] = v - e if mode == "down" else v + e
        res.append(vals)
    lower, upper = res
    return _roundoff(lower, upper, n_max, width)


def sum_tail_grid(seq: SequenceSpec, n: int, x: float, h: float | None = None) -> TailEstimate:
    """Certified bracket of ``P(S_n > x)`` by lattice rounding with step ``h``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return TailEstimate.exact(1.0 if x < 0 else 0.0, n=0)
    if not seq.bounded_below(n):
        raise UnsupportedError("lattice convolution needs components bounded below")
    if h is None:
        h = _auto_step(x, sum(abs(d.support_lower) for d in seq.laws(n)))
    lower, upper = _sum_brackets(seq, n, x, h)
    return TailEstimate.bracket(lower[-1], upper[-1], "grid_convolution", n=n, h=h)


def _erlang_log_tail(n, rate, x):
    if x <= 0:
        return 0.0
    k = np.arange(n, dtype=float)
    lx = math.log(rate * x)
    return -rate * x + float(special.logsumexp(k * lx - special.gammaln(k + 1)))


def sum_tail(seq: SequenceSpec, n: int, x: float, h: float | None = None) -> TailEstimate:
    """``P(S_n > x)`` by closed form when one applies, otherwise by lattice."""
    if n == 0:
        return TailEstimate.exact(1.0 if x < 0 else 0.0, n=0)
    laws = seq.laws(n)
    if n == 1:
        return TailEstimate.exact(laws[0].survival(x), n=1)
    if all(isinstance(d, PointMass) for d in laws):
        total = sum(d.c for d in laws)
        return TailEstimate.exact(1.0 if total > x else 0.0, n=n)
    if all(type(d) is Exponential and d.rate == laws[0].rate for d in laws):
        lv = _erlang_log_tail(n, laws[0].rate, x)
        p = math.exp(lv)
        return TailEstimate(lv, p, p, "exact", {"n": n, "closed_form": "erlang"})
    return sum_tail_grid(seq, n, x, h)


def maxsum_tail_mc_or_grid(
    seq: SequenceSpec, n: int, x: float, h: float | None = None, mc_config=None
) -> TailEstimate:
    """``P(max(S_0, ..., S_n) > x)``.

    Nonnegative components make the running maximum equal to ``S_n``, so the
    sum bracket is returned. Components bounded below use the killed lattice
    walk; anything else falls back to Monte Carlo.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return TailEstimate.exact(1.0 if x < 0 else 0.0, n=0)
    if seq.nonnegative(n):
        return sum_tail_grid(seq, n, x, h)
    if seq.bounded_below(n):
        if h is None:
            h = _auto_step(x, sum(abs(d.support_lower) for d in seq.laws(n)))
        try:
            lower, upper = _maxsum_brackets(seq, n, x, h)
            return TailEstimate.bracket(lower[-1], upper[-1], "grid_convolution", n=n, h=h)
        except BudgetExceededError:
            pass
    from .montecarlo import MCConfig, mc_fixed_n_tail

    return mc_fixed_n_tail(StoppedFunctional.RANDOM_MAX_OF_SUMS, seq, n, x, mc_config or MCConfig())


# ---------------------------------------------------------------------------
# Lemma-3 style envelope (heuristic acceleration only)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lemma3Envelope:
    """``c_hat * n^(p+1) * survival_nu(x)`` with ``c_hat`` fitted on a grid."""

    seq: SequenceSpec
    nu: int
    p: float
    c_hat: float
    recalibrated: bool
    observations: tuple = field(default=(), compare=False, repr=False)

    def bound(self, n, x):
        n = np.asarray(n, dtype=float)
        out = self.c_hat * n ** (self.p + 1) * self.seq.dist_at(self.nu).survival(x)
        return out if np.ndim(out) else float(out)


def _positive_seq(seq):
    return SequenceSpec(
        pattern=tuple(positive_part(d) for d in seq.pattern),
        head=tuple((k, positive_part(d)) for k, d in seq.head),
        pivot=seq.pivot,
        phi_exponent=seq.phi_exponent,
        rule=seq.rule,
    )


def _observe_ratios(pseq, nu, p, ns, xs, h):
    d_nu = pseq.dist_at(nu)
    obs = []
    for x in xs:
        s_nu = d_nu.survival(x)
        if not s_nu > 0:
            raise DegeneratePivotError(f"survival of xi_{nu} vanishes at x={x}")
        n_max = max(ns)
        step = h if h is not None else _auto_step(x, 0.0)
        _, upper = _sum_brackets(pseq, n_max, x, step)
        for n in ns:
            obs.append((int(n), float(x), float(upper[n - 1] / (n ** (p + 1) * s_nu))))
    return obs


def calibrate_lemma3(
    seq: SequenceSpec,
    nu: int,
    p: float,
    calib_grid=((1, 2, 4), (10.0, 30.0, 100.0)),
    validation_grid=None,
    h: float | None = None,
    safety: float = 2.0,
) -> Lemma3Envelope:
    """Fit ``c_hat`` as ``safety`` times the largest observed ratio.

    Observed tails are upper brackets of ``P(S_n^+ > x)``, which dominate
    both ``S_n`` and its running maximum. If the fitted envelope fails to
    dominate on ``validation_grid`` (default: doubled ``n`` values on the same
    ``x``), ``c_hat`` is refitted over both grids and ``recalibrated`` is set.
    """
    ns, xs = calib_grid
    ns = sorted(set(int(n) for n in ns) | {1})
    pseq = _positive_seq(seq)
    obs = _observe_ratios(pseq, nu, p, ns, xs, h)
    c_hat = safety * max(r for _, _, r in obs)
    if validation_grid is None:
        validation_grid = (sorted({2 * n for n in ns} | {4 * max(ns)}), xs)
    vns, vxs = validation_grid
    vobs = _observe_ratios(pseq, nu, p, list(vns), list(vxs), h)
    recal = any(r > c_hat for _, _, r in vobs)
    if recal:
        c_hat = safety * max(r for _, _, r in obs + vobs)
    return Lemma3Envelope(seq, nu, p, c_hat, recal, tuple(obs + vobs))


def lemma3_envelope(seq, nu, p, n, x, calib_grid=((1, 2, 4), (10.0, 30.0, 100.0))) -> float:
    return calibrate_lemma3(seq, nu, p, calib_grid).bound(n, x)


# ---------------------------------------------------------------------------
# randomly stopped tails
# ---------------------------------------------------------------------------


def _crude_bound(func, seq, n, x):
    """Certified ``P(functional_n > x) <= min(1, sum_k survival_k(y))``.

    ``y = x`` for the maximum. For sums, ``S_n > x`` forces some
    ``xi_k > x / n``, so ``y = x / n``; the running maximum inherits it.
    """
    n = np.asarray(n)
    if func is StoppedFunctional.RANDOM_MAX:
        return np.minimum(1.0, seq.tail_sum(n, x))
    return np.minimum(1.0, seq.tail_sum(n, x / np.maximum(n, 1)))


def _series_remainder(eta, k, bound_fn, target):
    """``sum_{n > k} pmf(n) * bound_fn(n)`` plus the mass beyond the last term."""
    stop = eta.max_support
    if stop is not None and k >= stop:
        return 0.0
    total = 0.0
    start = k + 1
    chunk = 4096
    while True:
        end = start + chunk - 1
        if stop is not None:
            end = min(end, stop)
        n = np.arange(start, end + 1)
        total += math.fsum(eta.pmf(n) * bound_fn(n))
        if stop is not None and end >= stop:
            return total
        rest = float(eta.tail_mass(end))
        if rest <= 1e-3 * target or end - k > 2_000_000:
            return total + rest
        start = end + 1
        chunk *= 2


def _per_n_terms(func, seq, n_max, x, h):
    if func is StoppedFunctional.RANDOM_MAX:
        t = _max_terms(seq, np.arange(1, n_max + 1), x)
        return t, t, "exact"
    if func is StoppedFunctional.RANDOM_MAX_OF_SUMS and not seq.nonnegative(n_max):
        lo, up = _maxsum_brackets(seq, n_max, x, h)
        return lo, up, "grid_convolution"
    lo, up = _sum_brackets(seq, n_max, x, h)
    return lo, up, "grid_convolution"


def stopped_tail(
    func,
    seq: SequenceSpec,
    eta: CountingDistribution,
    x: float,
    tol: float = 1e-3,
    h: float | None = None,
    level_cap: int = 4096,
    envelope: Lemma3Envelope | None = None,
) -> TailEstimate:
    """Tail of a randomly stopped functional via its pmf-weighted series.

    Terms ``n = 1..K`` are exact (maximum) or lattice brackets (sum kinds).
    The remainder ``sum_{n > K}`` is bounded by the certified crude bound;
    an optional Lemma-3 envelope only decides when to stop early and never
    enters the reported bracket.
    """
    func = StoppedFunctional.parse(func)
    if not x > 0:
        raise ValueError("x must be positive")
    if not 0 < tol <= 0.1:
        raise ValueError("tol must lie in (0, 0.1]")
    if func is not StoppedFunctional.RANDOM_MAX and h is None:
        h = _auto_step(x, 0.0)
    stop = eta.max_support
    k = 16 if stop is None else min(stop, level_cap)
    if func is StoppedFunctional.RANDOM_MAX:
        k = min(256, level_cap) if stop is None else k
    while True:
        k = max(k, 1)
        lo_n, up_n, method = _per_n_terms(func, seq, k, x, h)
        w = eta.pmf(np.arange(1, k + 1))
        lower = math.fsum(w * lo_n)
        upper_terms = math.fsum(w * up_n)
        central = math.fsum(w * 0.5 * (lo_n + up_n))
        target = tol * lower
        rem = _series_remainder(eta, k, lambda n: _crude_bound(func, seq, n, x), target)
        heur = None
        if envelope is not None and rem > target:
            heur = _series_remainder(eta, k, lambda n: np.minimum(1.0, envelope.bound(n, x)), target)
        converged = rem <= target or (heur is not None and heur <= target) or upper_terms + rem == 0
        if rem == 0 and method == "exact":
            est_method = "exact"
        elif method == "exact":
            est_method = "series_truncated"
        else:
            est_method = method
        detail = {"K": k, "remainder": rem, "tol": tol}
        if h is not None and func is not StoppedFunctional.RANDOM_MAX:
            detail["h"] = h
        if heur is not None:
            detail["heuristic_remainder"] = heur
        # pmf weights carry a few ulps of relative error each
        rho = 8 * _EPS * (k + 1)
        est = TailEstimate.bracket(
            lower * (1 - rho), (upper_terms + rem) * (1 + rho), est_method, central=central, **detail
        )
        if converged:
            return est
        if k >= level_cap or (stop is not None and k >= stop):
            raise NoConvergenceError(f"remainder {rem:.3g} exceeds tol*lower at K={k}", estimate=est)
        k = min(2 * k, level_cap)
