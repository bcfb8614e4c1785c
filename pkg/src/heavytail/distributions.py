"""Concrete laws used throughout the package.

Two families live here:

* ``TailDistribution`` subclasses: real-valued laws exposing survival,
  log-survival, left-survival ``P(X >= x)``, tail quantile and sampling.
* ``CountingDistribution`` subclasses: laws on ``{0, 1, 2, ...}`` exposing pmf,
  tail mass and moments whose convergence or divergence is certified.

``SequenceSpec`` assigns a ``TailDistribution`` to every index ``k >= 1``.

All evaluation functions accept scalars or arrays and return a Python float
for scalar input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .errors import NonConvergentError
from .rng import RandomStream

_LOG_TINY = math.log(1e-300)


def _out(x, value):
    if np.ndim(x) == 0:
        return float(value)
    return value


def _exp(logv):
    with np.errstate(under="ignore"):
        return np.exp(logv)


# ---------------------------------------------------------------------------
# real-valued laws
# ---------------------------------------------------------------------------


class TailDistribution:
    """Base class. Subclasses implement ``_log_survival`` and ``_quantile``."""

    kind = "abstract"
    continuous = True

    @property
    def support_lower(self) -> float:
        raise NotImplementedError

    @property
    def bounded_below(self) -> bool:
        return math.isfinite(self.support_lower)

    @property
    def nonnegative(self) -> bool:
        return self.support_lower >= 0

    def log_survival(self, x):
        x = np.asarray(x, dtype=float)
        return _out(x, self._log_survival(x))

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return _out(x, _exp(self._log_survival(x)))

    def survival_left(self, x):
        """``P(X >= x)``; differs from ``survival`` only at atoms."""
        return self.survival(x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(x, -np.expm1(self._log_survival(x)))

    def log_cdf(self, x):
        """``log P(X <= x)`` computed as ``log1p(-survival)``."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return _out(x, np.log1p(-_exp(self._log_survival(x))))

    def quantile(self, u):
        """Tail quantile ``inf{x : survival(x) <= u}`` for ``u`` in (0, 1]."""
        u = np.asarray(u, dtype=float)
        return _out(u, self._quantile(u))

    def sample(self, stream: RandomStream, n: int) -> np.ndarray:
        return self._quantile(stream.uniform(n))

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _log_survival(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _quantile(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(TailDistribution):
    rate: float = 1.0
    kind = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be positive")

    @property
    def support_lower(self):
        return 0.0

    def _log_survival(self, x):
        return np.where(x < 0, 0.0, -self.rate * np.maximum(x, 0.0))

    def _quantile(self, u):
        return np.maximum(-np.log(np.minimum(u, 1.0)) / self.rate, 0.0)

    def to_dict(self):
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class ParetoShifted(TailDistribution):
    """Tail ``(1 + shift + x)^(-alpha)`` for ``x >= -shift``."""

    shift: float = 0.0
    alpha: float = 1.0
    kind = "pareto_shifted"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.shift >= 0:
            raise ValueError("shift must be >= 0")

    @property
    def support_lower(self):
        return -float(self.shift)

    def _log_survival(self, x):
        t = np.maximum(x + self.shift, 0.0)
        return np.where(x < -self.shift, 0.0, -self.alpha * np.log1p(t))

    def _quantile(self, u):
        u = np.minimum(u, 1.0)
        return np.expm1(-np.log(u) / self.alpha) - self.shift

    def to_dict(self):
        return {"kind": self.kind, "shift": self.shift, "alpha": self.alpha}


@dataclass(frozen=True)
class PointMass(TailDistribution):
    c: float = 0.0
    kind = "point_mass"
    continuous = False

    @property
    def support_lower(self):
        return float(self.c)

    def _log_survival(self, x):
        return np.where(x < self.c, 0.0, -np.inf)

    def survival_left(self, x):
        x = np.asarray(x, dtype=float)
        return _out(x, np.where(x <= self.c, 1.0, 0.0))

    def _quantile(self, u):
        return np.full(np.shape(u), float(self.c))

    def to_dict(self):
        return {"kind": self.kind, "c": self.c}


@dataclass(frozen=True)
class DegenerateAtZero(PointMass):
    kind = "degenerate_at_zero"

    def __post_init__(self):
        if self.c != 0.0:
            raise ValueError("DegenerateAtZero has its atom at 0")

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class CaiTang(TailDistribution):
    """Law of ``(1 + U) * 2**G`` with ``U ~ U[0, 1]`` and ``P(G = l) = (1-q) q**l``.

    The tail is piecewise linear on dyadic cells: for ``2**m <= x < 2**(m+1)``
    it equals ``q**m * ((1 - q) * (2 - x / 2**m) + q)``.
    """

    q: float = 0.5
    kind = "cai_tang"

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")

    @property
    def support_lower(self):
        return 1.0

    def _log_survival(self, x):
        xc = np.maximum(x, 1.0)
        mant, e = np.frexp(xc)
        m = (e - 1).astype(float)
        u = 2.0 * mant  # x / 2**m, in [1, 2)
        inner = (1.0 - self.q) * (2.0 - u) + self.q
        return np.where(x < 1.0, 0.0, m * math.log(self.q) + np.log(inner))

    def _quantile(self, u):
        u = np.minimum(np.asarray(u, dtype=float), 1.0)
        logq = math.log(self.q)
        logu = np.log(u)
        m = np.floor(logu / logq)
        # guard against rounding putting u just outside (q^(m+1), q^m]
        m = np.where(m * logq < logu - 1e-15, m - 1, m)
        m = np.maximum(m, 0.0)
        ratio = np.exp(logu - m * logq)  # u / q^m in (q, 1]
        v = 2.0 - (ratio - self.q) / (1.0 - self.q)
        return np.ldexp(np.clip(v, 1.0, 2.0), m.astype(int))

    def sample(self, stream, n):
        gen = stream.generator
        u = gen.random(n)
        v = 1.0 - gen.random(n)
        g = np.floor(np.log(v) / math.log(self.q))
        return np.ldexp(1.0 + u, g.astype(int))

    def to_dict(self):
        return {"kind": self.kind, "q": self.q}


def cai_tang_survival(q: float, x):
    """Closed-form tail of the Cai-Tang law (see :class:`CaiTang`)."""
    return CaiTang(q).survival(x)


@dataclass(frozen=True)
class Empirical(TailDistribution):
    """Plug-in law of a sample; ``survival(x) = #{X_i > x} / N``."""

    values: tuple = ()
    bounded_below_declared: bool = True
    kind = "empirical"
    continuous = False
    _sorted: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        arr = np.sort(np.asarray(self.values, dtype=float))
        if arr.size == 0:
            raise ValueError("empirical law needs at least one value")
        if not np.all(np.isfinite(arr)):
            raise ValueError("empirical values must be finite")
        object.__setattr__(self, "values", tuple(arr.tolist()))
        object.__setattr__(self, "_sorted", arr)

    @property
    def support_lower(self):
        return float(self._sorted[0]) if self.bounded_below_declared else -math.inf

    def _count_above(self, x, side):
        return self._sorted.size - np.searchsorted(self._sorted, x, side=side)

    def _log_survival(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self._count_above(x, "right") / self._sorted.size)

    def survival_left(self, x):
        x = np.asarray(x, dtype=float)
        return _out(x, self._count_above(x, "left") / self._sorted.size)

    def _quantile(self, u):
        n = self._sorted.size
        k = n - np.floor(np.asarray(u) * n + 1e-9).astype(int) - 1
        return self._sorted[np.clip(k, 0, n - 1)]

    def sample(self, stream, n):
        return self._sorted[stream.generator.integers(0, self._sorted.size, n)]

    def to_dict(self):
        d = {"kind": self.kind, "sample": list(self.values)}
        if not self.bounded_below_declared:
            d["bounded_below"] = False
        return d


@dataclass(frozen=True)
class PositivePart(TailDistribution):
    """Law of ``max(X, 0)`` for a base law ``X``."""

    base: TailDistribution = None
    kind = "positive_part"

    @property
    def continuous(self):
        return False

    @property
    def support_lower(self):
        return 0.0

    def _log_survival(self, x):
        return np.where(x < 0, 0.0, self.base._log_survival(x))

    def survival_left(self, x):
        x = np.asarray(x, dtype=float)
        return _out(x, np.where(x <= 0, 1.0, self.base.survival_left(x)))

    def _quantile(self, u):
        return np.maximum(self.base._quantile(u), 0.0)

    def sample(self, stream, n):
        return np.maximum(self.base.sample(stream, n), 0.0)

    def to_dict(self):
        return {"kind": self.kind, "base": self.base.to_dict()}


def positive_part(d: TailDistribution) -> TailDistribution:
    return d if d.nonnegative else PositivePart(d)


# ---------------------------------------------------------------------------
# certified series
# ---------------------------------------------------------------------------

REL_TOL = 1e-10
MAX_TERMS = 50_000_000


@dataclass(frozen=True)
class SeriesValue:
    """Value of a nonnegative series with a bound on the truncation error.

    ``value`` is ``inf`` when divergence was certified.
    """

    value: float
    bound: float
    terms: int
    method: str

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


def _divergent(method, terms=0):
    return SeriesValue(math.inf, 0.0, terms, method)


def _ratio_series(log_term, log_ratio, start=1, chunk=256):
    """Sum ``exp(log_term(n))`` for ``n >= start``.

    ``log_ratio(n)`` must bound ``log(t_{n+1} / t_n)`` from above and be
    nonincreasing in ``n``; once it drops below zero the tail after ``N`` is
    at most ``t_N / (1 - rho_N)``.
    """
    total = 0.0
    comp = 0.0
    n0 = start
    while n0 - start < MAX_TERMS:
        n = np.arange(n0, n0 + chunk, dtype=float)
        terms = _exp(log_term(n))
        for t in terms:  # Kahan summation keeps 1e-10 relative accuracy honest
            y = t - comp
            s = total + y
            comp = (s - total) - y
            total = s
        n_next = n0 + chunk
        lr = float(log_ratio(float(n_next)))
        if lr < 0:
            tail = float(_exp(log_term(np.array([float(n_next)])))[0]) / -math.expm1(lr)
            if tail <= REL_TOL * total or (total == 0 and tail == 0):
                return SeriesValue(total + tail / 2, tail / 2 + 4e-16 * total, int(n_next - start), "ratio_test")
        n0 = n_next
        chunk = min(chunk * 2, 1 << 20)
    raise NonConvergentError("series not certified within the term cap", partial=total)


_EM_COEFFS = (1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160)  # B_2j / (2j)!


def _hurwitz(s, a):
    """Vectorized core of :func:`hurwitz_zeta`; returns (value, bound)."""
    a = np.asarray(a, dtype=float)
    m_direct = 24
    k = np.arange(m_direct - 1, -1, -1, dtype=float)
    head = np.sum((k[:, None] + a.ravel()[None, :]) ** -s, axis=0).reshape(a.shape)
    t = m_direct + a
    rem = t ** (1 - s) / (s - 1) + 0.5 * t**-s
    poch = s
    power = t ** (-s - 1)
    last = None
    for j, c in enumerate(_EM_COEFFS):
        term = c * poch * power
        if j == len(_EM_COEFFS) - 1:
            last = term
        else:
            rem = rem + term
        poch *= (s + 2 * j + 1) * (s + 2 * j + 2)
        power = power / (t * t)
    value = head + rem
    return value, np.abs(last) + 4e-16 * value


def hurwitz_zeta(s: float, a: float) -> SeriesValue:
    """``sum_{k>=0} (k + a)^(-s)`` for ``s > 1``, ``a >= 1``.

    Direct summation of the first terms, then the integral-test remainder with
    Euler-Maclaurin corrections; ``bound`` is the first omitted correction.
    """
    if not s > 1:
        raise ValueError("s must exceed 1")
    value, bound = _hurwitz(s, a)
    return SeriesValue(float(value), float(bound), 24, "euler_maclaurin")


# ---------------------------------------------------------------------------
# counting laws
# ---------------------------------------------------------------------------


class CountingDistribution:
    kind = "abstract"

    def pmf(self, n):
        n = np.asarray(n)
        with np.errstate(divide="ignore"):
            return _out(n, _exp(self._log_pmf(n.astype(float))))

    def log_pmf(self, n):
        n = np.asarray(n)
        return _out(n, self._log_pmf(n.astype(float)))

    def tail_mass(self, n):
        """``P(eta > n)``, evaluated without cancellation."""
        n = np.asarray(n)
        return _out(n, self._tail_mass(n.astype(np.int64)))

    @property
    def max_support(self) -> int | None:
        return None

    @property
    def nondegenerate_at_zero(self) -> bool:
        return self.pmf(0) < 1.0

    def in_support(self, k: int) -> bool:
        return k >= 0 and self.pmf(k) > 0

    def moment(self, r: float) -> SeriesValue:
        """``E eta^r`` with certified truncation error (``inf`` if divergent)."""
        if not r > 0:
            raise ValueError("moment order must be positive")
        return self._moment(float(r))

    def exponential_moment(self, base: float) -> SeriesValue:
        """``E base^eta`` with the same certification contract as ``moment``."""
        if not base > 1:
            raise ValueError("base must exceed 1")
        return self._exp_moment(float(base))

    def sample(self, stream: RandomStream, n: int) -> np.ndarray:
        raise NotImplementedError

    def sample_above(self, stream: RandomStream, n: int, cap: int) -> np.ndarray:
        """Draws from the law of ``eta`` conditioned on ``eta > cap``."""
        t_cap = float(self.tail_mass(cap))
        if t_cap <= 0:
            raise ValueError(f"P(eta > {cap}) is zero")
        hi = cap + 1
        stop = self.max_support
        while True:
            if stop is not None and hi >= stop:
                hi = stop
                break
            if self.tail_mass(hi) <= 1e-13 * t_cap:
                break
            hi = cap + 2 * (hi - cap)
        grid = np.arange(cap + 1, hi + 1)
        tails = self.tail_mass(grid)
        gen = stream.generator
        u = (1.0 - gen.random(n)) * t_cap
        # smallest N > cap with P(eta > N) < u; tails is nonincreasing
        idx = np.searchsorted(-tails, -u, side="right")
        out = np.empty(n, dtype=np.int64)
        inside = idx < grid.size
        out[inside] = grid[idx[inside]]
        for i in np.flatnonzero(~inside):
            while True:
                v = int(self.sample(stream, 1)[0])
                if v > hi:
                    out[i] = v
                    break
        return out

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _log_pmf(self, n):
        raise NotImplementedError

    def _tail_mass(self, n):
        raise NotImplementedError


def _log_pow(n, r):
    with np.errstate(divide="ignore"):
        return r * np.log(n)


@dataclass(frozen=True)
class DegenerateAt(CountingDistribution):
    n: int = 1
    kind = "degenerate"

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError("n must be a nonnegative integer")

    @property
    def max_support(self):
        return int(self.n)

    def _log_pmf(self, k):
        return np.where(k == self.n, 0.0, -np.inf)

    def _tail_mass(self, k):
        return np.where(k < self.n, 1.0, 0.0)

    def _moment(self, r):
        return SeriesValue(float(self.n) ** r, 0.0, 1, "exact")

    def _exp_moment(self, b):
        return SeriesValue(b ** float(self.n), 0.0, 1, "exact")

    def sample(self, stream, n):
        return np.full(n, int(self.n), dtype=np.int64)

    def to_dict(self):
        return {"kind": self.kind, "n": int(self.n)}


@dataclass(frozen=True)
class Geometric(CountingDistribution):
    """``P(eta = l) = (1 - q) q^l`` on ``l >= 0``."""

    q: float = 0.5
    kind = "geometric"

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")

    def _log_pmf(self, k):
        return np.where(k < 0, -np.inf, math.log1p(-self.q) + np.maximum(k, 0) * math.log(self.q))

    def _tail_mass(self, k):
        return np.where(k < 0, 1.0, _exp((np.maximum(k, 0) + 1.0) * math.log(self.q)))

    def _moment(self, r):
        lq, l1q = math.log(self.q), math.log1p(-self.q)
        return _ratio_series(
            lambda n: l1q + n * lq + r * np.log(n),
            lambda n: lq + r * math.log1p(1.0 / n),
        )

    def _exp_moment(self, b):
        lrho = math.log(self.q) + math.log(b)
        if lrho >= 0:
            return _divergent("ratio_test")
        l1q = math.log1p(-self.q)
        s = _ratio_series(lambda n: l1q + n * lrho, lambda n: lrho, start=1)
        return SeriesValue(s.value + (1 - self.q), s.bound, s.terms + 1, s.method)

    def sample(self, stream, n):
        return stream.generator.geometric(1.0 - self.q, n).astype(np.int64) - 1

    def to_dict(self):
        return {"kind": self.kind, "q": self.q}


@dataclass(frozen=True)
class Poisson(CountingDistribution):
    lam: float = 1.0
    kind = "poisson"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")

    def _log_pmf(self, k):
        kk = np.maximum(k, 0)
        return np.where(k < 0, -np.inf, -self.lam + kk * math.log(self.lam) - special.gammaln(kk + 1))

    def _tail_mass(self, k):
        from scipy.stats import poisson

        return poisson.sf(k, self.lam)

    def _moment(self, r):
        ll = math.log(self.lam)
        return _ratio_series(
            lambda n: -self.lam + n * ll - special.gammaln(n + 1) + r * np.log(n),
            lambda n: ll - math.log(n + 1) + r * math.log1p(1.0 / n),
        )

    def _exp_moment(self, b):
        llb = math.log(self.lam * b)
        s = _ratio_series(
            lambda n: -self.lam + n * llb - special.gammaln(n + 1),
            lambda n: llb - math.log(n + 1),
            start=1,
        )
        return SeriesValue(s.value + math.exp(-self.lam), s.bound, s.terms + 1, s.method)

    def sample(self, stream, n):
        return stream.generator.poisson(self.lam, n).astype(np.int64)

    def to_dict(self):
        return {"kind": self.kind, "lambda": self.lam}


@dataclass(frozen=True)
class Zeta(CountingDistribution):
    """``P(eta = m) = (m + 1)^(-s) / zeta(s)`` on ``m >= 0``."""

    s: float = 2.0
    kind = "zeta"
    _log_norm: float = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.s > 1:
            raise ValueError("s must exceed 1")
        object.__setattr__(self, "_log_norm", math.log(hurwitz_zeta(self.s, 1.0).value))

    @property
    def normalizer(self) -> float:
        return math.exp(self._log_norm)

    def _log_pmf(self, k):
        with np.errstate(invalid="ignore"):
            return np.where(k < 0, -np.inf, -self.s * np.log1p(np.maximum(k, 0)) - self._log_norm)

    def _tail_mass(self, k):
        vals, _ = _hurwitz(self.s, np.maximum(k, -1) + 2.0)
        return np.where(k < 0, 1.0, vals * math.exp(-self._log_norm))

    def _moment(self, r):
        s = self.s
        if r >= s - 1:
            # (n+1)^(-s) n^r >= 2^(-s) n^(r-s) >= 2^(-s) / n: harmonic comparison
            return _divergent("comparison")
        a, b = s - r - 1, r + 1

        def tail_integral(t):
            return special.betainc(a, b, 1.0 / (1.0 + t)) * special.beta(a, b)

        def f(t):
            return t**r * (1.0 + t) ** -s

        # f'' >= 0 beyond the larger root of this quadratic; there the midpoint rule
        # underestimates and the trapezoid rule overestimates, which brackets the tail
        ca = (r - s) ** 2 + (s - r)
        cb = 2 * r * (r - s) - 2 * r
        cc = r * r - r
        disc = cb * cb - 4 * ca * cc
        root = (-cb + math.sqrt(max(disc, 0.0))) / (2 * ca) if disc > 0 else 0.0
        n_cut = max(1024, int(math.ceil(root)) + 2)
        partial = 0.0
        done = 0
        while n_cut <= MAX_TERMS:
            n = np.arange(done + 1, n_cut + 1, dtype=float)
            partial += float(np.sum(f(n)[::-1]))
            done = n_cut
            lo = tail_integral(n_cut) - f(n_cut) / 2
            hi = tail_integral(n_cut + 0.5)
            half = (hi - lo) / 2
            total = partial + (lo + hi) / 2
            if half <= REL_TOL * total:
                norm = math.exp(-self._log_norm)
                return SeriesValue(total * norm, (half + 1e-15 * total) * norm, n_cut, "integral_test")
            n_cut *= 4
        raise NonConvergentError("zeta moment not certified", partial=partial * math.exp(-self._log_norm))

    def _exp_moment(self, b):
        # terms b^n (n+1)^(-s) eventually increase, so they do not vanish
        return _divergent("ratio_test")

    def sample(self, stream, n):
        return stream.generator.zipf(self.s, n).astype(np.int64) - 1

    def to_dict(self):
        return {"kind": self.kind, "s": self.s}


@dataclass(frozen=True)
class FiniteSupport(CountingDistribution):
    """Explicit pmf table; ``probs[i] = P(eta = i)``."""

    probs: tuple = (1.0,)
    kind = "finite"
    _cum_tail: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0 or np.any(p < 0):
            raise ValueError("pmf table must be a nonempty list of nonnegative numbers")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"pmf sums to {p.sum():.15g}, not 1")
        while p.size > 1 and p[-1] == 0:
            p = p[:-1]
        object.__setattr__(self, "probs", tuple(p.tolist()))
        # tail[i] = P(eta > i), accumulated from the right
        tail = np.concatenate([np.cumsum(p[::-1])[::-1][1:], [0.0]])
        object.__setattr__(self, "_cum_tail", tail)

    @classmethod
    def from_mapping(cls, table: dict) -> "FiniteSupport":
        top = max(int(k) for k in table)
        probs = [0.0] * (top + 1)
        for k, v in table.items():
            probs[int(k)] = float(v)
        return cls(tuple(probs))

    @property
    def max_support(self):
        return len(self.probs) - 1

    def _log_pmf(self, k):
        p = np.asarray(self.probs)
        ki = k.astype(np.int64)
        inside = (ki >= 0) & (ki < p.size)
        vals = np.where(inside, p[np.clip(ki, 0, p.size - 1)], 0.0)
        with np.errstate(divide="ignore"):
            return np.log(vals)

    def _tail_mass(self, k):
        t = self._cum_tail
        return np.where(k < 0, 1.0, np.where(k >= t.size, 0.0, t[np.clip(k, 0, t.size - 1)]))

    def _moment(self, r):
        p = np.asarray(self.probs)
        n = np.arange(p.size, dtype=float)
        return SeriesValue(float(np.sum(p * n**r)), 0.0, p.size, "exact")

    def _exp_moment(self, b):
        p = np.asarray(self.probs)
        n = np.arange(p.size, dtype=float)
        return SeriesValue(float(np.sum(p * b**n)), 0.0, p.size, "exact")

    def sample(self, stream, n):
        return stream.generator.choice(len(self.probs), size=n, p=np.asarray(self.probs)).astype(np.int64)

    def to_dict(self):
        return {"kind": self.kind, "pmf": list(self.probs)}


def counting_pmf(c: CountingDistribution, n):
    return c.pmf(n)


# ---------------------------------------------------------------------------
# sequences of laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceSpec:
    """Law of ``xi_k`` for every ``k >= 1``.

    Index ``k`` gets ``head[k]`` when overridden, otherwise
    ``pattern[(k - 1) % len(pattern)]``. ``pivot`` is the distinguished index
    used by the closure checks and ``phi(n) = n ** phi_exponent`` the
    normalizing weights.
    """

    pattern: tuple
    head: tuple = ()
    pivot: int = 1
    phi_exponent: float = 1.0
    rule: str = "periodic"

    def __post_init__(self):
        if not self.pattern:
            raise ValueError("pattern must contain at least one law")
        object.__setattr__(self, "pattern", tuple(self.pattern))
        object.__setattr__(self, "head", tuple(sorted((int(k), d) for k, d in dict(self.head).items())))
        if any(k < 1 for k, _ in self.head):
            raise ValueError("head indices start at 1")
        if self.pivot < 1:
            raise ValueError("pivot index must be >= 1")

    @classmethod
    def iid(cls, d: TailDistribution, **kw) -> "SequenceSpec":
        return cls(pattern=(d,), rule="iid", **kw)

    @classmethod
    def periodic(cls, pattern: Sequence[TailDistribution], head=None, **kw) -> "SequenceSpec":
        return cls(pattern=tuple(pattern), head=tuple((head or {}).items()), rule="periodic", **kw)

    @classmethod
    def explicit(cls, laws: Sequence[TailDistribution], default: TailDistribution, **kw) -> "SequenceSpec":
        head = {i + 1: d for i, d in enumerate(laws)}
        return cls(pattern=(default,), head=tuple(head.items()), rule="explicit", **kw)

    @property
    def head_map(self) -> dict:
        return dict(self.head)

    @property
    def is_iid(self) -> bool:
        return len(set(self.pattern)) == 1 and all(d == self.pattern[0] for _, d in self.head)

    def dist_at(self, k: int) -> TailDistribution:
        if k < 1:
            raise ValueError("indices start at 1")
        hm = self.head_map
        if k in hm:
            return hm[k]
        return self.pattern[(k - 1) % len(self.pattern)]

    def laws(self, n: int) -> list:
        return [self.dist_at(k) for k in range(1, n + 1)]

    def phi(self, n):
        return np.asarray(n, dtype=float) ** self.phi_exponent

    def representative_indices(self, depth: int) -> list[int]:
        """Indices up to ``depth`` covering every distinct (index rule, law).

        Head overrides are listed individually; the periodic part contributes
        its first non-overridden index per residue class.
        """
        hm = self.head_map
        out = [k for k in hm if k <= depth]
        p = len(self.pattern)
        for r in range(p):
            k = r + 1
            while k in hm:
                k += p
            if k <= depth:
                out.append(k)
        return sorted(out)

    def tail_sum(self, n, y):
        """``sum_{k <= n} survival_k(y)``, vectorized over ``n`` and ``y``."""
        n = np.asarray(n, dtype=np.int64)
        y = np.broadcast_to(np.asarray(y, dtype=float), np.broadcast(n, np.asarray(y)).shape)
        n = np.broadcast_to(n, y.shape)
        p = len(self.pattern)
        total = np.zeros(y.shape)
        for r, d in enumerate(self.pattern):
            count = np.maximum(0, (n - r + p - 1) // p)
            total = total + count * d.survival(y)
        for k, d in self.head:
            active = n >= k
            delta = d.survival(y) - self.pattern[(k - 1) % p].survival(y)
            total = total + np.where(active, delta, 0.0)
        total = np.maximum(total, 0.0)
        return total if total.ndim else float(total)

    def bounded_below(self, n: int) -> bool:
        return all(d.bounded_below for d in self._distinct_upto(n))

    def nonnegative(self, n: int) -> bool:
        return all(d.nonnegative for d in self._distinct_upto(n))

    def _distinct_upto(self, n):
        return [self.dist_at(k) for k in self.representative_indices(n)]

    def to_dict(self) -> dict:
        d = {"pivot": self.pivot, "phi_exponent": self.phi_exponent}
        if self.rule == "iid":
            d.update(rule="iid", law=self.pattern[0].to_dict())
        elif self.rule == "explicit":
            d.update(rule="explicit", laws=[x.to_dict() for _, x in self.head], default=self.pattern[0].to_dict())
        else:
            d.update(
                rule="periodic",
                pattern=[x.to_dict() for x in self.pattern],
                head={str(k): x.to_dict() for k, x in self.head},
            )
        return d


def sample(d, stream: RandomStream, n: int) -> np.ndarray:
    """Draw ``n`` values from a real-valued or counting law."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return d.sample(stream, n)
