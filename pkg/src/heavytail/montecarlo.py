"""Monte Carlo estimators for stopped tails and the auxiliary tail ratios.

Paths are simulated in fixed-size blocks; block ``b`` of stratum ``s`` always
draws from ``RandomStream(seed).child(s, b)``, so estimates are bit-identical
for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .distributions import CountingDistribution, SequenceSpec, TailDistribution, positive_part
from .errors import DivisionDomainError, UnstableError
from .rng import RandomStream
from .tail_algebra import StoppedFunctional, TailEstimate, sum_tail

_EPS = float(np.finfo(float).eps)
_Z = {"0.95": stats.norm.ppf(0.975), "0.99": stats.norm.ppf(0.995), "3sigma": 3.0}


@dataclass(frozen=True)
class MCConfig:
    samples: int = 1_000_000
    seed: int = 0
    strata_cap: int = 64
    ci_level: str = "3sigma"
    block_size: int = 1 << 16
    workers: int | None = None

    def __post_init__(self):
        if self.samples < 1000:
            raise ValueError("samples must be >= 1000")
        if self.strata_cap < 1:
            raise ValueError("strata_cap must be >= 1")
        if str(self.ci_level) not in _Z:
            raise ValueError(f"ci_level must be one of {sorted(_Z)}")
        object.__setattr__(self, "ci_level", str(self.ci_level))

    @property
    def z(self) -> float:
        return float(_Z[self.ci_level])

    def worker_count(self) -> int:
        n = self.workers or os.cpu_count() or 1
        cap = os.environ.get("HEAVYTAIL_THREADS")
        if cap:
            n = min(n, max(1, int(cap)))
        return n


@dataclass(frozen=True)
class RatioEstimate:
    value: float
    lower: float
    upper: float
    method: str
    detail: dict = field(default_factory=dict, compare=False)


# ---------------------------------------------------------------------------
# path simulation
# ---------------------------------------------------------------------------


def _simulate(func, seq, counts, stream, xs):
    """Hit counts of ``functional > x`` for each ``x`` on paths of given lengths."""
    m = counts.size
    n_max = int(counts.max()) if m else 0
    s = np.zeros(m)
    best = np.zeros(m)  # S_0 = 0 and max includes 0
    for k in range(1, n_max + 1):
        active = counts >= k
        draw = seq.dist_at(k).sample(stream, m)
        if func is StoppedFunctional.RANDOM_MAX:
            np.maximum(best, np.where(active, draw, -np.inf), out=best)
        else:
            s += np.where(active, draw, 0.0)
            if func is StoppedFunctional.RANDOM_MAX_OF_SUMS:
                np.maximum(best, s, out=best)
    values = s if func is StoppedFunctional.RANDOM_SUM else best
    return np.array([np.count_nonzero(values > x) for x in xs], dtype=np.int64)


def _blocks(total, size):
    out = []
    done = 0
    while done < total:
        out.append(min(size, total - done))
        done += out[-1]
    return out


def _run_tasks(tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: t(), tasks))


def _strata(eta, cap):
    """(label, weight, n or None) with ``None`` marking the pooled stratum."""
    top = cap if eta.max_support is None else min(cap, eta.max_support)
    out = []
    for n in range(1, top + 1):
        w = float(eta.pmf(n))
        if w > 0:
            out.append((n, w, n))
    pooled = float(eta.tail_mass(top))
    if pooled > 0:
        out.append((top + 1, pooled, None))
    return out, top


def _allocate(strata, samples):
    score = np.array([w * math.sqrt(n if n is not None else lab) for lab, w, n in strata])
    if score.sum() == 0:
        return [0] * len(strata)
    share = score / score.sum()
    return [max(100, int(samples * s)) for s in share]


def mc_stopped_tail_grid(func, seq: SequenceSpec, eta: CountingDistribution, xs, cfg: MCConfig) -> list:
    """Stratified estimates of the stopped tail at several ``x`` from shared paths."""
    func = StoppedFunctional.parse(func)
    xs = [float(x) for x in xs]
    if any(not x > 0 for x in xs):
        raise ValueError("x must be positive")
    strata, top = _strata(eta, cfg.strata_cap)
    alloc = _allocate(strata, cfg.samples)
    root = RandomStream(cfg.seed)
    tasks = []
    index = []
    for si, ((label, w, n), m) in enumerate(zip(strata, alloc)):
        for bi, size in enumerate(_blocks(m, cfg.block_size)):
            stream = root.child(si, bi)

            def task(stream=stream, size=size, n=n):
                if n is None:
                    counts = eta.sample_above(stream.child(0), size, top)
                else:
                    counts = np.full(size, n, dtype=np.int64)
                return _simulate(func, seq, counts, stream.child(1), xs)

            tasks.append(task)
            index.append(si)
    results = _run_tasks(tasks, cfg.worker_count())
    hits = np.zeros((len(strata), len(xs)), dtype=np.int64)
    for si, r in zip(index, results):
        hits[si] += r
    z = cfg.z
    out = []
    weights = np.array([w for _, w, _ in strata])
    sizes = np.array(alloc, dtype=float)
    for j, x in enumerate(xs):
        h = hits[:, j]
        est = float(np.sum(weights * h / sizes)) if len(strata) else 0.0
        wil = (h + z * z / 2) / (sizes + z * z)
        var = float(np.sum(weights**2 * wil * (1 - wil) / (sizes + z * z))) if len(strata) else 0.0
        sd = math.sqrt(var)
        out.append(
            TailEstimate.bracket(
                est - z * sd,
                est + z * sd,
                "monte_carlo",
                central=est,
                samples=int(sizes.sum()),
                seed=cfg.seed,
                se=sd,
                hits=int(h.sum()),
            )
        )
    return out


def mc_stopped_tail(func, seq, eta, x, cfg: MCConfig) -> TailEstimate:
    return mc_stopped_tail_grid(func, seq, eta, [x], cfg)[0]


def wilson_interval(hits: int, n: int, z: float):
    p = hits / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _fixed_n_hits(func, seq, n, xs, cfg):
    root = RandomStream(cfg.seed)
    tasks = []
    for bi, size in enumerate(_blocks(cfg.samples, cfg.block_size)):
        stream = root.child(0, bi)
        tasks.append(lambda stream=stream, size=size: _simulate(func, seq, np.full(size, n), stream, xs))
    return np.sum(_run_tasks(tasks, cfg.worker_count()), axis=0)


def mc_fixed_n_tail(func, seq: SequenceSpec, n: int, x: float, cfg: MCConfig) -> TailEstimate:
    """Plain Monte Carlo for a fixed number of terms, Wilson interval."""
    func = StoppedFunctional.parse(func)
    hits = int(_fixed_n_hits(func, seq, n, [x], cfg)[0])
    lo, hi = wilson_interval(hits, cfg.samples, cfg.z)
    return TailEstimate.bracket(lo, hi, "monte_carlo", central=hits / cfg.samples, samples=cfg.samples, hits=hits)


# ---------------------------------------------------------------------------
# ratios
# ---------------------------------------------------------------------------


def _paired_paths(seq, n, xs, cfg, conditional):
    """Per-``x`` sums for the ratio estimator on shared paths.

    Returns rows ``(sum num, sum den, sum num^2, sum den^2, sum num*den,
    plain hits of S_n > x)``. With ``conditional`` the last increment is
    integrated out: given the first ``n - 1`` steps, ``P(S_n > x)`` is the
    survival of the last law at ``x - S_{n-1}`` and the running maximum event
    has probability one once ``max_{k<n} S_k > x``.
    """
    root = RandomStream(cfg.seed)
    last = seq.dist_at(n)

    def run(stream, size):
        s = np.zeros(size)
        best = np.zeros(size)
        for k in range(1, n):
            s += seq.dist_at(k).sample(stream, size)
            np.maximum(best, s, out=best)
        s_n = s + last.sample(stream, size)
        best_n = np.maximum(best, s_n)
        rows = []
        for x in xs:
            if conditional:
                den = last.survival(x - s)
                num = np.where(best > x, 1.0, den)
            else:
                den = (s_n > x).astype(float)
                num = (best_n > x).astype(float)
            rows.append([num.sum(), den.sum(), (num * num).sum(), (den * den).sum(), (num * den).sum(), np.count_nonzero(s_n > x)])
        return np.array(rows)

    tasks = [
        (lambda stream=root.child(0, bi), size=size: run(stream, size))
        for bi, size in enumerate(_blocks(cfg.samples, cfg.block_size))
    ]
    return np.sum(_run_tasks(tasks, cfg.worker_count()), axis=0)


def lemma1_ratio(seq: SequenceSpec, n: int, x, cfg: MCConfig, conditional: bool = True):
    """``P(S_(n) > x) / P(S_n > x)`` from shared random numbers.

    Numerator and denominator come from the same paths and the interval is
    the delta method with their empirical covariance. By default the last
    increment is integrated out analytically, which keeps the estimator
    unbiased and lowers its variance; ``conditional=False`` gives plain
    indicator counts. Pass a sequence of ``x`` to evaluate on the same paths.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    scalar = np.ndim(x) == 0
    xs = [float(x)] if scalar else [float(v) for v in x]
    sums = _paired_paths(seq, n, xs, cfg, conditional)
    z = cfg.z
    N = cfg.samples
    out = []
    for x_i, (a, b, aa, bb, ab, hits) in zip(xs, sums):
        if hits < 100:
            raise UnstableError(f"only {int(hits)} hits of S_n > {x_i}")
        pa, pb = a / N, b / N
        r = pa / pb
        va, vb, cab = aa / N - pa * pa, bb / N - pb * pb, ab / N - pa * pb
        sd = math.sqrt(max(va + r * r * vb - 2 * r * cab, 0.0) / N) / pb
        detail = {"x": x_i, "hits_den": int(hits), "se": sd, "conditional": conditional}
        out.append(RatioEstimate(float(r), float(r - z * sd), float(r + z * sd), "monte_carlo", detail))
    return out[0] if scalar else out


def lemma4_ratio(seq: SequenceSpec, n: int, x: float, cfg: MCConfig | None = None, h: float | None = None):
    """``P(S_n > x) / sum_i survival_i(x)``; lattice numerator when possible."""
    den = float(seq.tail_sum(n, x))
    if not den > 0:
        raise DivisionDomainError(f"sum of component tails is zero at x={x}")
    if den >= 0.1:
        raise ValueError("x too small: sum of component tails must be below 0.1")
    if n == 1:
        return RatioEstimate(1.0, 1.0, 1.0, "exact", {"x": x})
    if seq.bounded_below(n):
        est = sum_tail(seq, n, x, h)
        return RatioEstimate(est.value / den, est.lower / den, est.upper / den, est.method, {"x": x, **est.detail})
    cfg = cfg or MCConfig()
    hits = int(_fixed_n_hits(StoppedFunctional.RANDOM_SUM, seq, n, [x], cfg)[0])
    if hits < 100:
        raise UnstableError(f"only {hits} hits of S_n > {x}")
    lo, hi = wilson_interval(hits, cfg.samples, cfg.z)
    p = hits / cfg.samples
    return RatioEstimate(p / den, lo / den, hi / den, "monte_carlo", {"x": x, "hits": hits})


def subexp_ratio(d: TailDistribution, x: float, cfg: MCConfig | None = None, h: float | None = None):
    """Two-fold convolution tail over the tail, for the positive part of ``d``."""
    base = positive_part(d)
    log_den = base.log_survival(x)
    if log_den == -math.inf:
        raise DivisionDomainError(f"survival is zero at x={x}")
    seq = SequenceSpec.iid(base)
    if base.bounded_below:
        est = sum_tail(seq, 2, x, h)
        if est.method == "exact":
            # subtracting two large log tails costs about eps * |log| in relative terms
            r = math.exp(est.log_value - log_den)
            slack = 4 * _EPS * (abs(est.log_value) + abs(log_den))
            return RatioEstimate(r, r * math.exp(-slack), r * math.exp(slack), "exact", {"x": x, **est.detail})
        lo = math.exp(math.log(est.lower) - log_den) if est.lower > 0 else 0.0
        hi = math.exp(math.log(est.upper) - log_den) if est.upper > 0 else 0.0
        return RatioEstimate(math.exp(est.log_value - log_den), lo, hi, est.method, {"x": x, **est.detail})
    cfg = cfg or MCConfig()
    hits = int(_fixed_n_hits(StoppedFunctional.RANDOM_SUM, seq, 2, [x], cfg)[0])
    lo, hi = wilson_interval(hits, cfg.samples, cfg.z)
    den = math.exp(log_den)
    return RatioEstimate(hits / cfg.samples / den, lo / den, hi / den, "monte_carlo", {"x": x, "hits": hits})
