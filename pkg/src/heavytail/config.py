"""JSON experiment configs.

Every parse error is raised as :class:`ConfigError` carrying the dotted path of
the offending field, e.g. ``seq.pattern[1].kind``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import distributions as dist
from .diagnostics import GridSpec
from .errors import ConfigError
from .montecarlo import MCConfig
from .tail_algebra import StoppedFunctional

SCHEMA_VERSION = 1


def _get(obj, key, path, kind=None, default=...):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    if key not in obj:
        if default is ...:
            raise ConfigError(f"{path}.{key}" if path else key, "missing field")
        return default
    value = obj[key]
    where = f"{path}.{key}" if path else key
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(where, f"expected a finite number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(where, f"expected an integer, got {value!r}")
        return value
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(where, f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _build(cls, path, *args, **kw):
    try:
        return cls(*args, **kw)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def parse_law(obj, path="law") -> dist.TailDistribution:
    kind = _get(obj, "kind", path, str)
    if kind == "exponential":
        return _build(dist.Exponential, path, _get(obj, "rate", path, float, 1.0))
    if kind == "pareto_shifted":
        return _build(dist.ParetoShifted, path, _get(obj, "shift", path, float, 0.0), _get(obj, "alpha", path, float))
    if kind == "degenerate_at_zero":
        return dist.DegenerateAtZero()
    if kind == "point_mass":
        return _build(dist.PointMass, path, _get(obj, "c", path, float))
    if kind == "cai_tang":
        return _build(dist.CaiTang, path, _get(obj, "q", path, float))
    if kind == "empirical":
        values = _get(obj, "sample", path, list)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            raise ConfigError(f"{path}.sample", "expected a list of numbers")
        return _build(dist.Empirical, path, tuple(values), _get(obj, "bounded_below", path, bool, True))
    if kind == "positive_part":
        return dist.positive_part(parse_law(_get(obj, "base", path, dict), f"{path}.base"))
    raise ConfigError(f"{path}.kind", f"unknown law kind {kind!r}")


def parse_counting(obj, path="eta") -> dist.CountingDistribution:
    kind = _get(obj, "kind", path, str)
    if kind == "degenerate":
        return _build(dist.DegenerateAt, path, _get(obj, "n", path, int))
    if kind == "geometric":
        return _build(dist.Geometric, path, _get(obj, "q", path, float))
    if kind == "poisson":
        return _build(dist.Poisson, path, _get(obj, "lambda", path, float))
    if kind == "zeta":
        return _build(dist.Zeta, path, _get(obj, "s", path, float))
    if kind == "finite":
        pmf = _get(obj, "pmf", path)
        if isinstance(pmf, list):
            return _build(dist.FiniteSupport, f"{path}.pmf", tuple(pmf))
        if isinstance(pmf, dict):
            try:
                table = {int(k): float(v) for k, v in pmf.items()}
            except (TypeError, ValueError):
                raise ConfigError(f"{path}.pmf", "keys must be integers and values numbers") from None
            if any(k < 0 for k in table):
                raise ConfigError(f"{path}.pmf", "keys must be nonnegative")
            return _build(dist.FiniteSupport.from_mapping, f"{path}.pmf", table)
        raise ConfigError(f"{path}.pmf", "expected a list or an object")
    raise ConfigError(f"{path}.kind", f"unknown counting kind {kind!r}")


def parse_sequence(obj, path="seq") -> dist.SequenceSpec:
    rule = _get(obj, "rule", path, str)
    kw = {
        "pivot": _get(obj, "pivot", path, int, 1),
        "phi_exponent": _get(obj, "phi_exponent", path, float, 1.0),
    }
    if rule == "iid":
        return _build(dist.SequenceSpec.iid, path, parse_law(_get(obj, "law", path), f"{path}.law"), **kw)
    if rule == "periodic":
        pattern = _get(obj, "pattern", path, list)
        laws = [parse_law(d, f"{path}.pattern[{i}]") for i, d in enumerate(pattern)]
        head = {}
        for k, d in _get(obj, "head", path, dict, {}).items():
            try:
                idx = int(k)
            except ValueError:
                raise ConfigError(f"{path}.head", f"index {k!r} is not an integer") from None
            head[idx] = parse_law(d, f"{path}.head.{k}")
        return _build(dist.SequenceSpec.periodic, path, laws, head=head, **kw)
    if rule == "explicit":
        laws = [parse_law(d, f"{path}.laws[{i}]") for i, d in enumerate(_get(obj, "laws", path, list))]
        default = parse_law(_get(obj, "default", path), f"{path}.default")
        return _build(dist.SequenceSpec.explicit, path, laws, default, **kw)
    raise ConfigError(f"{path}.rule", f"unknown rule {rule!r}")


def parse_grid(obj, path="grid") -> GridSpec:
    if obj is None:
        return GridSpec()
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    kw = {}
    for key in ("x_min", "x_max"):
        if key in obj:
            kw[key] = _get(obj, key, path, float)
    if "points" in obj:
        kw["points"] = _get(obj, "points", path, int)
    for key in ("y_list", "z_list"):
        if key in obj:
            kw[key] = tuple(_get(obj, key, path, list))
    return _build(GridSpec, path, **kw)


def parse_mc(obj, path="mc") -> tuple[MCConfig, bool]:
    """Monte Carlo settings and whether to run the cross-check at all.

    A missing section or ``samples: 0`` disables Monte Carlo.
    """
    if obj is None:
        return MCConfig(samples=1000), False
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    kw = {}
    for key in ("samples", "seed", "strata_cap", "block_size"):
        if key in obj:
            kw[key] = _get(obj, key, path, int)
    if "ci_level" in obj:
        kw["ci_level"] = str(obj["ci_level"])
    run = kw.get("samples", 1) != 0
    if not run:
        kw["samples"] = 1000
    return _build(MCConfig, path, **kw), run


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    seq: dist.SequenceSpec
    eta: dist.CountingDistribution
    functional: StoppedFunctional
    x: tuple
    grid: GridSpec = GridSpec()
    mc: MCConfig = MCConfig(samples=1000)
    run_mc: bool = True
    tol: float = 1e-3
    h: float | None = None
    outputs: dict = field(default_factory=dict, compare=False)


def parse_config(obj: dict) -> ExperimentConfig:
    if not isinstance(obj, dict):
        raise ConfigError("<root>", "expected a JSON object")
    version = _get(obj, "schema_version", "", int)
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version}; expected {SCHEMA_VERSION}")
    func_name = _get(obj, "functional", "", str, "random_sum")
    try:
        func = StoppedFunctional.parse(func_name)
    except ValueError as exc:
        raise ConfigError("functional", str(exc)) from None
    xs = _get(obj, "x", "", list, [])
    for i, v in enumerate(xs):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0 or not math.isfinite(v):
            raise ConfigError(f"x[{i}]", f"expected a positive number, got {v!r}")
    mc, run_mc = parse_mc(obj.get("mc"))
    tail = _get(obj, "tail", "", dict, {})
    tol = _get(tail, "tol", "tail", float, 1e-3)
    h = tail.get("h")
    if h is not None:
        h = _get(tail, "h", "tail", float)
        if not h > 0:
            raise ConfigError("tail.h", "lattice step must be positive")
    outputs = _get(obj, "outputs", "", dict, {})
    return ExperimentConfig(
        experiment_id=_get(obj, "experiment_id", "", str, "experiment"),
        seq=parse_sequence(_get(obj, "seq", ""), "seq"),
        eta=parse_counting(_get(obj, "eta", ""), "eta"),
        functional=func,
        x=tuple(float(v) for v in xs),
        grid=parse_grid(obj.get("grid")),
        mc=mc,
        run_mc=run_mc,
        tol=tol,
        h=h,
        outputs=outputs,
    )


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(str(p), f"cannot read: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(p), f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(obj)
