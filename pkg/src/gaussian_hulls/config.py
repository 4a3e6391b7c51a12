"""Experiment configuration: JSON schema, defaults and validation.

A minimal file names the mode, the target and a seed::

    {"mode": "counterexample",
     "target": {"kind": "polytope", "generators": [[1, 1], [1, -1]]},
     "seed": 7}

Everything else is filled from defaults. Unknown keys are rejected unless
parsing is lenient, in which case they only produce a warning.
"""

import copy
import dataclasses
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .geometry import body_from_dict, check_psd

MODES = ("counterexample", "goodman", "tailbound", "partition-check", "hull2d-demo")
DIRECTION_MODES = ("uniform-angles-2d", "full-angles-2d", "seeded-quasi-uniform")
DEFAULT_CHECKPOINTS = (10**2, 10**3, 10**4, 10**5, 10**6)


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ConstructionConfig:
    m: int = 8
    directions: object = "uniform-angles-2d"
    densities: object = "uniform"


@dataclass
class TailboundConfig:
    n: list = field(default_factory=lambda: [10**k for k in range(1, 7)])
    epsilon: list = field(default_factory=lambda: [0.05, 0.1, 0.2])
    gamma: list = field(default_factory=lambda: [0.3, 0.4, 0.45])


@dataclass
class ExperimentConfig:
    mode: str = "counterexample"
    dimension: int = 2
    target: dict = field(default_factory=lambda: {"kind": "ball", "r": 1.0})
    construction: ConstructionConfig = field(default_factory=ConstructionConfig)
    seeds: list = field(default_factory=lambda: [0])
    probes: int = 256
    checkpoints: list = field(default_factory=lambda: list(DEFAULT_CHECKPOINTS))
    epsilon: float = 0.2
    covariance: object = None
    tailbound: TailboundConfig = field(default_factory=TailboundConfig)
    hull_dump: bool = False
    output_dir: str = "out"
    threads: int = 1

    def body(self):
        return body_from_dict(self.target, self.dimension)

    def goodman_covariance(self):
        if self.covariance is not None:
            return np.asarray(self.covariance, dtype=float)
        if self.target.get("kind") == "ellipsoid":
            return np.asarray(self.target["sigma"], dtype=float)
        return np.eye(self.dimension)

    def to_dict(self):
        return dataclasses.asdict(self)

    def replace(self, **changes):
        return dataclasses.replace(copy.deepcopy(self), **changes)


_TOP_KEYS = {f.name for f in dataclasses.fields(ExperimentConfig)} | {"seed"}
_CONSTRUCTION_KEYS = {f.name for f in dataclasses.fields(ConstructionConfig)} | {"seed"}
_TAILBOUND_KEYS = {f.name for f in dataclasses.fields(TailboundConfig)}


def _unknown(keys, allowed, prefix, strict):
    extra = sorted(set(keys) - allowed)
    if not extra:
        return
    paths = ", ".join(f"{prefix}{k}" for k in extra)
    if strict:
        raise ConfigError(f"{prefix}{extra[0]}", f"unknown key (all unknown: {paths})")
    warnings.warn(f"ignoring unknown config keys: {paths}", stacklevel=3)


def _int(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    return value


def _float(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    return float(value)


def _seeds(value, path):
    values = value if isinstance(value, list) else [value]
    if not values:
        raise ConfigError(path, "seed list is empty")
    out = []
    for i, s in enumerate(values):
        s = _int(s, f"{path}[{i}]" if isinstance(value, list) else path, minimum=0)
        if s >= 2**64:
            raise ConfigError(path, "seeds are unsigned 64-bit integers")
        out.append(s)
    return out


def _checkpoints(value, path):
    if not isinstance(value, list):
        raise ConfigError(path, "expected a list of integers")
    out = [_int(v, f"{path}[{i}]", minimum=2) for i, v in enumerate(value)]
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(path, "checkpoints must be strictly increasing")
    return out


def _target(value, dimension, path):
    if not isinstance(value, dict) or "kind" not in value:
        raise ConfigError(path, "expected an object with a 'kind' tag")
    allowed = {"ball": {"kind", "r", "dimension"}, "ellipsoid": {"kind", "sigma"},
               "polytope": {"kind", "generators"}}
    kind = value["kind"]
    if kind not in allowed:
        raise ConfigError(f"{path}.kind", f"unknown body kind {kind!r}")
    extra = sorted(set(value) - allowed[kind])
    if extra:
        raise ConfigError(f"{path}.{extra[0]}", "unknown key")
    try:
        body = body_from_dict(value, dimension)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from None
    return body


def _densities(value, m, path):
    if value == "uniform":
        return value
    if not isinstance(value, list) or len(value) != m:
        raise ConfigError(path, f"expected 'uniform' or a list of {m} numbers")
    p = [_float(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if any(x <= 0 for x in p):
        raise ConfigError(path, "densities must be positive")
    if abs(sum(p) - 1.0) > 1e-12 * len(p):
        raise ConfigError(path, f"densities must sum to 1, got {sum(p)!r}")
    return p


def config_from_dict(raw, strict=True):
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    _unknown(raw, _TOP_KEYS, "", strict)
    cfg = ExperimentConfig()

    mode = raw.get("mode", cfg.mode)
    if mode not in MODES:
        raise ConfigError("mode", f"expected one of {', '.join(MODES)}, got {mode!r}")
    cfg.mode = mode

    target = raw.get("target", cfg.target)
    dimension = raw.get("dimension")
    if dimension is None:
        dimension = _target(target, None, "target").dimension
    cfg.dimension = _int(dimension, "dimension", minimum=1)
    body = _target(target, cfg.dimension, "target")
    if body.dimension != cfg.dimension:
        raise ConfigError("target", f"body has dimension {body.dimension}, config says {cfg.dimension}")
    cfg.target = copy.deepcopy(target)

    seeds = None
    con = raw.get("construction", {})
    if not isinstance(con, dict):
        raise ConfigError("construction", "expected an object")
    _unknown(con, _CONSTRUCTION_KEYS, "construction.", strict)
    c = cfg.construction
    c.m = _int(con.get("m", c.m), "construction.m", minimum=1)
    if "directions" in con:
        c.directions = con["directions"]
    elif cfg.dimension != 2:
        c.directions = "seeded-quasi-uniform"
    if isinstance(c.directions, str):
        if c.directions not in DIRECTION_MODES:
            raise ConfigError("construction.directions", f"unknown direction mode {c.directions!r}")
        if c.directions.endswith("-2d") and cfg.dimension != 2:
            raise ConfigError("construction.directions", f"{c.directions} needs dimension 2")
    else:
        s = np.asarray(c.directions, dtype=float)
        if s.shape != (c.m, cfg.dimension):
            raise ConfigError("construction.directions",
                              f"expected {c.m} directions of dimension {cfg.dimension}")
        if np.any(np.abs(np.linalg.norm(s, axis=1) - 1.0) > 1e-12):
            raise ConfigError("construction.directions", "directions must be unit vectors")
        c.directions = s.tolist()
    c.densities = _densities(con.get("densities", c.densities), c.m, "construction.densities")
    if "seed" in con:
        seeds = _seeds(con["seed"], "construction.seed")

    if "seed" in raw:
        seeds = _seeds(raw["seed"], "seed")
    if "seeds" in raw:
        seeds = _seeds(raw["seeds"], "seeds")
    cfg.seeds = seeds if seeds is not None else list(cfg.seeds)

    probes = raw.get("probes", 256 if cfg.dimension <= 2 else 1024)
    cfg.probes = _int(probes, "probes", minimum=2 * cfg.dimension)
    cfg.checkpoints = _checkpoints(raw.get("checkpoints", cfg.checkpoints), "checkpoints")
    cfg.epsilon = _float(raw.get("epsilon", cfg.epsilon), "epsilon")
    if cfg.epsilon <= 0:
        raise ConfigError("epsilon", "must be positive")

    cov = raw.get("covariance")
    if cov is not None:
        try:
            sigma = np.asarray(cov, dtype=float)
            check_psd(np.atleast_2d(sigma))
        except ValueError as exc:
            raise ConfigError("covariance", str(exc)) from None
        if sigma.shape != (cfg.dimension, cfg.dimension):
            raise ConfigError("covariance", f"expected a {cfg.dimension}x{cfg.dimension} matrix")
        cfg.covariance = sigma.tolist()

    tb = raw.get("tailbound", {})
    if not isinstance(tb, dict):
        raise ConfigError("tailbound", "expected an object")
    _unknown(tb, _TAILBOUND_KEYS, "tailbound.", strict)
    t = cfg.tailbound
    for name in ("n", "epsilon", "gamma"):
        vals = tb.get(name, getattr(t, name))
        path = f"tailbound.{name}"
        if not isinstance(vals, list) or not vals:
            raise ConfigError(path, "expected a non-empty list")
        if name == "n":
            vals = [_int(v, f"{path}[{i}]", minimum=2) for i, v in enumerate(vals)]
        else:
            vals = [_float(v, f"{path}[{i}]") for i, v in enumerate(vals)]
        setattr(t, name, vals)
    for i, g in enumerate(t.gamma):
        if not 0 < g < 0.5:
            raise ConfigError(f"tailbound.gamma[{i}]", f"gamma must lie in (0, 1/2), got {g}")
    for i, e in enumerate(t.epsilon):
        if e <= 0:
            raise ConfigError(f"tailbound.epsilon[{i}]", "must be positive")

    hull_dump = raw.get("hull_dump", cfg.hull_dump)
    if not isinstance(hull_dump, bool):
        raise ConfigError("hull_dump", "expected true or false")
    cfg.hull_dump = hull_dump
    out = raw.get("output_dir", cfg.output_dir)
    if not isinstance(out, str) or not out:
        raise ConfigError("output_dir", "expected a non-empty path")
    cfg.output_dir = out
    cfg.threads = _int(raw.get("threads", cfg.threads), "threads", minimum=1)
    return cfg


def parse_config(path, strict=True):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("<file>", f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return config_from_dict(raw, strict=strict)


def default_config(mode="counterexample"):
    return config_from_dict({"mode": mode})


def dump_config(cfg, path=None):
    text = json.dumps(cfg.to_dict(), indent=2) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
