"""Experiment configuration: a nested YAML document with defaults for every key.

Example::

    alpha: 1.0
    p: 2.0
    op: IgPsi
    g: "0,1"
    psi: "0,0.5"
    Ns: [32, 64, 128, 256]
    quadrature:
      tol: 1.0e-12
      inner_tol: 1.0e-10
    sweep:
      a_values: [0.3, 0.5, 0.7]
      c_scalings: ["2.0", "5.0i"]
    thresholds:
      plateau: 1.0e-8
      slope: 0.05
      decay: 0.25
      annulus_trigger: 3
      ratio_band: [0.001, 1000.0]
    output:
      path: null
      format: csv
    timing: true
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any

import yaml

from ..operators import OperatorKind
from ..polynomials import format_complex, format_polynomial, parse_complex, parse_polynomial
from ..spectra import DEFAULT_DECAY, DEFAULT_PLATEAU, DEFAULT_SLOPE

__all__ = ["ConfigError", "ExperimentConfig", "Thresholds", "parse_config", "serialize_config", "load_config"]


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class Thresholds:
    plateau: float = DEFAULT_PLATEAU
    slope: float = DEFAULT_SLOPE
    decay: float = DEFAULT_DECAY
    annulus_trigger: int = 3
    ratio_band: list[float] = field(default_factory=lambda: [1e-3, 1e3])

    def as_diagnose_kwargs(self) -> dict:
        return {"plateau": self.plateau, "slope_threshold": self.slope, "decay_threshold": self.decay}


@dataclass
class Quadrature:
    tol: float = 1e-12
    inner_tol: float = 1e-10


@dataclass
class Sweep:
    a_values: list[float] = field(default_factory=lambda: [0.3, 0.5, 0.7])
    c_scalings: list[str] = field(default_factory=lambda: ["2.0", "5.0i"])

    def scalings(self) -> list[complex]:
        return [parse_complex(c) for c in self.c_scalings]


@dataclass
class Output:
    path: str | None = None
    format: str = "csv"


@dataclass
class ExperimentConfig:
    alpha: float = 1.0
    p: float = 2.0
    op: str = "IgPsi"
    g: str = "0.0,1.0"
    psi: str = "0.0,0.5"
    Ns: list[int] = field(default_factory=lambda: [32, 64, 128, 256])
    quadrature: Quadrature = field(default_factory=Quadrature)
    sweep: Sweep = field(default_factory=Sweep)
    thresholds: Thresholds = field(default_factory=Thresholds)
    output: Output = field(default_factory=Output)
    timing: bool = True

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_SECTIONS = {"quadrature": Quadrature, "sweep": Sweep, "thresholds": Thresholds, "output": Output}


def _positive(path: str, value: Any, kind=float) -> Any:
    if isinstance(value, bool):
        raise ConfigError(path, f"expected a number, got {value!r}")
    try:
        v = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected a number, got {value!r}") from None
    if kind is int and v != value:
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if not v > 0:
        raise ConfigError(path, f"must be positive, got {value!r}")
    return v


def _section(name: str, raw: Any):
    cls = _SECTIONS[name]
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(name, "expected a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{name}.{key}", "unknown key")
    return cls(**raw)


def _validate(cfg: ExperimentConfig) -> ExperimentConfig:
    cfg.alpha = _positive("alpha", cfg.alpha)
    cfg.p = _positive("p", cfg.p)
    try:
        cfg.op = OperatorKind.parse(str(cfg.op)).value
    except ValueError as exc:
        raise ConfigError("op", str(exc)) from None
    for name in ("g", "psi"):
        try:
            poly = parse_polynomial(str(getattr(cfg, name)))
        except ValueError as exc:
            raise ConfigError(name, str(exc)) from None
        setattr(cfg, name, format_polynomial(poly))
    if not isinstance(cfg.Ns, list) or not cfg.Ns:
        raise ConfigError("Ns", "expected a nonempty list of truncation sizes")
    cfg.Ns = [_positive(f"Ns[{i}]", n, int) for i, n in enumerate(cfg.Ns)]
    if any(b <= a for a, b in zip(cfg.Ns, cfg.Ns[1:])):
        raise ConfigError("Ns", "truncation sizes must be strictly increasing")
    q = cfg.quadrature
    q.tol = _positive("quadrature.tol", q.tol)
    q.inner_tol = _positive("quadrature.inner_tol", q.inner_tol)
    s = cfg.sweep
    s.a_values = [_positive(f"sweep.a_values[{i}]", a) for i, a in enumerate(s.a_values)]
    scal = []
    for i, c in enumerate(s.c_scalings):
        try:
            scal.append(format_complex(parse_complex(str(c))))
        except ValueError as exc:
            raise ConfigError(f"sweep.c_scalings[{i}]", str(exc)) from None
    s.c_scalings = scal
    t = cfg.thresholds
    t.plateau = _positive("thresholds.plateau", t.plateau)
    t.slope = _positive("thresholds.slope", t.slope)
    t.decay = _positive("thresholds.decay", t.decay)
    t.annulus_trigger = _positive("thresholds.annulus_trigger", t.annulus_trigger, int)
    if not isinstance(t.ratio_band, list) or len(t.ratio_band) != 2:
        raise ConfigError("thresholds.ratio_band", "expected [low, high]")
    t.ratio_band = [_positive(f"thresholds.ratio_band[{i}]", x) for i, x in enumerate(t.ratio_band)]
    if t.ratio_band[0] >= t.ratio_band[1]:
        raise ConfigError("thresholds.ratio_band", "low must be below high")
    if cfg.output.format not in ("csv", "json"):
        raise ConfigError("output.format", f"expected csv or json, got {cfg.output.format!r}")
    if not isinstance(cfg.timing, bool):
        raise ConfigError("timing", "expected true or false")
    return cfg


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError("<document>", f"not valid YAML: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("<document>", "expected a mapping at top level")
    top = {f.name for f in dataclasses.fields(ExperimentConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key not in top:
            raise ConfigError(str(key), "unknown key")
        kwargs[key] = _section(key, value) if key in _SECTIONS else value
    try:
        cfg = ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError("<document>", str(exc)) from None
    return _validate(cfg)


def serialize_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False, default_flow_style=None)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
