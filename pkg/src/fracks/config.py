"""Plain ``key = value`` run configuration.

One assignment per line, ``#`` starts a comment.  Lists are comma
separated.  ``half_length`` also accepts ``pi`` multiples such as ``2*pi``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, fields

import numpy as np

from .dynamics import Model, ModelParams
from .spectral import Field, Grid, band_limited_random, make_grid
from .timestepper import StepperConfig


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


REQUIRED = ("model", "alpha_diff", "t_end")
INITIAL_KINDS = ("cosine", "coefficients", "random")


@dataclass
class RunConfig:
    model: str = "KELLER_SEGEL"
    alpha_diff: float = 1.0
    t_end: float = 1.0
    chi: float = 1.0
    mass: float = 1.0
    half_length: float = math.pi
    n: int = 256
    dt_init: float = 1e-2
    dt_min: float = 1e-9
    cfl: float = 0.4
    monitor_cadence: float = 0.1
    blowup_grad_threshold: float = 1e6
    initial: str = "cosine"
    amplitude: float = 1.0
    mode: int = 1
    coefficients: tuple = ()
    seed: int = 0
    band: int = 8
    series_csv: str = ""
    snapshot_json: str = ""
    certificate_json: str = ""
    plot_svg: str = ""
    sweep_csv: str = ""
    certify: bool = False
    decay: bool = False
    cert_time: float = 0.01
    correspond_tol: float = 1e-8
    decay_slack: float = 0.05
    sweep_alphas: tuple = ()
    sweep_amplitudes: tuple = ()
    workers: int = 1

    def params(self) -> ModelParams:
        return ModelParams(alpha_diff=self.alpha_diff, chi=self.chi, mass=self.mass,
                           model=Model.parse(self.model))

    def stepper(self) -> StepperConfig:
        return StepperConfig(dt_init=self.dt_init, dt_min=self.dt_min, cfl=self.cfl,
                             t_end=self.t_end, blowup_grad_threshold=self.blowup_grad_threshold,
                             monitor_cadence=self.monitor_cadence)

    def grid(self) -> Grid:
        return make_grid(self.n, self.half_length)

    def initial_density(self, grid: Grid | None = None) -> Field:
        """Initial density ``u0`` (mean ``mass``) described by the datum keys."""
        grid = grid or self.grid()
        x = grid.points
        base = math.pi / grid.half_length
        if self.initial == "cosine":
            vals = self.mass + self.amplitude * np.cos(self.mode * base * x)
            return Field(grid, vals)
        if self.initial == "coefficients":
            vals = np.full(grid.n, self.mass)
            for j, c in enumerate(self.coefficients, start=1):
                vals = vals + c * np.cos(j * base * x)
            return Field(grid, vals)
        rng = np.random.default_rng(self.seed)
        return band_limited_random(grid, self.band, rng, self.amplitude) + self.mass

    def echo(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_float(key: str, text: str) -> float:
    t = text.strip().lower().replace(" ", "")
    m = re.fullmatch(r"([0-9.eE+-]*)\*?pi", t)
    try:
        if m:
            coef = m.group(1)
            return (float(coef) if coef not in ("", "+") else (-1.0 if coef == "-" else 1.0)) * math.pi
        return float(t)
    except ValueError:
        raise ConfigError(key, f"expected a real number, got {text!r}") from None


def _parse_value(key: str, text: str):
    kind = _TYPES[key]
    if kind == "float":
        return _parse_float(key, text)
    if kind == "int":
        try:
            return int(text.strip())
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {text!r}") from None
    if kind == "bool":
        t = text.strip().lower()
        if t in ("true", "yes", "1", "on"):
            return True
        if t in ("false", "no", "0", "off"):
            return False
        raise ConfigError(key, f"expected a boolean, got {text!r}")
    if kind == "tuple":
        items = [s for s in text.split(",") if s.strip()]
        return tuple(_parse_float(key, s) for s in items)
    return text.strip()


def _validate(cfg: RunConfig):
    def bad(key, msg):
        raise ConfigError(key, msg)

    try:
        cfg.model = Model.parse(cfg.model).value
    except ValueError:
        bad("model", f"unknown model {cfg.model!r}")
    if not (0.0 < cfg.alpha_diff <= 2.0):
        bad("alpha_diff", f"must lie in (0, 2], got {cfg.alpha_diff}")
    if not (cfg.t_end > 0 and math.isfinite(cfg.t_end)):
        bad("t_end", "must be positive")
    if not (cfg.chi >= 0):
        bad("chi", "must be non-negative")
    if not (cfg.mass >= 0):
        bad("mass", "must be non-negative")
    if not (cfg.half_length > 0):
        bad("half_length", "must be positive")
    if cfg.n < 8 or cfg.n % 2:
        bad("n", f"must be an even integer >= 8, got {cfg.n}")
    if not cfg.dt_init > 0:
        bad("dt_init", "must be positive")
    if not (0 < cfg.dt_min <= cfg.dt_init):
        bad("dt_min", "must be positive and not exceed dt_init")
    if not (0 < cfg.cfl <= 1):
        bad("cfl", "must lie in (0, 1]")
    if not cfg.monitor_cadence > 0:
        bad("monitor_cadence", "must be positive")
    if not cfg.blowup_grad_threshold > 0:
        bad("blowup_grad_threshold", "must be positive")
    if cfg.initial not in INITIAL_KINDS:
        bad("initial", f"must be one of {', '.join(INITIAL_KINDS)}")
    if cfg.initial == "coefficients" and not cfg.coefficients:
        bad("coefficients", "required when initial = coefficients")
    if cfg.initial == "cosine" and (cfg.mode < 1 or 3 * cfg.mode > cfg.n):
        bad("mode", "must lie in [1, n/3]")
    if cfg.initial == "random" and not (1 <= cfg.band < cfg.n // 3):
        bad("band", "must lie in [1, n/3)")
    if not (0 < cfg.cert_time < cfg.t_end):
        bad("cert_time", "must lie in (0, t_end)")
    if not cfg.correspond_tol > 0:
        bad("correspond_tol", "must be positive")
    if cfg.workers < 1:
        bad("workers", "must be >= 1")
    for a in cfg.sweep_alphas:
        if not (0 < a <= 2):
            bad("sweep_alphas", f"entries must lie in (0, 2], got {a}")


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "duplicate key")
        values[key] = _parse_value(key, val)
    for key in REQUIRED:
        if key not in values:
            raise ConfigError(key, "missing required key")
    cfg = RunConfig(**values)
    _validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def format_config(cfg: RunConfig | dict) -> str:
    """Inverse of :func:`parse_config` on every recognised key."""
    echo = cfg.echo() if isinstance(cfg, RunConfig) else cfg
    return "".join(f"{k} = {_format_value(v)}\n" for k, v in echo.items())
