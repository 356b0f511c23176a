"""Benchmark configuration and its flat ``key = value`` file format."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..constitutive import FluidParams, Giesekus, OldroydB
from ..solver import LinearConfig, NewtonConfig


class ConfigError(ValueError):
    pass


def default_schedule(wi_max: float, coarse_until: float = 0.5, coarse: float = 0.1, fine: float = 0.05) -> list[float]:
    """Steps of ``coarse`` up to ``coarse_until``, then ``fine`` steps up to ``wi_max``."""
    if wi_max <= 0:
        raise ConfigError("wi_max must be positive")
    pts = []
    k = 1
    while k * coarse <= min(wi_max, coarse_until) + 1e-12:
        pts.append(round(k * coarse, 10))
        k += 1
    w = pts[-1] if pts else 0.0
    k = 1
    while w + k * fine <= wi_max + 1e-12:
        pts.append(round(w + k * fine, 10))
        k += 1
    if not pts or abs(pts[-1] - wi_max) > 1e-12:
        pts.append(round(wi_max, 10))
    return pts


def parse_schedule(text: str) -> list[float]:
    """``"0.1:0.5:0.1"`` (inclusive range) or ``"0.1, 0.2, 0.25"``."""
    text = text.strip()
    if ":" in text:
        try:
            a, b, h = (float(t) for t in text.split(":"))
        except ValueError:
            raise ConfigError(f"bad range {text!r}, expected start:stop:step") from None
        if h <= 0 or b < a:
            raise ConfigError(f"bad range {text!r}")
        n = int(np.floor((b - a) / h + 1e-9)) + 1
        return [round(a + i * h, 10) for i in range(n)]
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad schedule {text!r}") from None


@dataclass
class BenchConfig:
    R: float = 1.0
    ubar: float = 1.0
    beta: float = 0.59
    mu: float = 1.0
    rho: float = 0.0
    creeping: bool = True
    model: str = "oldroyd-b"
    alpha: float = 0.0
    wi_schedule: list[float] = field(default_factory=lambda: default_schedule(0.7))
    mesh: str = "M1"
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    linear: LinearConfig = field(default_factory=LinearConfig)
    out_dir: str = "results"

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ConfigError("beta must lie in (0, 1)")
        if self.R <= 0 or self.ubar <= 0 or self.mu <= 0:
            raise ConfigError("R, ubar and mu must be positive")
        if any(w <= 0 for w in self.wi_schedule):
            raise ConfigError("Weissenberg numbers must be positive")
        if self.rho < 0:
            raise ConfigError("rho must be non-negative")
        if self.rho == 0.0 and not self.creeping:
            raise ConfigError("rho = 0 requires creeping flow")
        if self.model not in ("oldroyd-b", "giesekus"):
            raise ConfigError(f"unknown model {self.model!r}")

    def lam(self, wi: float) -> float:
        return wi * self.R / self.ubar

    def params(self, wi: float) -> FluidParams:
        model = OldroydB() if self.model == "oldroyd-b" else Giesekus(self.alpha)
        return FluidParams(rho=self.rho, mu_s=self.beta * self.mu, mu_p=(1.0 - self.beta) * self.mu,
                           lam=self.lam(wi), model=model)


_FLOAT = float


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


# key -> (target, converter); target "newton.x"/"linear.x" edits the nested configs
KEYS: dict[str, tuple[str, Any]] = {
    "geometry.r": ("R", _FLOAT),
    "fluid.ubar": ("ubar", _FLOAT),
    "fluid.beta": ("beta", _FLOAT),
    "fluid.mu": ("mu", _FLOAT),
    "fluid.rho": ("rho", _FLOAT),
    "fluid.model": ("model", str),
    "fluid.alpha": ("alpha", _FLOAT),
    "flow.creeping": ("creeping", _bool),
    "bench.wi": ("wi_schedule", parse_schedule),
    "bench.wi_max": ("wi_schedule", lambda t: default_schedule(float(t))),
    "mesh.class": ("mesh", str),
    "mesh.file": ("mesh", str),
    "output.dir": ("out_dir", str),
    "solver.backend": ("linear.backend", str),
    "solver.restart": ("linear.restart", int),
    "solver.ilut_fill": ("linear.ilut_fill", int),
    "solver.ilut_threshold": ("linear.ilut_threshold", _FLOAT),
    "solver.linear_tol": ("linear.tol", _FLOAT),
    "solver.max_linear_iter": ("linear.max_iter", int),
    "solver.abs_tol": ("newton.abs_tol", _FLOAT),
    "solver.rel_tol": ("newton.rel_tol", _FLOAT),
    "solver.max_iter": ("newton.max_iter", int),
    "solver.line_search": ("newton.line_search", str),
}


def parse_config_text(text: str) -> dict[str, str]:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.lower()] = v
    return out


def build_config(entries: Mapping[str, str], base: BenchConfig | None = None) -> BenchConfig:
    """Apply ``key = value`` entries on top of ``base`` (defaults if omitted)."""
    cfg = base or BenchConfig()
    top: dict[str, Any] = {}
    nested: dict[str, dict[str, Any]] = {"newton": {}, "linear": {}}
    for key, text in entries.items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}")
        target, conv = KEYS[key]
        try:
            value = conv(text)
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"bad value for {key}: {text!r}") from None
        if "." in target:
            group, name = target.split(".")
            nested[group][name] = value
        else:
            top[target] = value
    try:
        if nested["newton"]:
            top["newton"] = replace(cfg.newton, **nested["newton"])
        if nested["linear"]:
            top["linear"] = replace(cfg.linear, **nested["linear"])
        return replace(cfg, **top)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, overrides: Mapping[str, str] | None = None) -> BenchConfig:
    path = Path(path)
    entries = parse_config_text(path.read_text())
    entries.update({k.lower(): v for k, v in (overrides or {}).items()})
    return build_config(entries)
