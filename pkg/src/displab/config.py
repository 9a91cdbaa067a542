"""Flat key = value experiment configuration."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

EXPERIMENTS = (
    "verify-transform",
    "verify-n2",
    "verify-n3",
    "verify-ndim-remainder",
    "verify-lemma-asymptotic",
    "easylem-check",
    "envelope-check",
    "counterexample-growth",
)

# per-experiment defaults applied before the file's own keys
DEFAULTS = {
    "verify-transform": dict(n=3, t_grid="0.05,0.1,0.2", r_grid="1", L_rule="fixed:1e4", tol=1e-2),
    "verify-n2": dict(n=2, L_rule="fixed:1e4", tol=1e-2),
    "verify-n3": dict(n=3, L_rule="auto", tol=1e-3),
    "verify-ndim-remainder": dict(n=5, t_grid="dyadic:0.02:0.32", r_grid="1", s_grid="2", tol=0.2),
    "verify-lemma-asymptotic": dict(n=4, t_grid="0.1,0.2", r_grid="2", s_grid="3", L_rule="factor:10", tol=1e-2),
    "easylem-check": dict(n=4, sigma=5.0, mu_exp=2.0, x_grid="0,1,3,10,30,100", tol=1e-6),
    "envelope-check": dict(n=4, tol=1.0),
    "counterexample-growth": dict(n=5, alpha=0.5, t_grid="pow2:4:10", L_rule="none", tol=0.15),
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    n: int = 3
    t_grid: list = field(default_factory=lambda: [0.05, 0.1, 0.2])
    r_grid: list = field(default_factory=lambda: [1.0, 2.5, 6.0])
    s_grid: list = field(default_factory=lambda: [1.0, 2.5, 6.0])
    x_grid: list = field(default_factory=list)
    L_rule: str = "fixed:1e4"
    alpha: float = 0.5
    eps_mode: str = "delta"
    sigma: float = 5.0
    mu_exp: float = 2.0
    tol: float = 1e-2
    quad_tol: float = 1e-8
    shape: str = "flat"
    seed: int = 0
    timings: bool = True
    out: str = ""

    def L_for(self, t: float) -> float:
        kind, _, arg = self.L_rule.partition(":")
        if kind == "fixed":
            return float(arg)
        if kind == "factor":
            return float(arg) * t**-3
        if kind == "auto":
            return max(1e4, 10 * t**-3)
        if kind == "none":
            return float("nan")
        raise ConfigError(f"unknown L rule {self.L_rule!r}")

    def eps_for(self, t: float):
        kind, _, arg = self.eps_mode.partition(":")
        if kind == "delta":
            return 0.0
        if kind == "fixed":
            return float(arg)
        if kind == "c1t":
            return float(arg) * t
        raise ConfigError(f"unknown eps mode {self.eps_mode!r}")

    def snapshot(self) -> dict:
        return asdict(self)

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.n < 2:
            raise ConfigError("n must be >= 2")
        if self.experiment == "counterexample-growth":
            if self.n < 4:
                raise ConfigError("the growth experiment needs n >= 4")
            if not 0 < self.alpha < (self.n - 3) / 2:
                raise ConfigError("alpha must lie in (0, (n-3)/2)")
            if any(not 0 < t <= 1 for t in self.t_grid):
                raise ConfigError("t grid must lie in (0, 1]")
            for t in self.t_grid:
                e = self.eps_for(t)
                if not 0 <= e < 0.5:
                    raise ConfigError("eps must lie in [0, 1/2)")
        needs_L = self.experiment in ("verify-transform", "verify-n2", "verify-n3", "verify-lemma-asymptotic")
        if needs_L:
            for t in self.t_grid:
                L = self.L_for(t)
                if not L > 1 / abs(t):
                    raise ConfigError(f"L rule gives L={L:g} <= 1/|t| at t={t:g}")
        if self.shape not in ("flat", "fejer"):
            raise ConfigError("shape must be flat or fejer")
        if self.tol <= 0:
            raise ConfigError("tol must be > 0")
        if self.experiment == "easylem-check":
            if not (self.mu_exp < self.n < self.sigma + self.mu_exp):
                raise ConfigError("need mu_exp < n < sigma + mu_exp")
        return self


def parse_grid(text: str) -> list:
    """'a,b,c' or 'dyadic:lo:hi' (lo * 2^k up to hi) or 'pow2:k0:k1' (2^-k)."""
    text = text.strip()
    if text.startswith("dyadic:"):
        _, lo, hi = text.split(":")
        lo, hi = float(lo), float(hi)
        out, x = [], lo
        while x <= hi * (1 + 1e-12):
            out.append(x)
            x *= 2
        return out
    if text.startswith("pow2:"):
        _, k0, k1 = text.split(":")
        return [2.0 ** -k for k in range(int(k0), int(k1) + 1)]
    if not text:
        return []
    return [float(v) for v in text.split(",")]


def _parse_bool(v: str) -> bool:
    v = v.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


_CASTS = {
    "n": int, "alpha": float, "sigma": float, "mu_exp": float, "tol": float,
    "quad_tol": float, "seed": int, "timings": _parse_bool,
    "L_rule": str, "eps_mode": str, "shape": str, "out": str,
    "t_grid": parse_grid, "r_grid": parse_grid, "s_grid": parse_grid, "x_grid": parse_grid,
}


def read_pairs(text: str) -> dict:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _CASTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        pairs[key] = value
    return pairs


def build_config(experiment: str, pairs: dict) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    merged = {k: str(v) for k, v in DEFAULTS[experiment].items()}
    merged.update(pairs)
    kwargs = {}
    for key, value in merged.items():
        try:
            kwargs[key] = _CASTS[key](value)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"bad value for {key}: {value!r} ({err})") from None
    cfg = ExperimentConfig(experiment=experiment, **kwargs)
    if any(not np.isfinite(t) for t in cfg.t_grid):
        raise ConfigError("t grid must be finite")
    return cfg.validate()


def load_config(experiment: str, path) -> ExperimentConfig:
    text = Path(path).read_text() if path else ""
    return build_config(experiment, read_pairs(text))
