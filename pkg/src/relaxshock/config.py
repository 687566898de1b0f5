"""Flat ``key = value`` run configuration with validation at load time."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, fields, replace

from .errors import AdmissibilityError, ConfigError, ConsistencyError, DomainError
from .gas import GasModel, make_shock, tau_admissible_max

log = logging.getLogger(__name__)

_BUMP_COMPONENTS = ("v", "u1", "u2", "u3")


@dataclass(frozen=True)
class RunConfig:
    """All run parameters. ``bump_amplitude`` is a fraction of ``v_plus - v_minus``;
    ``output_dt`` is the time between time-series rows."""

    gamma: float = 5.0 / 3.0
    mu: float = 1.0
    lam: float = 1.0
    tau: float = 0.01
    v_minus: float = 1.0
    u1_minus: float = 0.0
    v_plus: float = 1.2
    L: float = 100.0
    N1: int = 2048
    N2: int = 1
    N3: int = 1
    mode: str = "oneD"
    T_final: float = 200.0
    cfl: float = 0.4
    output_dt: float = 10.0
    snapshot_dt: float = 0.0
    bump_component: str = "v"
    bump_amplitude: float = 0.01
    bump_width: float = 2.0
    bump_center: float = 0.0
    bump_mode: int = 0
    bump_axis: int = 3
    nu: float = 0.0
    tau_list: tuple = (1e-1, 1e-2, 1e-3)
    profile_tol: float = 1e-10
    tail_eps: float = 1e-6
    seed: int = 0
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def model(self) -> GasModel:
        return GasModel(self.gamma, self.mu, self.lam, self.tau)

    def shock(self):
        return make_shock(self.v_minus, self.u1_minus, self.v_plus, self.model)


_ALIASES = {"lambda": "lam", "T": "T_final", "CFL": "cfl"}


def _convert(name, text):
    proto = RunConfig.__dataclass_fields__[name]
    default = proto.default
    try:
        if name == "tau_list":
            return tuple(float(x) for x in text.split(",") if x.strip())
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r}") from exc


def parse_config(text: str) -> RunConfig:
    """Parse config text. Unknown keys and malformed lines are errors."""
    values = {}
    known = {f.name for f in fields(RunConfig)} - {"extra"}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, val)
    return validate_config(RunConfig(**values))


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def validate_config(cfg: RunConfig) -> RunConfig:
    """Check every module precondition; raise :class:`ConfigError` naming the first violation."""
    try:
        model = cfg.model
        shock = cfg.shock()
    except (DomainError, AdmissibilityError, ConsistencyError) as exc:
        raise ConfigError(str(exc)) from exc
    tau_max, _ = tau_admissible_max(shock, model)
    if cfg.tau > tau_max:
        raise ConfigError(f"tau={cfg.tau!r} exceeds the admissible bound {tau_max!r}")
    for t in cfg.tau_list:
        if not 0.0 < t <= tau_max:
            raise ConfigError(f"tau_list entry {t!r} outside (0, {tau_max!r}]")
    if list(cfg.tau_list) != sorted(cfg.tau_list, reverse=True) or len(set(cfg.tau_list)) != len(cfg.tau_list):
        raise ConfigError("tau_list must be strictly descending")
    if cfg.mode not in ("oneD", "threeD"):
        raise ConfigError("mode must be oneD or threeD")
    if (cfg.mode == "oneD") != (cfg.N2 == 1 and cfg.N3 == 1):
        raise ConfigError("mode oneD requires N2 = N3 = 1, threeD requires N2, N3 > 1")
    if cfg.mode == "threeD" and (cfg.N2 < 4 or cfg.N3 < 4):
        raise ConfigError("threeD needs N2, N3 >= 4")
    if not cfg.L > 0 or cfg.N1 < 32:
        raise ConfigError("need L > 0 and N1 >= 32")
    if not cfg.T_final > 0 or not 0 < cfg.cfl <= 1.0 or not cfg.output_dt > 0 or cfg.snapshot_dt < 0:
        raise ConfigError("need T_final > 0, 0 < cfl <= 1, output_dt > 0, snapshot_dt >= 0")
    if cfg.bump_component not in _BUMP_COMPONENTS:
        raise ConfigError(f"bump_component must be one of {_BUMP_COMPONENTS}")
    if not cfg.bump_width > 0:
        raise ConfigError("bump_width must be positive")
    if abs(cfg.bump_center) + cfg.bump_width >= cfg.L / 2 and cfg.bump_amplitude != 0.0:
        raise ConfigError("bump support must lie inside (-L/2, L/2)")
    if cfg.bump_component == "v" and cfg.bump_amplitude * shock.dv <= -cfg.v_minus:
        raise ConfigError("bump amplitude would make v <= 0")
    if cfg.bump_axis not in (2, 3) or cfg.bump_mode < 0:
        raise ConfigError("bump_axis must be 2 or 3 and bump_mode >= 0")
    if cfg.nu and not shock.delta < cfg.nu <= shock.delta ** 0.5:
        raise ConfigError(f"nu must satisfy delta < nu <= sqrt(delta) (delta={shock.delta!r})")
    if not cfg.profile_tol > 0 or not 0 < cfg.tail_eps < 0.1:
        raise ConfigError("need profile_tol > 0 and 0 < tail_eps < 0.1")
    return cfg


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return validate_config(replace(cfg, **kw))
