"""Run configuration: flat key = value files plus command-line overrides.

Every numeric field is validated against the preconditions of the operation
it feeds; unknown keys are rejected by name.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .operators import Scheme
from .semiclassical import EPSILON_CAP, MODES

__all__ = ["ConfigError", "RunConfig", "parse_config_file", "build_config"]


class ConfigError(ValueError):
    """Invalid or unknown configuration key/value."""


@dataclass
class RunConfig:
    grid_l: float = 40.0
    grid_n: int = 1024
    scheme: str = Scheme.FOURIER.value
    rho_start: float | None = None
    rho_end: float | None = None
    rho_step: float = 0.01
    epsilons: list[float] = field(default_factory=list)
    modes: list[str] = field(default_factory=lambda: ["mode0", "mode1"])
    re_threshold: float = 1e-6
    localization_threshold: float = 0.9
    continuum_margin: float = 0.05
    continuation_jump_bound: float = 0.05
    out_dir: str = "."
    format: str = "csv"
    threads: int = 1

    def validate(self) -> "RunConfig":
        if self.grid_l <= 0:
            raise ConfigError(f"grid_l must be positive, got {self.grid_l}")
        if self.grid_n < 16 or self.grid_n % 2 != 0:
            raise ConfigError(f"grid_n must be even and >= 16, got {self.grid_n}")
        try:
            Scheme(self.scheme)
        except ValueError:
            raise ConfigError(
                f"scheme must be one of {[s.value for s in Scheme]}, got {self.scheme!r}"
            ) from None
        if (self.rho_start is None) != (self.rho_end is None):
            raise ConfigError("rho_start and rho_end must be given together")
        if self.rho_start is not None:
            if not (0 <= self.rho_start < self.rho_end):
                raise ConfigError(
                    f"need 0 <= rho_start < rho_end, got [{self.rho_start}, {self.rho_end}]")
        if self.rho_step <= 0:
            raise ConfigError(f"rho_step must be positive, got {self.rho_step}")
        for e in self.epsilons:
            if not (0 < e <= EPSILON_CAP):
                raise ConfigError(
                    f"epsilons must lie in (0, {EPSILON_CAP}], got {e}")
        if not self.modes:
            raise ConfigError("modes must be nonempty")
        for m in self.modes:
            if m not in MODES:
                raise ConfigError(f"modes entries must be in {sorted(MODES)}, got {m!r}")
        if self.re_threshold <= 0:
            raise ConfigError(f"re_threshold must be positive, got {self.re_threshold}")
        if not (0 < self.localization_threshold < 1):
            raise ConfigError(
                f"localization_threshold must lie in (0, 1), got {self.localization_threshold}")
        if self.continuum_margin < 0:
            raise ConfigError(
                f"continuum_margin must be nonnegative, got {self.continuum_margin}")
        if self.continuation_jump_bound <= 0:
            raise ConfigError(
                f"continuation_jump_bound must be positive, got {self.continuation_jump_bound}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_LIST_KEYS = {"epsilons", "modes"}
_FLOAT_KEYS = {"grid_l", "rho_start", "rho_end", "rho_step", "re_threshold",
               "localization_threshold", "continuum_margin",
               "continuation_jump_bound"}
_INT_KEYS = {"grid_n", "threads"}


def _convert(key: str, raw: str):
    raw = raw.strip().strip('"').strip("'")
    try:
        if key in _LIST_KEYS:
            items = [s.strip() for s in raw.strip("[]").split(",") if s.strip()]
            return [float(s) for s in items] if key == "epsilons" else items
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
    except ValueError:
        raise ConfigError(f"could not parse value for {key!r}: {raw!r}") from None
    return raw


def parse_config_file(path: str | Path) -> dict:
    """Flat TOML-style `key = value` file; '#' starts a comment."""
    out: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, raw)
    return out


def build_config(file_path: str | Path | None = None, **overrides) -> RunConfig:
    """Defaults, then config file, then keyword overrides; validated."""
    values: dict = {}
    if file_path is not None:
        values.update(parse_config_file(file_path))
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = val
    return RunConfig(**values).validate()
