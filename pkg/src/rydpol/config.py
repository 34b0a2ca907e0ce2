"""Run configuration: TOML/JSON ingestion with unit-suffixed keys.

Unknown sections or keys are rejected so that typos never silently fall back
to defaults.  ``RunConfig.echo()`` emits JSON that loads back to an equal
configuration.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import units
from .eit import Drive, MediumParams
from .errors import ConfigError
from .gate.budget import EfficiencyBudget

_NUM = (int, float)

SCHEMA: dict[str, dict[str, type | tuple]] = {
    "medium": {
        "density_per_cm3": _NUM, "d_ge_c_m": _NUM, "gamma_e_mhz": _NUM, "gamma_rg_per_us": _NUM,
        "wavelength_nm": _NUM, "length_um": _NUM, "c6_au": _NUM, "od_max": _NUM,
    },
    "drive": {"omega_c_mhz": _NUM, "delta_s_mhz": _NUM, "delta_c_mhz": _NUM},
    "eit_fit": {"omega_c_mhz": _NUM, "gamma_rg_per_us": _NUM, "eit_peak_mhz": _NUM, "crossing_mhz": _NUM},
    "budget": {
        "eta_r": _NUM, "eta_l": _NUM, "t_r": _NUM, "t_l": _NUM, "detector_qe": _NUM,
        "n_c": _NUM, "n_t": _NUM, "shots": int, "path_transmission": _NUM, "target_window": _NUM,
        "sample_period_s": _NUM, "p_shot_reported": _NUM, "coincidences_per_minute_reported": _NUM,
    },
    "noise": {"v_c": _NUM, "v_t": _NUM, "v1": _NUM, "v2": _NUM, "v3": _NUM,
              "eps_r": _NUM, "eps_l": _NUM},
    "target_r": {"detuning_mhz": _NUM, "od_ratio": _NUM},
    "hopping": {"t_d_us": _NUM, "tau_us": _NUM, "eta": _NUM, "t_single": _NUM,
                "interaction_factor": _NUM, "c6_over_chi6": _NUM},
    "output": {"format": str, "path": str},
}
_TOP_LEVEL = {"seed": int}
_MEDIUM_REQUIRED = ("gamma_e_mhz", "gamma_rg_per_us", "wavelength_nm", "length_um", "c6_au")
_BUDGET_FIELDS = ("eta_r", "eta_l", "t_r", "t_l", "detector_qe", "n_c", "n_t", "shots",
                  "path_transmission", "target_window")


def _validate(data: dict) -> dict:
    if not isinstance(data, dict):
        raise ConfigError("configuration root must be a table")
    out: dict = {}
    for key, value in data.items():
        if key in _TOP_LEVEL:
            if isinstance(value, bool) or not isinstance(value, _TOP_LEVEL[key]):
                raise ConfigError(f"{key} must be an integer")
            out[key] = value
            continue
        if key not in SCHEMA:
            raise ConfigError(f"unknown section {key!r}")
        if not isinstance(value, dict):
            raise ConfigError(f"section {key!r} must be a table")
        section = {}
        for k, v in value.items():
            expected = SCHEMA[key].get(k)
            if expected is None:
                raise ConfigError(f"unknown key {key}.{k}")
            if isinstance(v, bool) or not isinstance(v, expected):
                raise ConfigError(f"{key}.{k} has the wrong type ({type(v).__name__})")
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{key}.{k} must be finite")
            section[k] = v
        out[key] = section
    return out


@dataclass(frozen=True)
class RunConfig:
    data: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(_validate(data))

    def section(self, name: str) -> dict:
        return dict(self.data.get(name, {}))

    def require(self, name: str) -> dict:
        sec = self.section(name)
        if not sec:
            raise ConfigError(f"configuration needs a [{name}] section")
        return sec

    @property
    def seed(self) -> int | None:
        return self.data.get("seed")

    def require_seed(self, override: int | None = None) -> int:
        seed = override if override is not None else self.seed
        if seed is None:
            raise ConfigError("this command samples random numbers and needs a seed (--seed or 'seed =')")
        return int(seed)

    def medium(self) -> MediumParams:
        m = self.require("medium")
        missing = [k for k in _MEDIUM_REQUIRED if k not in m]
        has_density = "density_per_cm3" in m and "d_ge_c_m" in m
        if not has_density and "od_max" not in m:
            missing.append("density_per_cm3 + d_ge_c_m (or od_max)")
        if missing:
            raise ConfigError("medium section lacks: " + ", ".join(missing))
        k_s = units.wavenumber(m["wavelength_nm"] * 1e-9)
        length = units.um_to_m(m["length_um"])
        chi0_override = m["od_max"] / (k_s * length) if "od_max" in m else None
        return MediumParams(
            gamma_e=units.mhz_to_rad(m["gamma_e_mhz"]),
            gamma_rg=units.per_us_to_per_s(m["gamma_rg_per_us"]),
            rho=units.per_cm3_to_per_m3(m.get("density_per_cm3", 1.0)),
            d_ge=m.get("d_ge_c_m", 1.0),
            k_s=k_s,
            length=length,
            c6=units.au_to_c6(m["c6_au"]),
            chi0_override=chi0_override,
        )

    def drive(self) -> Drive:
        d = self.require("drive")
        try:
            return Drive(omega_c=units.mhz_to_rad(d["omega_c_mhz"]),
                         delta_s=units.mhz_to_rad(d["delta_s_mhz"]),
                         delta_c=units.mhz_to_rad(d["delta_c_mhz"]))
        except KeyError as exc:
            raise ConfigError(f"drive section lacks {exc.args[0]}") from None

    def budget(self) -> EfficiencyBudget:
        b = self.section("budget")
        return EfficiencyBudget(**{k: b[k] for k in _BUDGET_FIELDS if k in b})

    def echo(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True)


def parse_text(text: str, suffix: str = ".toml") -> RunConfig:
    try:
        if suffix.lower() == ".json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from None
    return RunConfig.from_dict(data)


def load(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_text(text, path.suffix)


def reference_config() -> RunConfig:
    """The bundled reference configuration."""
    text = resources.files("rydpol").joinpath("data/paper.toml").read_text(encoding="utf-8")
    return parse_text(text)
