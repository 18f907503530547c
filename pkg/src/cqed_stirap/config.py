"""Strict INI-style run configuration.

Sections and keys (all optional; defaults are the reference operating point)::

    [system]      omega_q_ghz omega_r_ghz omega_d_ghz g_ghz omega_drive_mhz
                  kappa_mhz gamma_q_mhz n_max
                  rates_source (table|manual) gamma_31_mhz gamma_32_mhz gamma_21_mhz
                  decay_override (true|false)
    [pulses]      omega_p_mhz omega_s_mhz t_s_ns sigma_ns
    [drive]       delta_1_mhz delta_2_mhz cd_enabled cd_scale
    [integrator]  t0_ns tf_ns dt_ns
    [sweep]       axis1 axis1_values axis2 axis2_values metric

Frequencies are ordinary frequencies (nu = omega / 2 pi). Sweep values are
comma-separated, or ``linspace(start, stop, num)``. Detuning axes take MHz
values, ``sigma`` takes ns and ``ts_over_sigma`` is dimensionless.
Unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import units
from .cqed import REFERENCE_FREQUENCIES, SystemParams
from .errors import CqedStirapError, ConfigError
from .experiments import REFERENCE_PULSES, METRICS, SWEEP_AXES, ProtocolConfig
from .lindblad import IntegratorConfig
from .pulses import DriveConfig, PulseSchedule

_FLOAT, _INT, _BOOL, _STR, _LIST = "float", "int", "bool", "str", "list"

SCHEMA = {
    "system": {
        "omega_q_ghz": _FLOAT, "omega_r_ghz": _FLOAT, "omega_d_ghz": _FLOAT, "g_ghz": _FLOAT,
        "omega_drive_mhz": _FLOAT, "kappa_mhz": _FLOAT, "gamma_q_mhz": _FLOAT, "n_max": _INT,
        "rates_source": _STR, "gamma_31_mhz": _FLOAT, "gamma_32_mhz": _FLOAT,
        "gamma_21_mhz": _FLOAT, "decay_override": _BOOL,
    },
    "pulses": {"omega_p_mhz": _FLOAT, "omega_s_mhz": _FLOAT, "t_s_ns": _FLOAT, "sigma_ns": _FLOAT},
    "drive": {"delta_1_mhz": _FLOAT, "delta_2_mhz": _FLOAT, "cd_enabled": _BOOL, "cd_scale": _FLOAT},
    "integrator": {"t0_ns": _FLOAT, "tf_ns": _FLOAT, "dt_ns": _FLOAT},
    "sweep": {"axis1": _STR, "axis1_values": _LIST, "axis2": _STR, "axis2_values": _LIST,
              "metric": _STR},
}

NONNEGATIVE = {"g_ghz", "omega_drive_mhz", "kappa_mhz", "gamma_q_mhz", "gamma_31_mhz",
               "gamma_32_mhz", "gamma_21_mhz", "omega_p_mhz", "omega_s_mhz", "cd_scale"}
POSITIVE = {"omega_q_ghz", "omega_r_ghz", "omega_d_ghz", "sigma_ns", "dt_ns"}

_LINSPACE = re.compile(r"^linspace\(\s*([^,]+),\s*([^,]+),\s*([^,)]+)\)$")


@dataclass(frozen=True)
class SweepSpec:
    axis1: tuple
    axis2: tuple
    metric: str = "final_p2"


@dataclass(frozen=True)
class RunConfig:
    protocol: ProtocolConfig
    sweep: SweepSpec | None
    source: str | None = None


class _Located:
    """Maps ``(section, key)`` to the 1-based line where it was written."""

    def __init__(self, text):
        self.lines = {}
        section = None
        for no, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if stripped.startswith("[") and stripped.endswith("]"):
                section = stripped[1:-1].strip()
            elif section and stripped and stripped[0] not in "#;":
                key = re.split(r"[=:]", stripped, maxsplit=1)[0].strip().lower()
                self.lines.setdefault((section, key), no)

    def where(self, section, key):
        no = self.lines.get((section, key))
        return f"[{section}] {key}" + (f" (line {no})" if no else "")


def _parse_list(raw):
    m = _LINSPACE.match(raw.strip())
    if m:
        start, stop, num = float(m.group(1)), float(m.group(2)), int(m.group(3))
        return np.linspace(start, stop, num)
    items = [x.strip() for x in raw.replace("\n", ",").split(",") if x.strip()]
    return np.array([float(x) for x in items])


def _convert(kind, raw):
    if kind == _FLOAT:
        value = float(raw)
        if not np.isfinite(value):
            raise ValueError("not a finite number")
        return value
    if kind == _INT:
        return int(raw)
    if kind == _BOOL:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError("expected true/false")
    if kind == _LIST:
        return _parse_list(raw)
    return raw.strip()


def parse_config_text(text, source=None) -> dict:
    """Parse and type-check config text into ``{section: {key: value}}``."""
    parser = configparser.ConfigParser(interpolation=None, strict=True,
                                       inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source or "<config>")
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    loc = _Located(text)
    out = {}
    if parser.defaults():
        raise ConfigError("[DEFAULT] section is not supported")
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]; expected one of {sorted(SCHEMA)}")
        values = {}
        for key, raw in parser.items(section):
            kind = SCHEMA[section].get(key)
            if kind is None:
                raise ConfigError(f"unknown key {loc.where(section, key)}")
            try:
                value = _convert(kind, raw)
            except ValueError as exc:
                raise ConfigError(f"bad value {raw!r} for {loc.where(section, key)}: {exc}") from exc
            if key in NONNEGATIVE and value < 0:
                raise ConfigError(f"{loc.where(section, key)} must be >= 0, got {value}")
            if key in POSITIVE and value <= 0:
                raise ConfigError(f"{loc.where(section, key)} must be > 0, got {value}")
            values[key] = value
        out[section] = values
    return out


def build_run_config(sections: dict, source=None) -> RunConfig:
    system = sections.get("system", {})
    pulses = sections.get("pulses", {})
    drive = sections.get("drive", {})
    integ = sections.get("integrator", {})
    sweep = sections.get("sweep")

    def pick(section, key, table):
        return section.get(key, table[key])

    try:
        params = SystemParams.from_frequencies(
            **{k: pick(system, k, REFERENCE_FREQUENCIES) for k in REFERENCE_FREQUENCIES},
            n_max=system.get("n_max", 10),
        )
        rates_source = system.get("rates_source", "table")
        manual = None
        if rates_source == "manual":
            missing = [k for k in ("gamma_31_mhz", "gamma_32_mhz", "gamma_21_mhz") if k not in system]
            if missing:
                raise ConfigError(f"rates_source = manual needs [system] {', '.join(missing)}")
            manual = tuple(units.from_mhz(system[k]) for k in ("gamma_31_mhz", "gamma_32_mhz", "gamma_21_mhz"))
        schedule = PulseSchedule(
            omega_p=units.from_mhz(pick(pulses, "omega_p_mhz", REFERENCE_PULSES)),
            omega_s=units.from_mhz(pick(pulses, "omega_s_mhz", REFERENCE_PULSES)),
            t_s=pick(pulses, "t_s_ns", REFERENCE_PULSES),
            sigma=pick(pulses, "sigma_ns", REFERENCE_PULSES),
        )
        drive_cfg = DriveConfig(
            delta_1=units.from_mhz(drive.get("delta_1_mhz", 0.0)),
            delta_2=units.from_mhz(drive.get("delta_2_mhz", 0.0)),
            cd_enabled=drive.get("cd_enabled", False),
            cd_scale=drive.get("cd_scale", 1.0),
        )
        defaults = IntegratorConfig()
        integrator = IntegratorConfig(
            t0=integ.get("t0_ns", defaults.t0),
            tf=integ.get("tf_ns", defaults.tf),
            dt=integ.get("dt_ns", defaults.dt),
        )
        integrator.n_steps  # divisibility check
        protocol = ProtocolConfig(
            system=params, schedule=schedule, drive=drive_cfg, integrator=integrator,
            decay_override=system.get("decay_override", False),
            rates_source=rates_source, manual_rates=manual,
        )
    except ConfigError:
        raise
    except CqedStirapError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc

    spec = None
    if sweep is not None:
        spec = _build_sweep(sweep)
    return RunConfig(protocol=protocol, sweep=spec, source=source)


def _axis_to_internal(name, values):
    if name in ("delta_1", "delta_2"):
        return units.from_mhz(values)
    return np.asarray(values, dtype=float)


def axis_to_config_units(name, values):
    if name in ("delta_1", "delta_2"):
        return units.to_mhz(np.asarray(values))
    return np.asarray(values, dtype=float)


def _build_sweep(sweep):
    axes = []
    for k in ("axis1", "axis2"):
        if k not in sweep or f"{k}_values" not in sweep:
            raise ConfigError(f"[sweep] needs {k} and {k}_values")
        name = sweep[k]
        if name not in SWEEP_AXES:
            raise ConfigError(f"[sweep] {k} = {name!r} is not one of {SWEEP_AXES}")
        values = sweep[f"{k}_values"]
        if len(values) == 0:
            raise ConfigError(f"[sweep] {k}_values is empty")
        if name == "sigma" and np.any(values <= 0):
            raise ConfigError("[sweep] sigma values must be > 0")
        axes.append((name, _axis_to_internal(name, values)))
    if axes[0][0] == axes[1][0]:
        raise ConfigError("[sweep] axis1 and axis2 must differ")
    metric = sweep.get("metric", "final_p2")
    if metric not in METRICS:
        raise ConfigError(f"[sweep] metric {metric!r} is not one of {METRICS}")
    return SweepSpec(axis1=axes[0], axis2=axes[1], metric=metric)


def load_config(path=None) -> RunConfig:
    """Read a config file; ``None`` gives the built-in defaults."""
    if path is None:
        return build_run_config({})
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return build_run_config(parse_config_text(text, source=str(path)), source=str(path))
