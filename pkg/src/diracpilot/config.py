"""Scenario configuration files: YAML with a strict, key-checked schema."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .constants import PhysicalConstants
from . import field as fld


class ConfigError(ValueError):
    """Malformed scenario configuration; the message names the offending key."""


_TOP_KEYS = {"scenario", "seed", "output_dir", "constants", "grid", "potential",
             "field", "run"}
_CONST_KEYS = {"c", "hbar", "mass", "charge"}
_GRID_KEYS = {"z_min", "z_max", "t_min", "t_max", "n_z", "n_t"}
_POTENTIAL_KEYS = {"type", "phi0", "e0", "a3_z", "a3_ct"}
_WAVE_KEYS = {"momentum", "spin", "energy_sign", "weight"}


def _check_keys(mapping: dict, allowed: set, where: str) -> None:
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where} must be a mapping")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


@dataclass
class ScenarioConfig:
    scenario: str
    seed: int
    output_dir: str | None
    constants: PhysicalConstants
    grid: fld.GridSpec | None
    potential_spec: dict
    field_spec: dict
    run: dict
    path: Path

    def build_potential(self) -> fld.EMPotential:
        spec = dict(self.potential_spec)
        kind = spec.pop("type", "zero")
        if kind == "zero":
            return fld.ZeroPotential()
        if kind == "constant_phi":
            return fld.ConstantScalarPotential(float(spec.get("phi0", 0.0)))
        if kind == "constant_e":
            return fld.ConstantElectricField(float(spec.get("e0", 0.0)))
        if kind == "linear":
            if self.grid is None:
                raise ConfigError("linear potential requires a grid")
            return fld.linear_potential(
                self.grid, self.constants,
                float(spec.get("a3_z", 0.0)), float(spec.get("a3_ct", 0.0)),
            )
        raise ConfigError(f"unknown potential type {kind!r}")

    def build_field(self, grid: fld.GridSpec | None = None) -> fld.SpinorField:
        grid = grid or self.grid
        if grid is None:
            raise ConfigError("scenario needs a grid to build a field")
        waves = self.field_spec.get("plane_waves")
        if not waves:
            raise ConfigError("field.plane_waves must list at least one wave")
        parts = []
        weights = []
        for w in waves:
            spec = fld.PlaneWaveSpec(
                momentum=float(w.get("momentum", 0.0)),
                spin=w.get("spin", "up"),
                energy_sign=w.get("energy_sign", "positive"),
            )
            parts.append(fld.plane_wave(spec, self.constants, grid))
            wt = w.get("weight", [1.0, 0.0])
            weights.append(complex(float(wt[0]), float(wt[1])))
        if len(parts) == 1 and weights[0] == 1.0 + 0.0j:
            return parts[0]
        return fld.superpose(parts, weights)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must contain a mapping")
    _check_keys(raw, _TOP_KEYS, "top level")
    if "scenario" not in raw:
        raise ConfigError("missing required key 'scenario'")

    consts_raw = raw.get("constants", {})
    _check_keys(consts_raw, _CONST_KEYS, "constants")
    consts = PhysicalConstants(
        c=float(consts_raw.get("c", 1.0)),
        hbar=float(consts_raw.get("hbar", 1.0)),
        mass=float(consts_raw.get("mass", 1.0)),
        charge=float(consts_raw.get("charge", -1.0)),
    )

    grid = None
    if "grid" in raw:
        g = raw["grid"]
        _check_keys(g, _GRID_KEYS, "grid")
        missing = _GRID_KEYS - set(g)
        if missing:
            raise ConfigError(f"grid is missing key(s) {sorted(missing)}")
        grid = fld.GridSpec(
            float(g["z_min"]), float(g["z_max"]), float(g["t_min"]),
            float(g["t_max"]), int(g["n_z"]), int(g["n_t"]),
        )

    pot = raw.get("potential", {"type": "zero"})
    _check_keys(pot, _POTENTIAL_KEYS, "potential")

    field_spec = raw.get("field", {})
    if field_spec:
        _check_keys(field_spec, {"plane_waves"}, "field")
        for i, w in enumerate(field_spec.get("plane_waves", [])):
            _check_keys(w, _WAVE_KEYS, f"field.plane_waves[{i}]")

    run = raw.get("run", {})
    if not isinstance(run, dict):
        raise ConfigError("run must be a mapping")

    seed = int(raw.get("seed", 0))
    return ScenarioConfig(
        scenario=str(raw["scenario"]),
        seed=seed,
        output_dir=raw.get("output_dir"),
        constants=consts,
        grid=grid,
        potential_spec=pot,
        field_spec=field_spec,
        run=run,
        path=path,
    )
