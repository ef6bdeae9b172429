"""Experiment configuration: one JSON file describes one reproducible run.

Key tree (defaults in parentheses):

    scenario            "S0" | "S1" | "S2" | "S3"
    domain              {dim, lengths, cells}
    physics             {chi, eps, mollifier_eps (= eps), eps_ladder?, cm_estimate?}
    initial_measure     {atoms: [{position, weight}], density_file?, density_p?}
    time                {T, cfl (0.45), dt_max (1e-3), dt_min (1e-10),
                         record_t0 (1e-4), record_uniform_dt (T/100), ladder_t0 (0.25)}
    diagnostics         {p_list ([1.5, 2, 2.5, 8, "inf"]), dictionary_order (4),
                         delta_grid ([0.5, 0.2, 0.1, 0.05]), r_star (dim-dependent)}
    blowup              {linf_factor (1e6), linf_threshold?, dt_min (1e-10)}
    output              {directory, snapshot_times ([])}
    seed                (0)

Scenario consistency: S0 is the chi = 0 diagnostic reduction; S1 needs n = 2,
chi < 0; S2 needs n = 2, chi > 0 (with a warning when the mass exceeds a
configured critical-mass estimate); S3 needs n = 3, chi < 0 and density-type
initial data.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, build_grid
from .measures import RadonMeasure, load_density
from .stepper import BlowupThresholds


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


def _get(d: dict, key: str, default=None, required: bool = False, where: str = ""):
    if key not in d:
        if required:
            raise ConfigError(f"missing required config field {where}{key}")
        return default
    return d[key]


def _parse_p(value) -> float:
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return float("inf")
        raise ConfigError(f"invalid p value {value!r} in diagnostics.p_list")
    return float(value)


@dataclass
class SimConfig:
    scenario: str
    domain: dict
    physics: dict
    initial_measure: dict
    time: dict
    diagnostics: dict
    blowup: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = 0

    @classmethod
    def from_dict(cls, raw: dict) -> "SimConfig":
        cfg = cls(
            scenario=_get(raw, "scenario", required=True),
            domain=dict(_get(raw, "domain", required=True)),
            physics=dict(_get(raw, "physics", required=True)),
            initial_measure=dict(_get(raw, "initial_measure", required=True)),
            time=dict(_get(raw, "time", required=True)),
            diagnostics=dict(_get(raw, "diagnostics", default={})),
            blowup=dict(_get(raw, "blowup", default={})),
            output=dict(_get(raw, "output", default={})),
            seed=int(_get(raw, "seed", default=0)),
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "SimConfig":
        with open(path) as fh:
            text = fh.read()
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
        return cls.from_dict(raw)

    # -- derived accessors ----------------------------------------------

    def build_grid(self) -> Grid:
        d = self.domain
        return build_grid(d["dim"], d["lengths"], d["cells"])

    @property
    def chi(self) -> float:
        return float(self.physics["chi"])

    @property
    def eps(self) -> float:
        return float(self.physics["eps"])

    @property
    def mollifier_eps(self) -> float:
        # Tied to the regularization eps unless explicitly decoupled.
        return float(self.physics.get("mollifier_eps", self.physics["eps"]))

    @property
    def T(self) -> float:
        return float(self.time["T"])

    @property
    def cfl(self) -> float:
        return float(self.time.get("cfl", 0.45))

    @property
    def dt_max(self) -> float:
        return float(self.time.get("dt_max", 1e-3))

    @property
    def record_t0(self) -> float:
        return float(self.time.get("record_t0", 1e-4))

    @property
    def record_uniform_dt(self) -> float:
        return float(self.time.get("record_uniform_dt", self.T / 100.0))

    @property
    def ladder_t0(self) -> float:
        return float(self.time.get("ladder_t0", 0.25))

    @property
    def p_list(self) -> list[float]:
        return [_parse_p(p) for p in self.diagnostics.get("p_list", [1.5, 2, 2.5, 8, "inf"])]

    @property
    def dictionary_order(self) -> int:
        return int(self.diagnostics.get("dictionary_order", 4))

    @property
    def delta_grid(self) -> list[float]:
        return [float(x) for x in self.diagnostics.get("delta_grid", [0.5, 0.2, 0.1, 0.05])]

    @property
    def r_star(self) -> float:
        default = 1.5 if self.domain["dim"] == 2 else 1.25
        return float(self.diagnostics.get("r_star", default))

    @property
    def eps_ladder(self) -> list[float] | None:
        ladder = self.physics.get("eps_ladder")
        return [float(e) for e in ladder] if ladder is not None else None

    @property
    def output_directory(self) -> str:
        return self.output.get("directory", "kslab_run")

    @property
    def snapshot_times(self) -> list[float]:
        return [float(t) for t in self.output.get("snapshot_times", [])]

    def blowup_thresholds(self) -> BlowupThresholds:
        b = self.blowup
        return BlowupThresholds(
            linf_factor=float(b.get("linf_factor", 1e6)),
            linf_threshold=(
                float(b["linf_threshold"]) if "linf_threshold" in b else None
            ),
            dt_min=float(b.get("dt_min", self.time.get("dt_min", 1e-10))),
        )

    def build_measure(self, grid: Grid) -> RadonMeasure:
        m = self.initial_measure
        atoms = [
            (np.asarray(a["position"], dtype=float), float(a["weight"]))
            for a in m.get("atoms", [])
        ]
        density = None
        density_p = None
        if m.get("density_file"):
            density_p = float(m.get("density_p", 2.0))
            loaded = load_density(m["density_file"], grid, density_p)
            density = loaded.density
        measure = RadonMeasure(atoms=atoms, density=density, density_p=density_p)
        measure.validate_in_box(grid.lengths)
        if self.scenario == "S2" and "cm_estimate" in self.physics:
            cm = float(self.physics["cm_estimate"])
            if measure.mass > cm:
                warnings.warn(
                    f"S2 initial mass {measure.mass:.4g} exceeds the estimated "
                    f"critical mass {cm:.4g}; expect blow-up"
                )
        return measure

    # -- validation -----------------------------------------------------

    def validate(self) -> None:
        dim = _get(self.domain, "dim", required=True, where="domain.")
        if dim not in (2, 3):
            raise ConfigError(f"domain.dim must be 2 or 3, got {dim}")
        for key in ("lengths", "cells"):
            vals = _get(self.domain, key, required=True, where="domain.")
            if len(vals) != dim:
                raise ConfigError(f"domain.{key} must have {dim} entries")
        chi = float(_get(self.physics, "chi", required=True, where="physics."))
        eps = float(_get(self.physics, "eps", required=True, where="physics."))
        if not (0.0 < eps <= 1.0):
            raise ConfigError(f"physics.eps must lie in (0, 1], got {eps}")
        if self.T <= 0:
            raise ConfigError(f"time.T must be positive, got {self.T}")
        if not (0.0 < self.cfl < 1.0):
            raise ConfigError(f"time.cfl must lie in (0, 1), got {self.cfl}")
        has_atoms = bool(self.initial_measure.get("atoms"))
        has_density = bool(self.initial_measure.get("density_file"))
        if not has_atoms and not has_density:
            raise ConfigError("initial_measure needs atoms and/or a density_file")

        scenario = self.scenario
        if scenario == "S0":
            if chi != 0.0:
                raise ConfigError(f"scenario S0 requires chi = 0, got {chi}")
        elif scenario == "S1":
            if dim != 2 or chi >= 0:
                raise ConfigError(
                    f"scenario S1 requires n = 2 and chi < 0, got n={dim}, chi={chi}"
                )
        elif scenario == "S2":
            if dim != 2 or chi <= 0:
                raise ConfigError(
                    f"scenario S2 requires n = 2 and chi > 0, got n={dim}, chi={chi}"
                )
        elif scenario == "S3":
            if dim != 3 or chi >= 0:
                raise ConfigError(
                    f"scenario S3 requires n = 3 and chi < 0, got n={dim}, chi={chi}"
                )
            if has_atoms or not has_density:
                raise ConfigError("scenario S3 requires density-type initial data")
        else:
            raise ConfigError(
                f"scenario must be one of S0, S1, S2, S3, got {scenario!r}"
            )

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "domain": self.domain,
            "physics": self.physics,
            "initial_measure": self.initial_measure,
            "time": self.time,
            "diagnostics": self.diagnostics,
            "blowup": self.blowup,
            "output": self.output,
            "seed": self.seed,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def replace(self, **sections) -> "SimConfig":
        """New config with whole sections replaced (dicts are shallow-merged)."""
        raw = json.loads(json.dumps(self.to_dict()))
        for key, value in sections.items():
            if isinstance(value, dict) and isinstance(raw.get(key), dict):
                raw[key].update(value)
            else:
                raw[key] = value
        return SimConfig.from_dict(raw)
