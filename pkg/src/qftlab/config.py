"""Run configuration: JSON loading for plant parameter files, spec settings,
and whole-run configs.  The bundled defaults reproduce the air-suspension
case study end to end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path

from .plant import PlantParams, UncertaintySet
from .roadsim import RoadProfile, road_profile_from_json
from .specs import (
    DEFAULT_FREQUENCY_GRID,
    DisturbanceSpec,
    TrackingSpec,
    frequency_grid,
)

__all__ = [
    "RunConfig",
    "load_uncertainty",
    "uncertainty_from_json",
    "load_config",
    "config_from_json",
    "default_config_path",
    "default_plant_path",
    "default_controller_path",
]

_DATA = files("qftlab.data")

_PLANT_KEYS = ("m_a", "m_t", "c_a", "c_t", "k_t")
_FIXED_KEYS = ("q1", "q2", "p1", "p2", "s1", "s2", "s3")


def default_config_path() -> Path:
    return Path(str(_DATA / "case_config.json"))


def default_plant_path() -> Path:
    return Path(str(_DATA / "air_suspension.json"))


def default_controller_path() -> Path:
    return Path(str(_DATA / "gc_reference.json"))


def uncertainty_from_json(obj) -> UncertaintySet:
    """Parse a plant parameter document with nominal/half_ranges/fixed sections."""
    if not isinstance(obj, dict):
        raise ValueError("plant parameter document must be a JSON object")
    try:
        nominal_section = obj["nominal"]
        half = obj.get("half_ranges", {})
        fixed = obj.get("fixed", {})
    except KeyError as exc:
        raise ValueError(f"plant parameter document missing section {exc}") from exc
    unknown = set(nominal_section) - set(_PLANT_KEYS)
    if unknown:
        raise ValueError(f"unknown nominal parameters: {sorted(unknown)}")
    unknown = set(fixed) - set(_FIXED_KEYS)
    if unknown:
        raise ValueError(f"unknown fixed parameters: {sorted(unknown)}")
    nominal = PlantParams(
        **{k: float(v) for k, v in nominal_section.items()},
        **{k: float(v) for k, v in fixed.items()},
    )
    return UncertaintySet(
        nominal=nominal,
        half_ranges={k: float(v) for k, v in half.items()},
    )


def load_uncertainty(path: Path | str) -> UncertaintySet:
    return uncertainty_from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs: the plant family, the specs, sampling depth,
    an optional controller file, scenarios, output directory, and seed."""

    uncertainty: UncertaintySet
    tracking: TrackingSpec
    disturbance: DisturbanceSpec
    grid: tuple[float, ...]
    levels: int = 3
    controller_file: Path | None = None
    scenarios: tuple[RoadProfile, ...] = ()
    out_dir: Path = Path("out")
    seed: int = 1234
    sim_dt: float = 1e-3
    sim_T: float = 10.0

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.controller_file is not None and not self.controller_file.exists():
            raise ValueError(f"controller file not found: {self.controller_file}")


def _resolve(base: Path, ref: str) -> Path:
    p = Path(ref)
    return p if p.is_absolute() else base / p


def config_from_json(obj, base_dir: Path) -> RunConfig:
    if not isinstance(obj, dict):
        raise ValueError("config must be a JSON object")
    plant_ref = obj.get("plant_params")
    if isinstance(plant_ref, str):
        uncertainty = load_uncertainty(_resolve(base_dir, plant_ref))
    elif isinstance(plant_ref, dict):
        uncertainty = uncertainty_from_json(plant_ref)
    elif plant_ref is None:
        uncertainty = load_uncertainty(default_plant_path())
    else:
        raise ValueError("plant_params must be a path or an inline object")

    specs = obj.get("specs", {})
    tracking = TrackingSpec(
        w_st=float(specs.get("w_st", 1.2)),
        overshoot_pct=float(specs.get("overshoot_pct", 5.0)),
        settle_time_s=float(specs.get("settle_s", 3.0)),
        rise_time_s=float(specs.get("rise_s", 1.7)),
    )
    disturbance = DisturbanceSpec(w_sd=float(specs.get("w_sd", 0.4)))
    grid = frequency_grid(specs.get("frequency_grid", DEFAULT_FREQUENCY_GRID))

    controller_ref = obj.get("controller")
    controller_file = (
        _resolve(base_dir, controller_ref) if controller_ref else None
    )
    seed = int(obj.get("seed", 1234))
    # noise scenarios that do not pin their own seed inherit the run seed
    raw_scenarios = obj.get("scenarios", [])
    for s in raw_scenarios:
        if isinstance(s, dict) and s.get("kind") == "white_noise":
            s.setdefault("params", {}).setdefault("seed", seed)
    scenarios = tuple(road_profile_from_json(s) for s in raw_scenarios)
    return RunConfig(
        uncertainty=uncertainty,
        tracking=tracking,
        disturbance=disturbance,
        grid=grid,
        levels=int(obj.get("levels", 3)),
        controller_file=controller_file,
        scenarios=scenarios,
        out_dir=Path(obj.get("out_dir", "out")),
        seed=seed,
        sim_dt=float(obj.get("sim_dt", 1e-3)),
        sim_T=float(obj.get("sim_T", 10.0)),
    )


def load_config(path: Path | str) -> RunConfig:
    path = Path(path)
    return config_from_json(json.loads(path.read_text()), path.parent)
