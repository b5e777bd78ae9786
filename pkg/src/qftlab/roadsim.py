"""Road-disturbance scenarios and open- vs closed-loop time simulation.

Roads are sampled signals under zero-order hold; simulations run on the
augmented plant+controller state space with classical RK4.  Chassis
acceleration comes from the chassis dynamics row of the state equation,
never from numerical differencing.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .lti import (
    RationalTF,
    StateSpaceModel,
    is_hurwitz,
    poly_roots,
    simulate_rk4,
    tf_to_ss,
)
from .plant import PlantInstance
from .shaping import ControllerDesign, closed_loop_char_poly, compose_controller

__all__ = [
    "TwoBumps",
    "Impulse",
    "WhiteNoise",
    "CustomRoad",
    "RoadProfile",
    "SimResult",
    "UnstableLoopError",
    "generate_road",
    "simulate_open_loop",
    "simulate_closed_loop",
    "response_metrics",
    "road_profile_from_json",
    "road_profile_to_json",
    "read_sim_csv",
    "write_sim_csv",
]


class UnstableLoopError(ValueError):
    """The requested closed loop is unstable for the given plant."""


@dataclass(frozen=True)
class TwoBumps:
    """Two rectangular road pulses; active on [t_i, t_i + width)."""

    height_m: float = 0.05
    width_s: float = 0.5
    t1_s: float = 1.0
    t2_s: float = 5.0

    def __post_init__(self):
        if self.width_s <= 0:
            raise ValueError("bump width must be positive")
        if self.t2_s <= self.t1_s + self.width_s:
            raise ValueError("second bump must start after the first ends")


@dataclass(frozen=True)
class Impulse:
    """Short rectangular pulse standing in for an ideal impulse."""

    height_m: float = 0.05
    width_s: float = 0.05
    t0_s: float = 1.0

    def __post_init__(self):
        if self.width_s <= 0:
            raise ValueError("pulse width must be positive")


@dataclass(frozen=True)
class WhiteNoise:
    """Zero-mean Gaussian road, held constant over hold_dt_s windows."""

    std_m: float = 0.01
    seed: int = 1234
    hold_dt_s: float = 0.01

    def __post_init__(self):
        if self.std_m < 0:
            raise ValueError("noise std must be >= 0")
        if self.hold_dt_s <= 0:
            raise ValueError("hold window must be positive")


@dataclass(frozen=True)
class CustomRoad:
    samples: tuple[float, ...]


RoadProfile = Union[TwoBumps, Impulse, WhiteNoise, CustomRoad]

_PROFILE_KINDS = {
    "two_bumps": TwoBumps,
    "impulse": Impulse,
    "white_noise": WhiteNoise,
    "custom": CustomRoad,
}
_KIND_OF = {cls: kind for kind, cls in _PROFILE_KINDS.items()}


def road_profile_from_json(obj) -> RoadProfile:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("road profile must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind not in _PROFILE_KINDS:
        raise ValueError(f"unknown road profile kind {kind!r}")
    params = dict(obj.get("params", {}))
    if kind == "custom":
        params["samples"] = tuple(params.get("samples", ()))
    try:
        return _PROFILE_KINDS[kind](**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for road profile {kind!r}") from exc


def road_profile_to_json(p: RoadProfile) -> dict:
    params = {k: getattr(p, k) for k in p.__dataclass_fields__}
    if isinstance(p, CustomRoad):
        params["samples"] = list(params["samples"])
    return {"kind": _KIND_OF[type(p)], "params": params}


def _num_steps(dt: float, T: float) -> int:
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps = int(round(T / dt))
    if abs(steps * dt - T) > 1e-9 * max(T, dt):
        raise ValueError(f"T={T} is not an integer multiple of dt={dt}")
    return steps


def generate_road(p: RoadProfile, dt: float, T: float) -> np.ndarray:
    """Sampled road displacement over [0, T]; deterministic given
    (profile, dt, T) including the noise seed."""
    steps = _num_steps(dt, T)
    t = np.arange(steps + 1) * dt
    if isinstance(p, TwoBumps):
        if T < p.t2_s + p.width_s:
            raise ValueError("horizon does not cover the second bump")
        on = ((t >= p.t1_s) & (t < p.t1_s + p.width_s)) | \
             ((t >= p.t2_s) & (t < p.t2_s + p.width_s))
        return np.where(on, p.height_m, 0.0)
    if isinstance(p, Impulse):
        if T < p.t0_s + p.width_s:
            raise ValueError("horizon does not cover the pulse")
        on = (t >= p.t0_s) & (t < p.t0_s + p.width_s)
        return np.where(on, p.height_m, 0.0)
    if isinstance(p, WhiteNoise):
        hold_steps = max(1, int(round(p.hold_dt_s / dt)))
        n_windows = steps // hold_steps + 1
        rng = np.random.default_rng(p.seed)
        values = rng.normal(0.0, p.std_m, n_windows) if p.std_m > 0 else np.zeros(n_windows)
        idx = np.arange(steps + 1) // hold_steps
        return values[idx]
    if isinstance(p, CustomRoad):
        samples = np.asarray(p.samples, dtype=float)
        if samples.shape != (steps + 1,):
            raise ValueError(
                f"custom road has {len(samples)} samples, expected {steps + 1}"
            )
        return samples
    raise TypeError(f"unknown road profile {type(p).__name__}")


@dataclass(frozen=True)
class SimResult:
    """Time series of one run; all arrays share the time base."""

    t: np.ndarray
    x_a: np.ndarray         # chassis displacement (m)
    x_a_ddot: np.ndarray    # chassis acceleration (m/s^2)
    x_t: np.ndarray         # wheel displacement (m)
    delta_a: np.ndarray     # control input (m^2); zero in open loop
    loop_mode: str
    plant_stable: bool


def _chassis_accel(ss: StateSpaceModel, states: np.ndarray,
                   u: np.ndarray, d: np.ndarray) -> np.ndarray:
    # second row of the plant state equation
    return states @ ss.A[1] + ss.B_u[1] * u + ss.B_d[1] * d


def simulate_open_loop(
    plant: PlantInstance, road: np.ndarray, dt: float, T: float
) -> SimResult:
    """Plant response to a road signal with the valve held shut."""
    steps = _num_steps(dt, T)
    road = np.asarray(road, dtype=float)
    if road.shape != (steps + 1,):
        raise ValueError(f"road signal must have length {steps + 1}")
    stable = is_hurwitz(plant.Gd.den)
    u = np.zeros(steps + 1)
    states = simulate_rk4(plant.ss, u, road, dt, T)
    return SimResult(
        t=np.arange(steps + 1) * dt,
        x_a=states[:, 0],
        x_a_ddot=_chassis_accel(plant.ss, states, u, road),
        x_t=states[:, 2],
        delta_a=u,
        loop_mode="open",
        plant_stable=stable,
    )


def build_closed_loop(
    plant: PlantInstance, gc: RationalTF
) -> tuple[StateSpaceModel, StateSpaceModel, int]:
    """Augmented plant+controller model with unity output feedback.

    Control channel carries the reference, disturbance channel the road.
    Returns (augmented model, controller realization, plant state count).
    """
    ctrl = tf_to_ss(gc)
    n, m = plant.ss.n, ctrl.n
    Cp = plant.ss.C_out
    A = np.zeros((n + m, n + m))
    A[:n, :n] = plant.ss.A - np.outer(plant.ss.B_u * ctrl.D_u, Cp)
    A[:n, n:] = np.outer(plant.ss.B_u, ctrl.C_out)
    A[n:, :n] = -np.outer(ctrl.B_u, Cp)
    A[n:, n:] = ctrl.A
    B_r = np.concatenate([plant.ss.B_u * ctrl.D_u, ctrl.B_u])
    B_d = np.concatenate([plant.ss.B_d, np.zeros(m)])
    C = np.concatenate([Cp, np.zeros(m)])
    return StateSpaceModel(A, B_r, B_d, C), ctrl, n


def simulate_closed_loop(
    plant: PlantInstance,
    design: ControllerDesign,
    road: np.ndarray,
    dt: float,
    T: float,
    reference: float | np.ndarray = 0.0,
) -> SimResult:
    """Closed-loop response: controller drives the valve from the chassis
    displacement error (reference - x_a).  Rejects controllers that are
    improper or destabilize this plant.
    """
    steps = _num_steps(dt, T)
    road = np.asarray(road, dtype=float)
    if road.shape != (steps + 1,):
        raise ValueError(f"road signal must have length {steps + 1}")
    gc = compose_controller(design)
    if not gc.is_proper:
        raise ValueError(
            f"controller is improper (relative degree {gc.relative_degree})"
        )
    char = closed_loop_char_poly(plant, gc)
    if not is_hurwitz(char):
        bad = [r for r in poly_roots(char) if r.real >= -1e-9]
        raise UnstableLoopError(
            "controller destabilizes this plant; unstable poles: "
            + ", ".join(f"{r:.4g}" for r in bad)
        )
    ref = np.full(steps + 1, float(reference)) if np.isscalar(reference) \
        else np.asarray(reference, dtype=float)
    if ref.shape != (steps + 1,):
        raise ValueError(f"reference signal must have length {steps + 1}")
    aug, ctrl, n = build_closed_loop(plant, gc)
    states = simulate_rk4(aug, ref, road, dt, T)
    xp = states[:, :n]
    xc = states[:, n:]
    err = ref - xp[:, 0]
    delta_a = xc @ ctrl.C_out + ctrl.D_u * err
    return SimResult(
        t=np.arange(steps + 1) * dt,
        x_a=xp[:, 0],
        x_a_ddot=_chassis_accel(plant.ss, xp, delta_a, road),
        x_t=xp[:, 2],
        delta_a=delta_a,
        loop_mode="closed",
        plant_stable=is_hurwitz(plant.Gd.den),
    )


def response_metrics(r: SimResult) -> dict[str, float]:
    """Peak and RMS of chassis displacement and acceleration."""
    if len(r.t) == 0:
        raise ValueError("empty simulation result")
    return {
        "peak_disp": float(np.max(np.abs(r.x_a))),
        "rms_disp": float(math.sqrt(np.mean(r.x_a**2))),
        "peak_accel": float(np.max(np.abs(r.x_a_ddot))),
        "rms_accel": float(math.sqrt(np.mean(r.x_a_ddot**2))),
    }


SIM_CSV_HEADER = "t,x_a,x_a_ddot,x_t,delta_a"


def read_sim_csv(path: Path | str) -> dict[str, np.ndarray]:
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != SIM_CSV_HEADER:
        raise ValueError("not a simulation CSV")
    cols = SIM_CSV_HEADER.split(",")
    data = [[float(v) for v in line.split(",")] for line in lines[1:]]
    arr = np.array(data)
    return {name: arr[:, i] for i, name in enumerate(cols)}


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_sim_csv(r: SimResult, path: Path | str) -> None:
    """Write the time series plus a metrics sidecar (<path>.metrics.json)."""
    path = Path(path)
    lines = [SIM_CSV_HEADER]
    cols = [r.t, r.x_a, r.x_a_ddot, r.x_t, r.delta_a]
    for i in range(len(r.t)):
        lines.append(",".join(repr(float(c[i])) for c in cols))
    _atomic_write(path, "\n".join(lines) + "\n")
    sidecar = path.with_suffix(path.suffix + ".metrics.json")
    payload = dict(response_metrics(r), loop_mode=r.loop_mode,
                   plant_stable=r.plant_stable)
    _atomic_write(sidecar, json.dumps(payload, indent=2, sort_keys=True) + "\n")
