"""Controller representation as composable gain/pole/zero elements,
the bundled reference controller, and design validation against the
robust specs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .lti import (
    ONE,
    Polynomial,
    RationalTF,
    freq_eval,
    is_hurwitz,
    poly_add,
    poly_multiply,
    tf,
    tf_mul,
)
from .plant import PlantInstance
from .specs import DisturbanceSpec, TrackingSpec

__all__ = [
    "Gain",
    "RealPole",
    "RealZero",
    "ComplexPolePair",
    "ComplexZeroPair",
    "Integrator",
    "ControllerElement",
    "ControllerDesign",
    "FrequencyVerdict",
    "LoopReport",
    "compose_controller",
    "reference_controller",
    "validate_design",
    "loop_report_to_json",
    "design_to_json",
    "design_from_json",
    "save_design",
    "load_design",
    "closed_loop_char_poly",
]


def _positive_magnitude(value: float, what: str) -> float:
    v = abs(float(value))
    if v == 0.0:
        raise ValueError(f"{what} must be nonzero")
    return v


@dataclass(frozen=True)
class Gain:
    k: float

    def factor(self) -> RationalTF:
        return tf([self.k], [1.0])


@dataclass(frozen=True)
class RealPole:
    """Stable real pole 1/(s+a); the corner may be given with either sign."""

    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", _positive_magnitude(self.a, "pole corner"))

    def factor(self) -> RationalTF:
        return tf([1.0], [1.0, self.a])


@dataclass(frozen=True)
class RealZero:
    """Minimum-phase real zero (s+a)."""

    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", _positive_magnitude(self.a, "zero corner"))

    def factor(self) -> RationalTF:
        return tf([1.0, self.a], [1.0])


@dataclass(frozen=True)
class ComplexPolePair:
    """Stable complex pole pair 1/(s^2 + 2|re|s + re^2 + im^2)."""

    re: float
    im: float

    def __post_init__(self):
        object.__setattr__(self, "re", _positive_magnitude(self.re, "pole real part"))
        object.__setattr__(self, "im", abs(float(self.im)))

    def factor(self) -> RationalTF:
        return tf([1.0], [1.0, 2.0 * self.re, self.re**2 + self.im**2])


@dataclass(frozen=True)
class ComplexZeroPair:
    re: float
    im: float

    def __post_init__(self):
        object.__setattr__(self, "re", _positive_magnitude(self.re, "zero real part"))
        object.__setattr__(self, "im", abs(float(self.im)))

    def factor(self) -> RationalTF:
        return tf([1.0, 2.0 * self.re, self.re**2 + self.im**2], [1.0])


@dataclass(frozen=True)
class Integrator:
    order: int = 1

    def __post_init__(self):
        if int(self.order) < 1:
            raise ValueError("integrator order must be >= 1")
        object.__setattr__(self, "order", int(self.order))

    def factor(self) -> RationalTF:
        return tf([1.0], [1.0] + [0.0] * self.order)


ControllerElement = Union[
    Gain, RealPole, RealZero, ComplexPolePair, ComplexZeroPair, Integrator
]

_KINDS: dict[str, type] = {
    "gain": Gain,
    "real_pole": RealPole,
    "real_zero": RealZero,
    "complex_pole_pair": ComplexPolePair,
    "complex_zero_pair": ComplexZeroPair,
    "integrator": Integrator,
}
_KIND_OF = {cls: kind for kind, cls in _KINDS.items()}


@dataclass(frozen=True)
class ControllerDesign:
    """Ordered element list; the composed product is order-independent."""

    elements: tuple[ControllerElement, ...] = ()

    def with_element(self, e: ControllerElement) -> "ControllerDesign":
        return ControllerDesign(self.elements + (e,))


def compose_controller(d: ControllerDesign) -> RationalTF:
    """Product of all element factors; the empty design composes to 1."""
    out = RationalTF(ONE, ONE)
    for e in d.elements:
        out = tf_mul(out, e.factor())
    return out


def reference_controller() -> ControllerDesign:
    """The case study's controller: zeros at 0.84 and 20.2 rad/s, poles at
    9.45 and 4.3 rad/s, a complex pole pair at 309.6 +/- 309.7j, gain 3673
    (inferred from the published numerator's leading coefficient)."""
    return ControllerDesign((
        Gain(3673.0),
        RealZero(0.84),
        RealZero(20.2),
        RealPole(9.45),
        RealPole(4.3),
        ComplexPolePair(309.6, 309.7),
    ))


def design_to_json(d: ControllerDesign) -> list[dict]:
    out = []
    for e in d.elements:
        params = {k: getattr(e, k) for k in e.__dataclass_fields__}
        out.append({"kind": _KIND_OF[type(e)], "params": params})
    return out


def design_from_json(obj) -> ControllerDesign:
    if not isinstance(obj, list):
        raise ValueError("controller file must be a JSON list of elements")
    elements = []
    for i, item in enumerate(obj):
        if not isinstance(item, dict) or "kind" not in item:
            raise ValueError(f"element {i} is not an object with a 'kind' field")
        kind = item["kind"]
        if kind not in _KINDS:
            raise ValueError(f"element {i} has unknown kind {kind!r}")
        params = item.get("params", {})
        try:
            elements.append(_KINDS[kind](**params))
        except TypeError as exc:
            raise ValueError(f"element {i} ({kind}): bad parameters {params}") from exc
    return ControllerDesign(tuple(elements))


def save_design(d: ControllerDesign, path: Path | str) -> None:
    Path(path).write_text(json.dumps(design_to_json(d), indent=2, sort_keys=True) + "\n")


def load_design(path: Path | str) -> ControllerDesign:
    return design_from_json(json.loads(Path(path).read_text()))


# --------------------------------------------------------------------------
# Design validation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FrequencyVerdict:
    omega: float
    worst_tracking: float        # max |T| over plants
    worst_disturbance: float     # max |Gd/(1+Gu*G)| over plants
    tracking_ok: bool
    disturbance_ok: bool
    tracking_margin_db: float    # 20 log10(W_st / worst |T|)
    disturbance_margin_db: float


@dataclass(frozen=True)
class LoopReport:
    per_frequency: tuple[FrequencyVerdict, ...]
    nominal_stable: bool
    robust_stable: bool
    unstable_plant_indices: tuple[int, ...]
    gain_margin_db: float
    phase_margin_deg: float
    all_specs_ok: bool


def _json_num(x: float) -> float | None:
    # JSON has no inf/nan
    return x if math.isfinite(x) else None


def loop_report_to_json(r: LoopReport) -> dict:
    return {
        "per_frequency": [
            {
                "omega": v.omega,
                "worst_tracking": _json_num(v.worst_tracking),
                "worst_disturbance": _json_num(v.worst_disturbance),
                "tracking_ok": v.tracking_ok,
                "disturbance_ok": v.disturbance_ok,
                "tracking_margin_db": _json_num(v.tracking_margin_db),
                "disturbance_margin_db": _json_num(v.disturbance_margin_db),
            }
            for v in r.per_frequency
        ],
        "nominal_stable": r.nominal_stable,
        "robust_stable": r.robust_stable,
        "unstable_plant_indices": list(r.unstable_plant_indices),
        "gain_margin_db": _json_num(r.gain_margin_db),
        "phase_margin_deg": _json_num(r.phase_margin_deg),
        "all_specs_ok": r.all_specs_ok,
    }


def closed_loop_char_poly(plant: PlantInstance, gc: RationalTF) -> Polynomial:
    """Characteristic polynomial of the unity-feedback loop Gu*Gc."""
    return poly_add(
        poly_multiply(plant.Gu.den, gc.den),
        poly_multiply(plant.Gu.num, gc.num),
    )


def _loop_margins(gu: RationalTF, gc: RationalTF) -> tuple[float, float]:
    """Gain margin (dB) and phase margin (deg) of the nominal loop, from a
    dense logarithmic sweep with linear interpolation at the crossovers.
    Returns inf where there is no crossover."""
    omegas = np.logspace(-3, 4, 3000)
    resp = np.array([freq_eval(gu, w) * freq_eval(gc, w) for w in omegas])
    if np.any(resp == 0):
        return math.inf, math.inf
    mag_db = 20.0 * np.log10(np.abs(resp))
    phase = np.unwrap(np.angle(resp))
    phase_deg = np.degrees(phase)

    gm = math.inf
    target = -180.0
    for i in range(len(omegas) - 1):
        p0, p1 = phase_deg[i] - target, phase_deg[i + 1] - target
        if p0 == 0.0 or p0 * p1 < 0:
            t = 0.0 if p1 == p0 else p0 / (p0 - p1)
            db = mag_db[i] + t * (mag_db[i + 1] - mag_db[i])
            gm = min(gm, -db)
    pm = math.inf
    for i in range(len(omegas) - 1):
        m0, m1 = mag_db[i], mag_db[i + 1]
        if m0 == 0.0 or m0 * m1 < 0:
            t = 0.0 if m1 == m0 else m0 / (m0 - m1)
            ph = phase_deg[i] + t * (phase_deg[i + 1] - phase_deg[i])
            pm = min(pm, 180.0 + ph)
    return gm, pm


def validate_design(
    d: ControllerDesign,
    plants: Sequence[PlantInstance],
    tracking: TrackingSpec,
    disturbance: DisturbanceSpec,
    grid: Sequence[float],
) -> LoopReport:
    """Direct frequency-sweep verification of a design.

    Independent of the bound solver: evaluates the two closed-loop
    magnitudes per plant per design frequency, plus a Hurwitz stability
    test of every sampled closed loop.
    """
    if not plants:
        raise ValueError("plant list is empty")
    gc = compose_controller(d)
    if not gc.is_proper:
        raise ValueError(
            f"composed controller is improper (relative degree "
            f"{gc.relative_degree})"
        )
    verdicts = []
    for w in grid:
        gcw = freq_eval(gc, w)
        worst_t = 0.0
        worst_d = 0.0
        for p in plants:
            gu = freq_eval(p.Gu, w)
            gd = freq_eval(p.Gd, w)
            L = gu * gcw
            one_plus = abs(1 + L)
            if one_plus == 0.0:
                worst_t = worst_d = math.inf
                break
            worst_t = max(worst_t, abs(L) / one_plus)
            worst_d = max(worst_d, abs(gd) / one_plus)
        t_ok = worst_t <= tracking.w_st
        d_ok = worst_d <= disturbance.w_sd
        verdicts.append(FrequencyVerdict(
            omega=w,
            worst_tracking=worst_t,
            worst_disturbance=worst_d,
            tracking_ok=t_ok,
            disturbance_ok=d_ok,
            tracking_margin_db=20.0 * math.log10(tracking.w_st / worst_t)
            if worst_t > 0 else math.inf,
            disturbance_margin_db=20.0 * math.log10(disturbance.w_sd / worst_d)
            if worst_d > 0 else math.inf,
        ))
    unstable = []
    nominal_stable = False
    for i, p in enumerate(plants):
        stable = is_hurwitz(closed_loop_char_poly(p, gc))
        if p.is_nominal:
            nominal_stable = stable
        if not stable:
            unstable.append(i)
    nominal = next(p for p in plants if p.is_nominal)
    if nominal_stable:
        gm, pm = _loop_margins(nominal.Gu, gc)
    else:
        gm = pm = math.nan
    all_ok = (nominal_stable and not unstable
              and all(v.tracking_ok and v.disturbance_ok for v in verdicts))
    return LoopReport(
        per_frequency=tuple(verdicts),
        nominal_stable=nominal_stable,
        robust_stable=not unstable,
        unstable_plant_indices=tuple(unstable),
        gain_margin_db=gm,
        phase_margin_deg=pm,
        all_specs_ok=all_ok,
    )
