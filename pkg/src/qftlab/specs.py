"""Performance specifications: closed-loop magnitude caps and the
time-domain envelope models they are derived from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lti import RationalTF, is_hurwitz, simulate_rk4, tf, tf_to_ss

__all__ = [
    "TrackingSpec",
    "DisturbanceSpec",
    "EnvelopePair",
    "StepMetrics",
    "SpecConflictError",
    "DEFAULT_FREQUENCY_GRID",
    "frequency_grid",
    "synthesize_envelopes",
    "step_metrics",
    "step_response",
]


class SpecConflictError(ValueError):
    """The stated time-domain targets cannot be met simultaneously."""


# Spans the envelope bandwidth (~2 rad/s) through the wheel-hop region
# (sqrt(k_t/m_t) ~ 79 rad/s).
DEFAULT_FREQUENCY_GRID: tuple[float, ...] = (
    0.1, 0.5, 1.0, 2.0, 5.0, 8.0, 12.0, 20.0, 50.0, 100.0,
)

FrequencyGrid = tuple[float, ...]


def frequency_grid(values: Sequence[float]) -> FrequencyGrid:
    """Validated design-frequency array: strictly increasing, all positive."""
    vals = tuple(float(v) for v in values)
    if not vals:
        raise ValueError("frequency grid is empty")
    if any(v <= 0 for v in vals):
        raise ValueError("frequencies must be positive")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError("frequencies must be strictly increasing")
    return vals


@dataclass(frozen=True)
class TrackingSpec:
    """Robust tracking cap |T| <= w_st plus the time-domain targets behind it."""

    w_st: float = 1.2
    overshoot_pct: float = 5.0
    settle_time_s: float = 3.0   # 2% band
    rise_time_s: float = 1.7     # 10-90%
    delta_db: float = field(init=False)

    def __post_init__(self):
        if self.w_st <= 0:
            raise ValueError("w_st must be positive")
        object.__setattr__(self, "delta_db", 20.0 * math.log10(self.w_st))


@dataclass(frozen=True)
class DisturbanceSpec:
    """Road-rejection cap |Gd / (1 + Gu*Gc)| <= w_sd."""

    w_sd: float = 0.4

    def __post_init__(self):
        if self.w_sd <= 0:
            raise ValueError("w_sd must be positive")


@dataclass(frozen=True)
class EnvelopePair:
    """Upper and lower step-response envelope models (unity DC gain)."""

    upper: RationalTF
    lower: RationalTF
    zeta: float
    omega_n: float
    extra_pole: float


@dataclass(frozen=True)
class StepMetrics:
    overshoot_pct: float
    rise_10_90_s: float
    settle_2pct_s: float
    dc_gain: float


def step_response(t: RationalTF, dt: float, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit-step output of a proper transfer function on a fixed grid."""
    ss = tf_to_ss(t)
    steps = int(round(T / dt))
    u = np.ones(steps + 1)
    d = np.zeros(steps + 1)
    x = simulate_rk4(ss, u, d, dt, T)
    y = x @ ss.C_out + ss.D_u * u
    return np.arange(steps + 1) * dt, y


def step_metrics(t: RationalTF, dt: float = 1e-3, T: float = 10.0) -> StepMetrics:
    """Overshoot, 10-90% rise, 2% settling, and final value of the unit-step
    response.  Crossing times are linearly interpolated between samples;
    settling is the last exit from the +/-2% band around the final value.
    """
    if not t.is_proper:
        raise ValueError("transfer function must be proper")
    if not is_hurwitz(t.den):
        raise ValueError("transfer function must be stable")
    times, y = step_response(t, dt, T)
    yf = y[-1]
    if abs(yf) < 1e-12:
        raise ValueError("step response settles to zero; metrics undefined")
    yn = y / yf
    peak = float(np.max(yn))
    overshoot = max(0.0, (peak - 1.0) * 100.0)

    def first_crossing(level: float) -> float:
        idx = np.argmax(yn >= level)
        if yn[idx] < level:
            raise ValueError(f"response never reaches {level:.0%} of final value")
        if idx == 0:
            return 0.0
        y0, y1 = yn[idx - 1], yn[idx]
        return times[idx - 1] + dt * (level - y0) / (y1 - y0)

    rise = first_crossing(0.9) - first_crossing(0.1)

    outside = np.abs(yn - 1.0) > 0.02
    if not outside.any():
        settle = 0.0
    else:
        last = int(np.max(np.nonzero(outside)))
        if last == len(yn) - 1:
            raise ValueError("response has not settled within the horizon")
        # interpolate the band crossing between the last outside sample and
        # the first inside one
        e0, e1 = abs(yn[last] - 1.0), abs(yn[last + 1] - 1.0)
        settle = times[last] + dt * (e0 - 0.02) / (e0 - e1)
    return StepMetrics(
        overshoot_pct=float(overshoot),
        rise_10_90_s=float(rise),
        settle_2pct_s=float(settle),
        dc_gain=float(yf),
    )


def _second_order(zeta: float, wn: float) -> RationalTF:
    return tf([wn * wn], [1.0, 2.0 * zeta * wn, wn * wn])


def _with_extra_pole(zeta: float, wn: float, p: float) -> RationalTF:
    den = np.convolve([1.0, 2.0 * zeta * wn, wn * wn], [1.0, p])
    return tf([wn * wn * p], den)


def synthesize_envelopes(
    spec: TrackingSpec, dt: float = 1e-3, horizon: float = 10.0
) -> EnvelopePair:
    """Build the upper/lower step-response envelope pair.

    Upper: the standard second-order model with damping from the overshoot
    relation and natural frequency from the 2%-settling approximation
    ts ~ 4/(zeta*wn).  Lower: the same core with one extra real pole, slowed
    by bisection until the lower step never rises above the upper one; the
    placement must also leave 10-90% rise >= the spec value and 2% settling
    within half a second of the upper target.
    """
    m = spec.overshoot_pct / 100.0
    if not 0 < m < 1:
        raise SpecConflictError("overshoot must be in (0, 100)%")
    lnm = math.log(m)
    zeta = -lnm / math.sqrt(math.pi**2 + lnm**2)
    wn = 4.0 / (zeta * spec.settle_time_s)
    upper = _second_order(zeta, wn)
    _, y_up = step_response(upper, dt, horizon)

    def ordering_ok(p: float) -> bool:
        _, y_lo = step_response(_with_extra_pole(zeta, wn, p), dt, horizon)
        return bool(np.min(y_up - y_lo) >= -1e-9)

    lo, hi = 0.05 * wn, wn
    if not ordering_ok(lo):
        raise SpecConflictError("no slow-pole placement keeps the envelopes ordered")
    if ordering_ok(hi):
        pole = hi
    else:
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if ordering_ok(mid):
                lo = mid
            else:
                hi = mid
        pole = 0.98 * lo  # small backoff from the ordering boundary
    lower = _with_extra_pole(zeta, wn, pole)

    lo_metrics = step_metrics(lower, dt, horizon)
    if lo_metrics.rise_10_90_s < spec.rise_time_s:
        raise SpecConflictError(
            f"lower envelope rise {lo_metrics.rise_10_90_s:.3f}s is below the "
            f"{spec.rise_time_s}s target"
        )
    if lo_metrics.settle_2pct_s > spec.settle_time_s + 0.5:
        raise SpecConflictError(
            f"lower envelope settling {lo_metrics.settle_2pct_s:.3f}s exceeds "
            f"{spec.settle_time_s + 0.5}s"
        )
    return EnvelopePair(upper=upper, lower=lower, zeta=zeta, omega_n=wn,
                        extra_pole=pole)
