"""QFT bound computation.

Plant templates (frequency-response sets over the uncertainty family),
robust tracking and disturbance-rejection bounds solved in closed form per
controller phase, bound intersection, and translation onto the nominal-loop
Nichols plane.

Feasible controller-gain sets are kept exact as unions of closed intervals
in linear gain (upper endpoints may be infinite); decibel conversion and
window clamping happen only at export time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .lti import freq_eval
from .plant import PlantInstance, nominal_index

__all__ = [
    "Template",
    "BoundCurve",
    "NicholsBound",
    "GainSet",
    "DEFAULT_PHASE_GRID",
    "GAIN_WINDOW_DB",
    "FULL_SET",
    "EMPTY_SET",
    "compute_template",
    "tracking_bound",
    "disturbance_bound",
    "intersect_bounds",
    "nominal_loop_bound",
    "feasible_oracle",
    "SpreadAdvisory",
    "envelope_spread_advisory",
    "tracking_feasible_gains",
    "disturbance_feasible_gains",
    "intersect_gain_sets",
    "gain_set_contains",
]

# Controller phases, 5 degree steps over [-360, 0].
DEFAULT_PHASE_GRID: tuple[float, ...] = tuple(
    float(p) for p in range(-360, 1, 5)
)

# Reporting window in dB; exact sets are kept unclamped internally.
GAIN_WINDOW_DB = (-60.0, 80.0)

# A gain set is a sorted tuple of disjoint closed intervals (lo, hi) in
# linear controller gain g >= 0; hi may be math.inf.
GainSet = tuple[tuple[float, float], ...]

FULL_SET: GainSet = ((0.0, math.inf),)
EMPTY_SET: GainSet = ()


def _normalize_intervals(raw: Iterable[tuple[float, float]]) -> GainSet:
    ivs = sorted((lo, hi) for lo, hi in raw if hi >= lo)
    merged: list[tuple[float, float]] = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def intersect_gain_sets(a: GainSet, b: GainSet) -> GainSet:
    out = []
    for alo, ahi in a:
        for blo, bhi in b:
            lo, hi = max(alo, blo), min(ahi, bhi)
            if lo <= hi:
                out.append((lo, hi))
    return _normalize_intervals(out)


def gain_set_contains(s: GainSet, g: float, tol: float = 0.0) -> bool:
    return any(lo - tol <= g <= hi + tol for lo, hi in s)


def _endpoints(s: GainSet) -> list[float]:
    return [e for iv in s for e in iv if math.isfinite(e)]


@dataclass(frozen=True)
class Template:
    """Plant frequency responses at one frequency across the sampled
    uncertainty set, with the companion disturbance-channel values."""

    omega: float
    points: tuple[complex, ...]       # Gu(j omega) per plant
    gd_points: tuple[complex, ...]    # Gd(j omega) per plant
    nominal_idx: int

    def __post_init__(self):
        if not self.points:
            raise ValueError("template is empty")
        if len(self.points) != len(self.gd_points):
            raise ValueError("control/disturbance point counts differ")
        if not 0 <= self.nominal_idx < len(self.points):
            raise ValueError("nominal index out of range")

    @property
    def nominal(self) -> complex:
        return self.points[self.nominal_idx]


def compute_template(plants: Sequence[PlantInstance], omega: float) -> Template:
    """One response point per plant, order preserved, nominal flagged."""
    if not plants:
        raise ValueError("plant list is empty")
    pts = []
    gd_pts = []
    for i, p in enumerate(plants):
        z = freq_eval(p.Gu, omega)
        if z == 0:
            raise ValueError(f"plant {i} has zero control response at omega={omega}")
        pts.append(z)
        gd_pts.append(freq_eval(p.Gd, omega))
    return Template(omega=omega, points=tuple(pts), gd_points=tuple(gd_pts),
                    nominal_idx=nominal_index(plants))


@dataclass(frozen=True)
class BoundCurve:
    """Feasible controller-gain sets per controller phase at one frequency."""

    omega: float
    phase_grid: tuple[float, ...]
    sets: tuple[GainSet, ...]
    spec_kind: str

    def __post_init__(self):
        if len(self.phase_grid) != len(self.sets):
            raise ValueError("phase grid and gain sets differ in length")

    @property
    def empty_phases(self) -> tuple[float, ...]:
        return tuple(p for p, s in zip(self.phase_grid, self.sets) if not s)


def _stable_quad_roots(a: float, b: float, c: float) -> tuple[float, float]:
    """Real roots of a*x^2 + b*x + c (a != 0, non-negative discriminant),
    via the cancellation-safe formulation."""
    disc = b * b - 4.0 * a * c
    disc = max(disc, 0.0)
    sq = math.sqrt(disc)
    if b >= 0:
        q = -0.5 * (b + sq)
    else:
        q = -0.5 * (b - sq)
    if q == 0.0:
        r1 = r2 = 0.0
    else:
        r1, r2 = q / a, c / q
    return (r1, r2) if r1 <= r2 else (r2, r1)


def tracking_feasible_gains(point: complex, W: float, phase_deg: float) -> GainSet:
    """Gains g >= 0 with |L/(1+L)| <= W for L = g*exp(j*phase)*point.

    With x = g*|point| and psi = phase + arg(point), the condition is the
    quadratic inequality x^2 (1 - W^2) - 2 W^2 x cos(psi) - W^2 <= 0, solved
    exactly with the case split on the sign of (1 - W^2).
    """
    mag = abs(point)
    psi = math.radians(phase_deg) + math.atan2(point.imag, point.real)
    cpsi = math.cos(psi)
    a = 1.0 - W * W
    b = -2.0 * W * W * cpsi
    c = -W * W
    if a == 0.0:
        # linear: b x + c <= 0
        if b <= 0.0:
            xs: GainSet = FULL_SET
        else:
            xs = ((0.0, -c / b),)
    elif a > 0.0:
        # opens upward; c < 0 guarantees one negative and one positive root
        _, xhi = _stable_quad_roots(a, b, c)
        xs = ((0.0, max(xhi, 0.0)),)
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            xs = FULL_SET
        else:
            x1, x2 = _stable_quad_roots(a, b, c)
            if x2 <= 0.0:
                xs = FULL_SET
            elif x1 < 0.0:
                xs = ((x2, math.inf),)
            else:
                xs = ((0.0, x1), (x2, math.inf))
    return _normalize_intervals(
        (lo / mag, hi / mag if math.isfinite(hi) else math.inf) for lo, hi in xs
    )


def disturbance_feasible_gains(
    gu: complex, gd: complex, W: float, phase_deg: float
) -> GainSet:
    """Gains g >= 0 with |gd| <= W * |1 + g*exp(j*phase)*gu|.

    Squaring gives W^2 |gu|^2 g^2 + 2 W^2 Re(exp(j*phase) gu) g
    + W^2 - |gd|^2 >= 0: positive leading coefficient, so the feasible set
    is everything outside the open interval between the real roots (or
    everything, when there are none).
    """
    e = complex(math.cos(math.radians(phase_deg)), math.sin(math.radians(phase_deg)))
    a = W * W * abs(gu) ** 2
    b = 2.0 * W * W * (e * gu).real
    c = W * W - abs(gd) ** 2
    if a == 0.0:
        raise ValueError("zero control response in disturbance bound")
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return FULL_SET
    r1, r2 = _stable_quad_roots(a, b, c)
    if r2 <= 0.0:
        return FULL_SET
    if r1 < 0.0:
        return ((r2, math.inf),)
    return _normalize_intervals([(0.0, r1), (r2, math.inf)])


def tracking_bound(
    t: Template, W: float, phases: Sequence[float] = DEFAULT_PHASE_GRID
) -> BoundCurve:
    """Robust tracking bound: per phase, the gains feasible for every plant."""
    if W <= 0:
        raise ValueError("W must be positive")
    sets = []
    for phi in phases:
        acc = FULL_SET
        for p in t.points:
            acc = intersect_gain_sets(acc, tracking_feasible_gains(p, W, phi))
            if not acc:
                break
        sets.append(acc)
    return BoundCurve(omega=t.omega, phase_grid=tuple(phases),
                      sets=tuple(sets), spec_kind="tracking")


def disturbance_bound(
    t: Template, W: float, phases: Sequence[float] = DEFAULT_PHASE_GRID
) -> BoundCurve:
    """Robust disturbance-rejection bound over all plants in the template."""
    if W <= 0:
        raise ValueError("W must be positive")
    sets = []
    for phi in phases:
        acc = FULL_SET
        for gu, gd in zip(t.points, t.gd_points):
            acc = intersect_gain_sets(acc, disturbance_feasible_gains(gu, gd, W, phi))
            if not acc:
                break
        sets.append(acc)
    return BoundCurve(omega=t.omega, phase_grid=tuple(phases),
                      sets=tuple(sets), spec_kind="disturbance")


def intersect_bounds(curves: Sequence[BoundCurve]) -> BoundCurve:
    """Per-phase intersection of bounds computed at the same frequency."""
    if not curves:
        raise ValueError("no curves to intersect")
    first = curves[0]
    for c in curves[1:]:
        if abs(c.omega - first.omega) > 1e-12 * max(1.0, abs(first.omega)):
            raise ValueError("bound curves computed at different frequencies")
        if c.phase_grid != first.phase_grid:
            raise ValueError("bound curves use different phase grids")
    sets = list(first.sets)
    for c in curves[1:]:
        sets = [intersect_gain_sets(a, b) for a, b in zip(sets, c.sets)]
    return BoundCurve(omega=first.omega, phase_grid=first.phase_grid,
                      sets=tuple(sets), spec_kind="intersection")


def feasible_oracle(
    t: Template, spec_kind: str, W: float, phase_deg: float, g: float
) -> bool:
    """Brute-force check of the underlying magnitude inequality for every
    plant at controller value g*exp(j*phase).  Independent of the
    closed-form solvers; used to validate them.
    """
    if g < 0:
        raise ValueError("gain must be non-negative")
    G = g * complex(math.cos(math.radians(phase_deg)),
                    math.sin(math.radians(phase_deg)))
    if spec_kind == "tracking":
        for p in t.points:
            L = G * p
            denom = abs(1 + L)
            if denom == 0.0:
                if abs(L) > 0.0:
                    return False
                continue
            if abs(L) / denom > W:
                return False
        return True
    if spec_kind == "disturbance":
        for gu, gd in zip(t.points, t.gd_points):
            denom = abs(1 + G * gu)
            if denom == 0.0 or abs(gd) / denom > W:
                return False
        return True
    raise ValueError(f"unknown spec kind {spec_kind!r}")


@dataclass(frozen=True)
class NicholsBound:
    """A bound translated onto the nominal-loop plane for display: per point,
    the loop phase (wrapped into (-360, 0]) and feasible |L0| intervals in
    dB (lo may be -inf, hi may be +inf)."""

    omega: float
    spec_kind: str
    points: tuple[tuple[float, tuple[tuple[float, float], ...]], ...]


def _wrap_phase(deg: float) -> float:
    while deg > 0.0:
        deg -= 360.0
    while deg <= -360.0:
        deg += 360.0
    return deg + 0.0


def _to_db(g: float) -> float:
    if g <= 0.0:
        return -math.inf
    if math.isinf(g):
        return math.inf
    return 20.0 * math.log10(g)


def nominal_loop_bound(b: BoundCurve, p0: complex) -> NicholsBound:
    """Shift a controller-plane bound by the nominal plant response so it
    constrains L0 = G * P0: phases move by arg(p0), gains by |p0| (in dB)."""
    if p0 == 0:
        raise ValueError("nominal plant response is zero")
    shift_deg = math.degrees(math.atan2(p0.imag, p0.real))
    mag = abs(p0)
    pts = []
    for phi, s in zip(b.phase_grid, b.sets):
        ivs = tuple((_to_db(lo * mag), _to_db(hi * mag) if math.isfinite(hi) else math.inf)
                    for lo, hi in s)
        pts.append((_wrap_phase(phi + shift_deg), ivs))
    return NicholsBound(omega=b.omega, spec_kind=b.spec_kind, points=tuple(pts))


@dataclass(frozen=True)
class SpreadAdvisory:
    """Per-frequency comparison of the template magnitude spread against the
    gap between the upper and lower envelope responses.  Advisory only: the
    unity-feedback tracking cap is what the solver enforces; this is the
    classical two-model viability hint."""

    omega: float
    template_spread_db: float
    envelope_spread_db: float
    within_envelope_gap: bool


def envelope_spread_advisory(
    templates: Sequence[Template], upper, lower
) -> tuple[SpreadAdvisory, ...]:
    """Compare template spreads with the envelope pair's magnitude gap."""
    out = []
    for t in templates:
        mags = [20.0 * math.log10(abs(z)) for z in t.points]
        spread = max(mags) - min(mags)
        gap = 20.0 * math.log10(abs(freq_eval(upper, t.omega))) \
            - 20.0 * math.log10(abs(freq_eval(lower, t.omega)))
        out.append(SpreadAdvisory(
            omega=t.omega,
            template_spread_db=spread,
            envelope_spread_db=gap,
            within_envelope_gap=spread <= gap,
        ))
    return tuple(out)


# --------------------------------------------------------------------------
# CSV export
# --------------------------------------------------------------------------

BOUND_CSV_HEADER = "omega,phase_deg,interval_index,lo_db,hi_db,spec_kind"


def _clamp_db(x: float) -> float:
    lo, hi = GAIN_WINDOW_DB
    return min(max(x, lo), hi)


def bound_csv_rows(curves: Sequence[BoundCurve]) -> list[str]:
    """Flatten bound curves into CSV rows; gains outside the reporting
    window are clamped to its edges (exact sets stay available in memory)."""
    rows = []
    for curve in curves:
        for phi, s in zip(curve.phase_grid, curve.sets):
            for idx, (lo, hi) in enumerate(s):
                lo_db = _clamp_db(_to_db(lo))
                hi_db = _clamp_db(_to_db(hi))
                rows.append(f"{curve.omega!r},{phi!r},{idx},{lo_db!r},{hi_db!r},"
                            f"{curve.spec_kind}")
    return rows


def parse_bound_csv(text: str) -> list[tuple[float, float, int, float, float, str]]:
    lines = text.strip().splitlines()
    if not lines or lines[0] != BOUND_CSV_HEADER:
        raise ValueError("not a bound CSV")
    out = []
    for line in lines[1:]:
        w, phi, idx, lo, hi, kind = line.split(",")
        out.append((float(w), float(phi), int(idx), float(lo), float(hi), kind))
    return out
