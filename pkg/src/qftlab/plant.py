"""Air-suspension plant family: physical parameters, the five-state model,
uncertainty sampling, and cross-checks against the reference coefficient
intervals of the bundled case study.

States are (x_a, dx_a/dt, x_t, dx_t/dt, m_as): chassis position/velocity,
wheel position/velocity, and air mass in the spring.  Control input is the
valve orifice area, disturbance input is road displacement, output is
chassis displacement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .lti import Polynomial, RationalTF, StateSpaceModel, ss_to_tf

__all__ = [
    "PlantParams",
    "UncertaintySet",
    "PlantInstance",
    "CoefficientIntervals",
    "CoefficientCheck",
    "IntervalReport",
    "NOMINAL_PARAMS",
    "DEFAULT_HALF_RANGES",
    "REFERENCE_INTERVALS",
    "build_state_space",
    "derive_plant_tfs",
    "make_instance",
    "sample_plants",
    "coefficient_table",
    "check_reference_intervals",
]

# Order in which uncertain parameters vary in the sampling grid.
VARIED_PARAMS = ("m_a", "m_t", "c_a", "c_t", "k_t")

# Numerator coefficients that are structurally zero in the model but appear
# as tiny float residue in the reference tables.
NEAR_ZERO_COEFFS = frozenset({"a1", "a2", "c1", "c2"})


@dataclass(frozen=True)
class PlantParams:
    """Physical and linearization parameters of the quarter-car air suspension.

    m_a/m_t are chassis and wheel masses (kg), c_a/c_t suspension and tire
    damping (N s/m), k_t tire stiffness (N/m).  q1/q2, p1/p2 and s1/s2/s3
    are linearization constants of the pneumatic spring dynamics and carry
    mixed units; they have no published uncertainty and default to the case
    study's values.
    """

    m_a: float
    m_t: float
    c_a: float
    c_t: float
    k_t: float
    q1: float = -175.0
    q2: float = 6905.0
    p1: float = 1486.0
    p2: float = 58720.0
    s1: float = 60.162
    s2: float = 2380.0
    s3: float = 51.0

    def __post_init__(self):
        if self.m_a <= 0 or self.m_t <= 0 or self.k_t <= 0:
            raise ValueError("masses and tire stiffness must be positive")
        if self.c_a < 0 or self.c_t < 0:
            raise ValueError("damping coefficients must be non-negative")
        if self.s2 <= 0:
            raise ValueError("air-mass decay rate s2 must be positive")

    def replace(self, **kw) -> "PlantParams":
        vals = {k: getattr(self, k) for k in self.__dataclass_fields__}
        vals.update(kw)
        return PlantParams(**vals)


NOMINAL_PARAMS = PlantParams(m_a=90.0, m_t=16.0, c_a=50.0, c_t=600.0, k_t=1e5)

DEFAULT_HALF_RANGES: Mapping[str, float] = {
    "m_a": 10.0,
    "m_t": 5.0,
    "c_a": 10.0,
    "c_t": 100.0,
    "k_t": 10.0,
}


@dataclass(frozen=True)
class UncertaintySet:
    """Nominal parameters plus symmetric half-ranges for the varied five."""

    nominal: PlantParams = NOMINAL_PARAMS
    half_ranges: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_HALF_RANGES)
    )

    def __post_init__(self):
        unknown = set(self.half_ranges) - set(VARIED_PARAMS)
        if unknown:
            raise ValueError(f"unknown uncertain parameters: {sorted(unknown)}")
        for name, h in self.half_ranges.items():
            if h < 0:
                raise ValueError(f"half range for {name} must be >= 0")
        # both extremes must still be a valid parameter set
        self.nominal.replace(
            **{n: getattr(self.nominal, n) - self.half_ranges.get(n, 0.0)
               for n in VARIED_PARAMS}
        )

    def span(self, name: str, levels: int) -> np.ndarray:
        h = self.half_ranges.get(name, 0.0)
        nom = getattr(self.nominal, name)
        return np.linspace(nom - h, nom + h, levels)


def build_state_space(p: PlantParams) -> StateSpaceModel:
    """Five-state suspension model.

    Rows: chassis kinematics, chassis dynamics, wheel kinematics, wheel
    dynamics, air-mass dynamics.  Control input feeds only the air-mass
    state (through s3); the road feeds only the wheel (through k_t/m_t).
    """
    ca_ma = p.c_a / p.m_a
    A = np.array([
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [p.q1, -ca_ma, -p.q1, ca_ma, p.q2],
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [p.p1, p.c_a / p.m_t, -(p.p1 + p.k_t / p.m_t),
         -((p.c_t + p.c_a) / p.m_t), p.p2],
        [p.s1, 0.0, -p.s1, 0.0, -p.s2],
    ])
    B_u = np.array([0.0, 0.0, 0.0, 0.0, p.s3])
    B_d = np.array([0.0, 0.0, 0.0, p.k_t / p.m_t, 0.0])
    C_out = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    return StateSpaceModel(A, B_u, B_d, C_out, D_u=0.0, D_d=0.0)


def derive_plant_tfs(ss: StateSpaceModel) -> tuple[RationalTF, RationalTF]:
    """Control- and disturbance-channel transfer functions (Gu, Gd).

    Both share the identical monic denominator (the characteristic
    polynomial of A).
    """
    Gu = ss_to_tf(ss, "control")
    Gd = ss_to_tf(ss, "disturbance")
    return Gu, Gd


@dataclass(frozen=True)
class PlantInstance:
    params: PlantParams
    ss: StateSpaceModel
    Gu: RationalTF
    Gd: RationalTF
    is_nominal: bool


def make_instance(params: PlantParams, is_nominal: bool = False) -> PlantInstance:
    ss = build_state_space(params)
    Gu, Gd = derive_plant_tfs(ss)
    return PlantInstance(params=params, ss=ss, Gu=Gu, Gd=Gd, is_nominal=is_nominal)


def sample_plants(u: UncertaintySet, levels: int = 3) -> list[PlantInstance]:
    """Full factorial grid over the varied parameters.

    ``levels`` evenly spaced values per parameter; the nominal instance is
    always present and flagged (appended last when the grid misses it, as
    happens for even ``levels``).  Ordering is deterministic.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if levels == 1:
        return [make_instance(u.nominal, is_nominal=True)]
    spans = [u.span(name, levels) for name in VARIED_PARAMS]
    nominal_vals = tuple(getattr(u.nominal, name) for name in VARIED_PARAMS)
    instances = []
    saw_nominal = False
    for combo in itertools.product(*spans):
        is_nom = combo == nominal_vals
        saw_nominal = saw_nominal or is_nom
        params = u.nominal.replace(**dict(zip(VARIED_PARAMS, combo)))
        instances.append(make_instance(params, is_nominal=is_nom))
    if not saw_nominal:
        instances.append(make_instance(u.nominal, is_nominal=True))
    return instances


def nominal_index(plants: Sequence[PlantInstance]) -> int:
    for i, p in enumerate(plants):
        if p.is_nominal:
            return i
    raise ValueError("plant list has no nominal instance")


# --------------------------------------------------------------------------
# Coefficient cross-checks against the case study's published intervals
# --------------------------------------------------------------------------

COEFF_NAMES = tuple(f"{letter}{i}" for letter in "abc" for i in range(1, 6))


def coefficient_table(inst: PlantInstance) -> dict[str, float]:
    """a1..a5 (Gd numerator), b1..b5 (shared denominator), c1..c5 (Gu
    numerator), padded to full length so structural zeros appear as 0.0."""

    def padded(p: Polynomial, length: int) -> list[float]:
        c = list(p.coeffs)
        return [0.0] * (length - len(c)) + c

    den = padded(inst.Gd.den, 6)   # monic: [1, b1..b5]
    a = padded(inst.Gd.num, 5)
    c = padded(inst.Gu.num, 5)
    table = {}
    for i in range(1, 6):
        table[f"a{i}"] = a[i - 1]
        table[f"b{i}"] = den[i]
        table[f"c{i}"] = c[i - 1]
    return table


@dataclass(frozen=True)
class CoefficientIntervals:
    """Reference values per coefficient: (lo, hi), with lo == hi for the
    coefficients the case study reports as single numbers."""

    values: Mapping[str, tuple[float, float]]

    def __post_init__(self):
        for name, (lo, hi) in self.values.items():
            if name not in COEFF_NAMES:
                raise ValueError(f"unknown coefficient {name!r}")
            if lo > hi:
                raise ValueError(f"interval for {name} has lo > hi")


REFERENCE_INTERVALS = CoefficientIntervals({
    "a1": (-1.82e-12, 3.64e-12),
    "a2": (-2.47e-10, 3.49e-10),
    "a3": (2500.0, 4688.0),
    "a4": (7.04e6, 12.25e6),
    "a5": (6.76e6, 6.76e6),
    "b1": (2414.0, 2428.0),
    "b2": (8.92e4, 12.28e4),
    "b3": (21.98e6, 22.04e6),
    "b4": (7.08e6, 12.3e6),
    "b5": (6.76e6, 6.76e6),
    "c1": (-3.64e-12, 3.18e-12),
    "c2": (-1.89e-10, 4.08e-10),
    "c3": (3.52e5, 3.52e5),
    "c4": (1.31e7, 1.90e7),
    "c5": (3.25e9, 3.25e9),
})

# Tolerances for the cross-check
RANGE_SLACK = 0.05        # endpoint slack for range containment
FIXED_TOL = 0.015         # relative tolerance against single-valued refs
NEAR_ZERO_RATIO = 1e-6    # |coeff| / largest same-polynomial coefficient


@dataclass(frozen=True)
class CoefficientCheck:
    name: str
    kind: str                      # "interval" | "fixed" | "near_zero"
    computed_min: float
    computed_max: float
    nominal: float
    ref_lo: float
    ref_hi: float
    range_intersects: bool
    range_contained: bool
    nominal_inside: bool
    passed: bool
    flags: tuple[str, ...]


@dataclass(frozen=True)
class IntervalReport:
    checks: tuple[CoefficientCheck, ...]
    all_passed: bool

    def by_name(self, name: str) -> CoefficientCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _largest_same_poly(table: dict[str, float], name: str) -> float:
    letter = name[0]
    vals = [abs(table[f"{letter}{i}"]) for i in range(1, 6)]
    if letter == "b":
        vals.append(1.0)  # monic leading coefficient
    return max(vals)


def check_reference_intervals(
    plants: Sequence[PlantInstance],
    ref: CoefficientIntervals = REFERENCE_INTERVALS,
) -> IntervalReport:
    """Compare computed coefficient ranges against the reference table.

    Per coefficient: the min/max over the given plants, an intersection and
    a containment verdict (the latter with 5% endpoint slack), and a hard
    check that the nominal instance lies strictly inside true intervals or
    within 1.5% of single-valued references.  The structurally-zero
    coefficients pass when they are negligible next to the largest
    coefficient of their polynomial.  Where a reference is a single number
    but the computed value varies across the plant family, the discrepancy
    is flagged rather than hidden.
    """
    if not plants:
        raise ValueError("plant list is empty")
    tables = [coefficient_table(p) for p in plants]
    nom_table = tables[nominal_index(plants)]
    checks = []
    for name in COEFF_NAMES:
        if name not in ref.values:
            continue
        lo, hi = ref.values[name]
        vals = [t[name] for t in tables]
        mn, mx = min(vals), max(vals)
        nom = nom_table[name]
        flags: list[str] = []
        if name in NEAR_ZERO_COEFFS:
            kind = "near_zero"
            ratios = [abs(t[name]) / _largest_same_poly(t, name) for t in tables]
            ok = max(ratios) < NEAR_ZERO_RATIO
            nom_ok = abs(nom) / _largest_same_poly(nom_table, name) < NEAR_ZERO_RATIO
            intersects = ok  # negligible values are consistent with float residue
            contained = ok
            if ok:
                flags.append("reference_values_are_float_residue")
        elif lo == hi:
            kind = "fixed"
            band_lo, band_hi = lo - FIXED_TOL * abs(lo), hi + FIXED_TOL * abs(hi)
            intersects = mn <= band_hi and mx >= band_lo
            slack = RANGE_SLACK * abs(lo)
            contained = mn >= lo - slack and mx <= hi + slack
            nom_ok = abs(nom - lo) <= FIXED_TOL * abs(lo)
            if mx - mn > 0.01 * abs(lo):
                flags.append("computed_range_varies_but_reference_is_fixed")
        else:
            kind = "interval"
            intersects = mn <= hi and mx >= lo
            lo_s = lo - RANGE_SLACK * abs(lo)
            hi_s = hi + RANGE_SLACK * abs(hi)
            contained = mn >= lo_s and mx <= hi_s
            nom_ok = lo < nom < hi
            if not contained:
                flags.append("computed_range_exceeds_reference_interval")
        passed = bool(intersects and nom_ok)
        checks.append(CoefficientCheck(
            name=name, kind=kind, computed_min=mn, computed_max=mx,
            nominal=nom, ref_lo=lo, ref_hi=hi,
            range_intersects=bool(intersects), range_contained=bool(contained),
            nominal_inside=bool(nom_ok), passed=passed, flags=tuple(flags),
        ))
    return IntervalReport(checks=tuple(checks),
                          all_passed=all(c.passed for c in checks))
