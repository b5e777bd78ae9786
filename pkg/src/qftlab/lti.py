"""Core LTI math: polynomials, rational transfer functions, state space,
frequency response, stability tests, and fixed-step time simulation.

Everything here is a pure function over immutable values; no shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Polynomial",
    "RationalTF",
    "StateSpaceModel",
    "NicholsPoint",
    "SingularityError",
    "poly_multiply",
    "poly_add",
    "poly_scale",
    "poly_roots",
    "is_hurwitz",
    "ss_to_tf",
    "tf_to_ss",
    "freq_eval",
    "to_nichols",
    "closed_loop_tracking",
    "closed_loop_disturbance",
    "simulate_rk4",
    "tf_mul",
    "tf_allclose",
]

# Real parts above this are treated as unstable (numerical guard on the
# strict left-half-plane test).
STABILITY_MARGIN = -1e-9


class SingularityError(ValueError):
    """Raised when a transfer function is evaluated at (or next to) a pole."""


@dataclass(frozen=True)
class Polynomial:
    """Real-coefficient polynomial, coefficients in descending degree order.

    The zero polynomial is stored as ``(0.0,)``.  Leading exact zeros are
    trimmed on construction; near-zero coefficients are kept as-is since
    their size is meaningful to callers.
    """

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        c = [float(x) for x in coeffs]
        if not c:
            c = [0.0]
        while len(c) > 1 and c[0] == 0.0:
            c.pop(0)
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, s: complex) -> complex:
        out = 0.0 + 0.0j
        for c in self.coeffs:
            out = out * s + c
        return out

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return poly_multiply(self, other)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return poly_add(self, other)

    def monic(self) -> "Polynomial":
        lead = self.coeffs[0]
        if lead == 0.0:
            raise ValueError("zero polynomial has no monic form")
        return Polynomial(c / lead for c in self.coeffs)


ONE = Polynomial([1.0])


def poly_multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    """Product of two polynomials (coefficient convolution)."""
    if p.is_zero or q.is_zero:
        return Polynomial([0.0])
    return Polynomial(np.convolve(p.coeffs, q.coeffs))


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    n = max(len(p.coeffs), len(q.coeffs))
    a = np.zeros(n)
    a[n - len(p.coeffs):] = p.coeffs
    b = np.zeros(n)
    b[n - len(q.coeffs):] = q.coeffs
    return Polynomial(a + b)


def poly_scale(p: Polynomial, k: float) -> Polynomial:
    return Polynomial(k * c for c in p.coeffs)


def poly_roots(p: Polynomial) -> np.ndarray:
    """All complex roots (with multiplicity) via the companion-matrix solve.

    Residuals satisfy |p(r)| <= 1e-6 * max|coeff| * max(1, |r|)^degree for
    the polynomial classes this package produces.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has no roots")
    if p.degree < 1:
        raise ValueError("constant polynomial has no roots")
    return np.roots(p.coeffs)


def is_hurwitz(p: Polynomial) -> bool:
    """True iff every root lies strictly in the open left half-plane."""
    roots = poly_roots(p)
    return bool(np.max(roots.real) < STABILITY_MARGIN)


@dataclass(frozen=True)
class RationalTF:
    """Ratio of two real polynomials in the Laplace variable.

    Not required to be coprime; equality is tested by cross-multiplied
    coefficient comparison (see :func:`tf_allclose`).
    """

    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("transfer function denominator is the zero polynomial")

    @property
    def is_proper(self) -> bool:
        return self.num.is_zero or self.num.degree <= self.den.degree

    @property
    def relative_degree(self) -> int:
        return self.den.degree - (0 if self.num.is_zero else self.num.degree)

    def __mul__(self, other: "RationalTF") -> "RationalTF":
        return tf_mul(self, other)


def tf(num: Sequence[float], den: Sequence[float]) -> RationalTF:
    """Shorthand constructor from descending coefficient sequences."""
    return RationalTF(Polynomial(num), Polynomial(den))


def tf_mul(a: RationalTF, b: RationalTF) -> RationalTF:
    return RationalTF(poly_multiply(a.num, b.num), poly_multiply(a.den, b.den))


def tf_allclose(a: RationalTF, b: RationalTF, rtol: float = 1e-9) -> bool:
    """Equality by cross multiplication, den leading coefficients normalized to 1."""
    an = RationalTF(poly_scale(a.num, 1.0 / a.den.coeffs[0]), a.den.monic())
    bn = RationalTF(poly_scale(b.num, 1.0 / b.den.coeffs[0]), b.den.monic())
    lhs = poly_multiply(an.num, bn.den)
    rhs = poly_multiply(bn.num, an.den)
    n = max(len(lhs.coeffs), len(rhs.coeffs))
    la = np.zeros(n)
    la[n - len(lhs.coeffs):] = lhs.coeffs
    rb = np.zeros(n)
    rb[n - len(rhs.coeffs):] = rhs.coeffs
    scale = max(np.max(np.abs(la)), np.max(np.abs(rb)), 1e-300)
    return bool(np.max(np.abs(la - rb)) <= rtol * scale)


class StateSpaceModel:
    """LTI state-space model with one control and one disturbance input.

        dx/dt = A x + B_u u + B_d d
        y     = C x + D_u u + D_d d

    Matrices are stored as read-only numpy arrays.
    """

    def __init__(self, A, B_u, B_d, C_out, D_u: float = 0.0, D_d: float = 0.0):
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        B_u = np.array(B_u, dtype=float).reshape(n)
        B_d = np.array(B_d, dtype=float).reshape(n)
        C_out = np.array(C_out, dtype=float).reshape(n)
        for m in (A, B_u, B_d, C_out):
            m.setflags(write=False)
        self.A = A
        self.B_u = B_u
        self.B_d = B_d
        self.C_out = C_out
        self.D_u = float(D_u)
        self.D_d = float(D_d)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def input_channel(self, channel: str) -> tuple[np.ndarray, float]:
        if channel == "control":
            return self.B_u, self.D_u
        if channel == "disturbance":
            return self.B_d, self.D_d
        raise ValueError(f"unknown channel {channel!r}")


@dataclass(frozen=True)
class NicholsPoint:
    """Open-loop phase (degrees, in (-360, 0]) and magnitude (dB)."""

    phase_deg: float
    mag_db: float


def to_nichols(z: complex) -> NicholsPoint:
    """Map a complex response onto the Nichols plane.

    Positive principal phases shift down by 360 deg so the result lands in
    (-360, 0]; a phase of exactly 0 stays at 0.
    """
    if z == 0:
        raise ValueError("cannot map zero response onto the Nichols plane")
    mag_db = 20.0 * math.log10(abs(z))
    phase = math.degrees(math.atan2(z.imag, z.real))
    if phase > 0.0:
        phase -= 360.0
    if phase <= -360.0:  # tiny positive phases collapse to -360 in float
        phase += 360.0
    return NicholsPoint(phase_deg=phase, mag_db=mag_db)


def _char_poly(A: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial (descending), from the eigenvalues.

    Expanding monic linear factors of the backward-stable eigenvalue solve
    keeps every coefficient accurate; the trace-based recursion loses
    several digits to cancellation on stiff models.
    """
    if A.shape[0] == 0:
        return np.array([1.0])
    coeffs = np.poly(np.linalg.eigvals(A))
    if np.iscomplexobj(coeffs):
        coeffs = coeffs.real
    return coeffs


def _adjugate_matrices(A: np.ndarray, den: np.ndarray) -> list[np.ndarray]:
    """Matrices M_0..M_{n-1} of adj(sI - A) = sum_k M_k s^(n-1-k), from the
    Faddeev-LeVerrier update M_k = A M_{k-1} + den[k] I."""
    n = A.shape[0]
    if n == 0:
        return []
    Mk = np.eye(n)
    mats = [Mk]
    for k in range(1, n):
        Mk = A @ Mk + den[k] * np.eye(n)
        mats.append(Mk)
    return mats


def ss_to_tf(ss: StateSpaceModel, channel: str = "control") -> RationalTF:
    """Single-channel transfer function via the adjugate expansion.

    The denominator is the monic characteristic polynomial of A; the
    numerator comes from C adj(sI-A) B + D det(sI-A).  Zero patterns in
    C and B propagate exactly through the recursion, so structural zeros
    stay exact.
    """
    B, D = ss.input_channel(channel)
    den = _char_poly(ss.A)
    num = D * den.copy()
    for k, Mk in enumerate(_adjugate_matrices(ss.A, den)):
        num[k + 1] += ss.C_out @ Mk @ B
    return RationalTF(Polynomial(num), Polynomial(den))


def tf_to_ss(t: RationalTF) -> StateSpaceModel:
    """Controllable canonical realization of a proper transfer function."""
    if not t.is_proper:
        raise ValueError(
            f"improper transfer function (num degree {t.num.degree} > "
            f"den degree {t.den.degree})"
        )
    a = np.array(t.den.monic().coeffs)
    b = np.array(t.num.coeffs) / t.den.coeffs[0]
    n = len(a) - 1
    b_full = np.zeros(n + 1)
    b_full[n + 1 - len(b):] = b
    A = np.zeros((n, n))
    if n > 1:
        A[:-1, 1:] = np.eye(n - 1)
    if n > 0:
        A[-1, :] = -a[1:][::-1]
    B = np.zeros(n)
    if n > 0:
        B[-1] = 1.0
    D = b_full[0]
    C = b_full[1:][::-1] - D * a[1:][::-1]
    return StateSpaceModel(A, B, np.zeros(n), C, D_u=D, D_d=0.0)


def freq_eval(t: RationalTF, omega: float) -> complex:
    """Evaluate the transfer function at s = j*omega.

    Raises :class:`SingularityError` when j*omega sits on (or numerically
    indistinguishable from) a denominator root.
    """
    if omega < 0:
        raise ValueError("omega must be >= 0")
    s = 1j * omega
    den_val = t.den(s)
    # |den(s)| tiny against the sum of its term magnitudes means s sits on
    # (or within rounding of) a root: the terms cancel almost completely
    deg = t.den.degree
    scale = sum(abs(c) * abs(s) ** (deg - k) for k, c in enumerate(t.den.coeffs))
    if abs(den_val) <= 1e-12 * max(scale, 1e-300):
        raise SingularityError(f"evaluation at omega={omega} hits a pole")
    return t.num(s) / den_val


def closed_loop_tracking(P: RationalTF, G: RationalTF) -> RationalTF:
    """Unity-feedback closed loop P*G / (1 + P*G)."""
    num = poly_multiply(P.num, G.num)
    den = poly_add(poly_multiply(P.den, G.den), num)
    if den.is_zero:
        raise ValueError("1 + P*G is identically zero")
    return RationalTF(num, den)


def closed_loop_disturbance(Gd: RationalTF, Gu: RationalTF, G: RationalTF) -> RationalTF:
    """Road-to-output closed loop Gd / (1 + Gu*G).

    When Gd and Gu share a denominator (the usual case for two channels of
    one plant) the common factor is cancelled up front.
    """
    loop_den = poly_add(poly_multiply(Gu.den, G.den), poly_multiply(Gu.num, G.num))
    if Gd.den.coeffs == Gu.den.coeffs:
        num = poly_multiply(Gd.num, G.den)
        den = loop_den
    else:
        num = poly_multiply(Gd.num, poly_multiply(Gu.den, G.den))
        den = poly_multiply(Gd.den, loop_den)
    if den.is_zero:
        raise ValueError("1 + Gu*G is identically zero")
    return RationalTF(num, den)


def simulate_rk4(
    ss: StateSpaceModel,
    u: np.ndarray,
    d: np.ndarray,
    dt: float,
    T: float,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Classical RK4 simulation with zero-order-hold inputs.

    ``u`` and ``d`` must be sampled every ``dt`` over [0, T] (length
    round(T/dt)+1); sample k is held constant across step k.  Returns the
    state trajectory, shape (steps+1, n).

    For an LTI system with held inputs the four RK4 stages collapse to a
    constant per-step propagator pair (Phi, Gamma), which is precomputed:

        Phi   = I + h A + h^2/2 A^2 + h^3/6 A^3 + h^4/24 A^4
        Gamma = h (I + h/2 A + h^2/6 A^2 + h^3/24 A^3)
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps = int(round(T / dt))
    if abs(steps * dt - T) > 1e-9 * max(T, dt):
        raise ValueError(f"T={T} is not an integer multiple of dt={dt}")
    u = np.asarray(u, dtype=float)
    d = np.asarray(d, dtype=float)
    if u.shape != (steps + 1,) or d.shape != (steps + 1,):
        raise ValueError(
            f"input signals must have length {steps + 1}, got {u.shape} and {d.shape}"
        )
    n = ss.n
    A = ss.A
    h = dt
    A2 = A @ A
    A3 = A2 @ A
    eye = np.eye(n)
    phi = eye + h * A + (h**2 / 2) * A2 + (h**3 / 6) * A3 + (h**4 / 24) * (A3 @ A)
    gamma = h * (eye + (h / 2) * A + (h**2 / 6) * A2 + (h**3 / 24) * A3)
    # forcing vectors per step: b_k = B_u u_k + B_d d_k, mapped through gamma
    forcing = (gamma @ np.outer(ss.B_u, u) + gamma @ np.outer(ss.B_d, d)).T
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float).reshape(n)
    out = np.empty((steps + 1, n))
    out[0] = x
    for k in range(steps):
        x = phi @ x + forcing[k]
        out[k + 1] = x
    return out
