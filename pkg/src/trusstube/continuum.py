"""Continuum midsurface model and its tubular reduction.

The tessellation constrains the midsurface metric through its second form,
``g = I + r (b22 - b11) / (2 sqrt 2) diag(-1, 1)``.  For surfaces of
revolution the meridian tilt ``omega`` obeys, at leading order, the
pendulum equation ``omega_hat'' + sin(omega_hat) = 0`` in the rescaled axial
coordinate ``xi2 / L`` with ``L = sqrt(r / (4 q sqrt 2))`` and ``q = 2 pi / W``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ConsistencyError, DomainError, EmptyContour, StepSizeError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SurfaceForms:
    g11: float
    g12: float
    g22: float
    b11: float
    b12: float
    b22: float


@dataclass(frozen=True)
class TubeGeometry:
    W: float
    r: float

    def __post_init__(self):
        if self.W <= 0 or self.r <= 0:
            raise DomainError("tube width and bar length must be positive")

    @property
    def q(self) -> float:
        return 2.0 * math.pi / self.W

    @property
    def Lscale(self) -> float:
        return math.sqrt(self.r / (4.0 * self.q * SQRT2))

    def gamma_scale(self) -> float:
        """Factor turning ``omega_hat'`` into ``gamma``: ``r / (2 L sqrt 2)``."""
        return self.r / (2.0 * self.Lscale * SQRT2)


@dataclass(frozen=True)
class ElasticaState:
    omega_hat: float
    omega_hat_prime: float


@dataclass
class Trajectory:
    """Samples of the pendulum solution on a uniform grid in ``s = xi2 / L``."""
    s: np.ndarray
    omega: np.ndarray
    omega_prime: np.ndarray

    @property
    def step(self) -> float:
        return float(self.s[1] - self.s[0])

    def invariant(self) -> np.ndarray:
        return 0.5 * self.omega_prime ** 2 - np.cos(self.omega)


@dataclass
class TubeProfile:
    xi2: np.ndarray
    omega: np.ndarray
    rho: np.ndarray
    z: np.ndarray
    gamma: np.ndarray
    b11: np.ndarray
    b22: np.ndarray


def metric_from_second_form(b: tuple[float, float, float], r: float) -> tuple[float, float, float]:
    """Metric ``(g11, g12, g22)`` carried by second form ``(b11, b12, b22)``."""
    if r <= 0:
        raise DomainError("r must be positive")
    b11, _b12, b22 = b
    gamma = r * (b22 - b11) / (2.0 * SQRT2)
    return 1.0 - gamma, 0.0, 1.0 + gamma


def surface_forms(b: tuple[float, float, float], r: float) -> SurfaceForms:
    g11, g12, g22 = metric_from_second_form(b, r)
    return SurfaceForms(g11, g12, g22, *b)


def elastica_rhs(state: ElasticaState) -> tuple[float, float]:
    return state.omega_hat_prime, -math.sin(state.omega_hat)


def phase_invariant(state: ElasticaState) -> float:
    return 0.5 * state.omega_hat_prime ** 2 - math.cos(state.omega_hat)


def integrate_elastica(initial: ElasticaState, span: float, step: float = 1e-3) -> Trajectory:
    """Classical RK4 on the pendulum equation with a fixed step.

    The step is shrunk just enough to land exactly on ``span``.
    """
    if span <= 0 or step <= 0:
        raise DomainError("span and step must be positive")
    if step > span:
        raise StepSizeError(f"step {step} exceeds span {span}")
    n = math.ceil(span / step - 1e-9)
    h = span / n
    w = np.empty(n + 1)
    p = np.empty(n + 1)
    a, b = float(initial.omega_hat), float(initial.omega_hat_prime)
    w[0], p[0] = a, b
    sin = math.sin
    half = 0.5 * h
    for i in range(1, n + 1):
        k1a, k1b = b, -sin(a)
        k2a, k2b = b + half * k1b, -sin(a + half * k1a)
        k3a, k3b = b + half * k2b, -sin(a + half * k2a)
        k4a, k4b = b + h * k3b, -sin(a + h * k3a)
        a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        w[i], p[i] = a, b
    return Trajectory(s=np.linspace(0.0, span, n + 1), omega=w, omega_prime=p)


def trajectory_period(traj: Trajectory) -> float:
    """Mean period from the zero crossings of ``omega_hat'``.

    Consecutive crossings are half a period apart for librations; the
    estimate averages over all crossing pairs two apart.
    """
    p = traj.omega_prime
    idx = np.nonzero(np.signbit(p[:-1]) != np.signbit(p[1:]))[0]
    roots = traj.s[idx] - p[idx] * (traj.s[idx + 1] - traj.s[idx]) / (p[idx + 1] - p[idx])
    if len(roots) < 3:
        raise DomainError("trajectory too short to contain a full period")
    return float(np.mean(roots[2:] - roots[:-2]))


def _check_initial_slope(omega_prime0: float, geom: TubeGeometry) -> None:
    bound = 0.5 * math.sqrt(geom.W / geom.r)
    if abs(omega_prime0) > bound:
        raise ConsistencyError(
            f"|omega_hat'_0|={abs(omega_prime0):.3g} is not O(1) relative to sqrt(W/r) (bound {bound:.3g})")
    if abs(omega_prime0) > 3.0:
        warnings.warn(f"|omega_hat'_0|={abs(omega_prime0):.3g} > 3: asymptotics may be poor",
                      stacklevel=3)


def reconstruct_profile(traj: Trajectory, geom: TubeGeometry,
                        rho0_mode: Literal["from-omega-prime", "explicit"] = "from-omega-prime",
                        z0: float = 0.0, rho0: float | None = None) -> TubeProfile:
    """Meridian ``(rho, z)`` by trapezoidal quadrature of ``(sin, cos)(omega_hat)``.

    In ``from-omega-prime`` mode the starting radius follows from the hoop
    metric ``q rho = sqrt(1 - gamma) ~ 1 - gamma/2``.
    """
    _check_initial_slope(float(traj.omega_prime[0]), geom)
    L = geom.Lscale
    gamma = geom.gamma_scale() * traj.omega_prime
    if rho0_mode == "from-omega-prime":
        start = (1.0 - 0.5 * gamma[0]) / geom.q
    elif rho0_mode == "explicit":
        if rho0 is None:
            raise DomainError("explicit mode needs rho0")
        start = float(rho0)
    else:
        raise DomainError(f"unknown rho0_mode {rho0_mode!r}")
    rho = start + L * cumulative_trapezoid(np.sin(traj.omega), traj.s, initial=0.0)
    z = z0 + L * cumulative_trapezoid(np.cos(traj.omega), traj.s, initial=0.0)
    profile = TubeProfile(xi2=L * traj.s, omega=traj.omega.copy(), rho=rho, z=z, gamma=gamma,
                          b11=np.empty(0), b22=np.empty(0))
    profile.b11, profile.b22 = curvature_fields(profile, geom, traj.omega_prime)
    return profile


def curvature_fields(profile: TubeProfile, geom: TubeGeometry,
                     omega_prime: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Axial and hoop normal curvatures ``b22 = omega_hat'/L``, ``b11 = -q cos(omega_hat)``."""
    if omega_prime is None:
        omega_prime = profile.gamma / geom.gamma_scale()
    return -geom.q * np.cos(profile.omega), np.asarray(omega_prime) / geom.Lscale


def phase_diagram(levels, resolution: int = 256) -> dict[float, list[np.ndarray]]:
    """Iso-contours of ``I`` as polylines in ``(omega_hat, omega_hat')``.

    Closed orbits come back as one closed loop, the separatrix as a loop
    through ``(+-pi, 0)``, rotating orbits as separate upper and lower
    branches over one period in ``omega_hat``.
    """
    if resolution < 16:
        raise DomainError("resolution must be at least 16")
    out: dict[float, list[np.ndarray]] = {}
    for level in levels:
        level = float(level)
        if level < -1.0:
            raise EmptyContour(f"I={level} < -1 has no real orbit")
        if level == -1.0:
            out[level] = [np.array([[0.0, 0.0]])]
            continue
        if level < 1.0:
            wmax = math.acos(-level)
        else:
            wmax = math.pi
        # cosine spacing clusters samples at the turning points
        w = -wmax * np.cos(np.linspace(0.0, math.pi, resolution))
        p = np.sqrt(np.clip(2.0 * (level + np.cos(w)), 0.0, None))
        if level < 1.0:
            p[0] = p[-1] = 0.0  # turning points, free of acos round-off
        upper = np.column_stack([w, p])
        lower = np.column_stack([w[::-1], -p[::-1]])
        if level <= 1.0:
            out[level] = [np.vstack([upper, lower[1:]])]
        else:
            out[level] = [upper, lower]
    return out


def cylindrical_gamma_correction(geom: TubeGeometry,
                                 orientation: Literal["outward", "inward"] = "outward") -> float:
    """Next-order extension ``+-(pi/sqrt2) r/W`` that keeps a tube exactly cylindrical."""
    ratio = geom.r / geom.W
    if ratio >= 0.1:
        raise DomainError(f"r/W={ratio:.3g} too coarse for the correction (< 0.1)")
    sign = {"outward": 1.0, "inward": -1.0}.get(orientation)
    if sign is None:
        raise DomainError(f"orientation must be 'outward' or 'inward', got {orientation!r}")
    return sign * math.pi / SQRT2 * ratio


def pendulum_period(state: ElasticaState) -> float:
    """Period in ``s`` of a libration, ``4 K(k)`` with ``k = sin(omega_max / 2)``."""
    from scipy.special import ellipk

    level = phase_invariant(state)
    if not -1.0 < level < 1.0:
        raise DomainError(f"I={level} is not a closed orbit")
    k = math.sqrt((1.0 + level) / 2.0)  # sin(omega_max/2)
    return 4.0 * float(ellipk(k * k))
