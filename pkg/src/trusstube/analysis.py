"""Discrete-versus-continuum comparison, convergence sweeps and figure tables."""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .continuum import (ElasticaState, TubeGeometry, integrate_elastica, pendulum_period,
                        phase_diagram, phase_invariant, reconstruct_profile)
from .discrete import DiscreteTube, TubeSpec, extract_gamma_profile, solve_tube
from .errors import DegenerateFitError, DomainError, LockError, RangeError
from .uniform import normalized_curvature


SQRT2 = math.sqrt(2.0)
WORKERS_ENV = "TRUSSTUBE_WORKERS"
# r/W from 1/50 to 1/400 is the reference sweep; a factor 8 counts as "a decade"
MIN_R_SPAN = 7.5


@dataclass
class ConvergenceConfig:
    r_values: list[float]
    init: tuple[float, float] = (math.pi / 2.0, 0.0)
    T: float | None = None
    resample: int = 4001
    step: float = 1e-3

    def __post_init__(self):
        if len(self.r_values) < 1:
            raise DomainError("at least one r value is required")
        if any(r <= 0 for r in self.r_values):
            raise DomainError("r values must be positive")
        if any(b >= a for a, b in zip(self.r_values, self.r_values[1:])):
            raise DomainError("r values must be strictly decreasing")
        if self.T is not None and self.T <= 0:
            raise DomainError("T must be positive")
        if self.resample < 2:
            raise DomainError("resample needs at least two points")

    def span(self) -> float:
        """Normalized comparison range; one pendulum period unless set."""
        if self.T is not None:
            return self.T
        state = ElasticaState(*self.init)
        level = phase_invariant(state)
        if -1.0 < level < 1.0:
            return pendulum_period(state)
        raise DomainError(f"I={level:.6g} is not a closed orbit; set T explicitly")

    def admissible(self, W: float) -> list[tuple[int, float]]:
        """Snap each ``r`` to the nearest value giving an integer cell count."""
        out = []
        for r in self.r_values:
            N = max(6, round(W / (r * SQRT2)))
            out.append((N, W / (N * SQRT2)))
        if len({N for N, _ in out}) != len(out):
            raise DomainError("two r values snap to the same cell count")
        return out


@dataclass
class SweepPoint:
    r: float
    N: int
    e: float
    status: str = "ok"


@dataclass
class ConvergenceReport:
    W: float
    T: float
    points: list[SweepPoint]
    slope: float
    intercept: float
    residual: float

    @property
    def used(self) -> list[SweepPoint]:
        return [p for p in self.points if p.status == "ok"]


@dataclass
class Comparison:
    N: int
    r: float
    W: float
    T: float
    e: float
    s: np.ndarray
    ode: np.ndarray
    discrete: np.ndarray
    tube: DiscreteTube = field(repr=False)


def error_metric(gamma_ode: tuple[np.ndarray, np.ndarray],
                 gamma_discrete: tuple[np.ndarray, np.ndarray],
                 T: float, resample: int = 4001) -> float:
    """Root-integrated squared gap between two normalized ``gamma`` profiles.

    Each profile is ``(s, values)`` with ``s = xi2 / L``; both are linearly
    interpolated onto a common grid over ``[0, T]`` and integrated with the
    trapezoidal rule.  The result is ``sqrt(integral) / T``.
    """
    if T <= 0:
        raise DomainError("T must be positive")
    grid = np.linspace(0.0, T, resample)
    vals = []
    for name, (s, v) in (("ode", gamma_ode), ("discrete", gamma_discrete)):
        s = np.asarray(s, dtype=float)
        slack = 1e-12 * T
        if s[0] > slack or s[-1] < T - slack:
            raise RangeError(f"{name} profile covers [{s[0]:.6g}, {s[-1]:.6g}], not [0, {T:.6g}]")
        vals.append(np.interp(grid, s, np.asarray(v, dtype=float)))
    gap = (vals[0] - vals[1]) ** 2
    return math.sqrt(float(np.trapezoid(gap, grid))) / T


def discrete_seed(N: int, W: float, init: tuple[float, float]) -> TubeSpec:
    """Discrete seed matching continuum initial data ``(omega_hat0, omega_hat0')``."""
    r = W / (N * SQRT2)
    geom = TubeGeometry(W=W, r=r)
    gamma0 = geom.gamma_scale() * init[1]
    return TubeSpec(N=N, r=r, theta0=math.pi / 2.0 - gamma0, omega0=init[0])


def compare(N: int, W: float, init: tuple[float, float], T: float,
            resample: int = 4001, step: float = 1e-3) -> Comparison:
    """Solve both models from the same initial data and measure their gap."""
    spec = discrete_seed(N, W, init)
    geom = spec.geometry()
    L = geom.Lscale
    # one ring beyond T on each side keeps interpolation inside the data
    n_rings = math.ceil(T * L / spec.pitch) + 3
    tube = solve_tube(spec, n_rings)
    prof = extract_gamma_profile(tube)
    traj = integrate_elastica(ElasticaState(*init), T, step)
    try:
        e = error_metric((traj.s, traj.omega_prime), (prof.s, prof.gamma_hat), T, resample)
    except RangeError:
        if tube.lock is not None:
            raise tube.lock
        raise
    return Comparison(N=N, r=spec.r, W=W, T=T, e=e, s=traj.s, ode=traj.omega_prime,
                      discrete=np.interp(traj.s, prof.s, prof.gamma_hat), tube=tube)


def fit_loglog_slope(r, e) -> tuple[float, float, float]:
    """Least-squares line through ``(log r, log e)``: slope, intercept, RMS residual."""
    r, e = np.asarray(r, dtype=float), np.asarray(e, dtype=float)
    if len(r) < 2:
        raise DegenerateFitError("need at least two points")
    if np.any(e <= 0) or not np.all(np.isfinite(e)):
        raise DegenerateFitError("errors must be positive and finite for a log-log fit")
    x, y = np.log(r), np.log(e)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2)))


def _sweep_point(args) -> SweepPoint:
    N, r, W, init, T, resample, step = args
    try:
        c = compare(N, W, init, T, resample, step)
    except (LockError, RangeError) as err:
        return SweepPoint(r=r, N=N, e=math.nan, status=f"lock: {err}")
    return SweepPoint(r=r, N=N, e=c.e)


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"{WORKERS_ENV}={raw!r} is not an integer") from None


def convergence_sweep(cfg: ConvergenceConfig, W: float = 1.0,
                      workers: int | None = None) -> ConvergenceReport:
    """Error ``e`` per ``r`` at fixed ``W`` and the fitted log-log slope.

    Points that lock are kept in the report but left out of the fit.
    """
    pairs = cfg.admissible(W)
    if len(pairs) < 4:
        raise DomainError("a convergence sweep needs at least 4 r values")
    rs = [r for _, r in pairs]
    if max(rs) / min(rs) < MIN_R_SPAN:
        raise DomainError(f"r values must span a factor of at least {MIN_R_SPAN:g}")
    if cfg.init[1] == 0.0 and abs(math.sin(cfg.init[0])) < 1e-12:
        raise DegenerateFitError("the continuum reference is a cylindrical fixed point (gamma_ODE = 0)")
    T = cfg.span()
    jobs = [(N, r, W, cfg.init, T, cfg.resample, cfg.step) for N, r in pairs]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_sweep_point, jobs))
    else:
        points = [_sweep_point(j) for j in jobs]
    points.sort(key=lambda p: -p.r)
    for p in points:
        if p.status != "ok":
            warnings.warn(f"r={p.r:.6g} excluded from the fit ({p.status})", stacklevel=2)
    used = [p for p in points if p.status == "ok"]
    if len(used) < 4:
        raise DegenerateFitError(f"only {len(used)} points survived; at least 4 are needed")
    slope, intercept, resid = fit_loglog_slope([p.r for p in used], [p.e for p in used])
    return ConvergenceReport(W=W, T=T, points=points, slope=slope, intercept=intercept,
                             residual=resid)


def oscillation_wavelength(tube: DiscreteTube) -> float:
    """Axial wavelength (in ``xi2``) of the ring-radius oscillation.

    Uses linearly interpolated crossings of the mean radius; crossings two
    apart span one wavelength.
    """
    rad = tube.radii()
    x = rad - rad.mean()
    idx = np.nonzero(np.signbit(x[:-1]) != np.signbit(x[1:]))[0]
    if len(idx) < 3:
        raise DomainError("tube too short to contain a full oscillation")
    crossings = idx - x[idx] / (x[idx + 1] - x[idx])
    return float(np.mean(crossings[2:] - crossings[:-2])) * tube.spec.pitch


def _orbit_start(level: float) -> tuple[float, float]:
    if level < 1.0:
        return math.acos(-level), 0.0
    return math.pi, math.sqrt(2.0 * (level - 1.0))


def figure_data(figure: str, **params) -> dict[str, np.ndarray]:
    """Column tables reproducing the uniform-curvature, phase, profile and convergence plots."""
    if figure == "curvature-vs-phi":
        thetas = params.get("thetas_deg", np.arange(0.0, 90.0 + 1e-9, 5.0))
        phis = params.get("phis_deg", np.arange(-90.0, 180.0 + 1e-9, 0.5))
        rows = [(th, ph, normalized_curvature(math.radians(th), math.radians(ph)))
                for th in thetas for ph in phis]
        a = np.array(rows)
        return {"theta_deg": a[:, 0], "phi_deg": a[:, 1], "r_over_rho": a[:, 2]}

    if figure == "phase-diagram":
        levels = params.get("levels", (-0.75, 0.0, 0.75, 1.0, 1.5))
        contours = phase_diagram(levels, params.get("resolution", 256))
        cols: dict[str, list] = {"level": [], "branch": [], "omega_hat": [], "omega_hat_prime": []}
        for level, branches in contours.items():
            for b, poly in enumerate(branches):
                cols["level"] += [level] * len(poly)
                cols["branch"] += [b] * len(poly)
                cols["omega_hat"] += list(poly[:, 0])
                cols["omega_hat_prime"] += list(poly[:, 1])
        return {k: np.asarray(v) for k, v in cols.items()}

    if figure == "tube-profiles":
        levels = params.get("levels", (-1.0, -0.5, 0.0, 0.5, 0.9, 0.999, 1.0, 1.5))
        W = params.get("W", 1.0)
        r = params.get("r", W / 200.0)
        span = params.get("span", 30.0)
        step = params.get("step", 1e-2)
        geom = TubeGeometry(W=W, r=r)
        cols = {"level": [], "xi2": [], "rho": [], "z": [], "gamma": []}
        for level in levels:
            traj = integrate_elastica(ElasticaState(*_orbit_start(level)), span, step)
            prof = reconstruct_profile(traj, geom)
            cols["level"] += [level] * len(prof.xi2)
            cols["xi2"] += list(prof.xi2)
            cols["rho"] += list(prof.rho)
            cols["z"] += list(prof.z)
            cols["gamma"] += list(prof.gamma)
        return {k: np.asarray(v) for k, v in cols.items()}

    if figure == "convergence":
        W = params.get("W", 1.0)
        ratios = params.get("r_over_W", (1 / 50, 1 / 100, 1 / 200, 1 / 400))
        cfg = ConvergenceConfig(r_values=[W * x for x in ratios],
                                init=params.get("init", (math.pi / 2.0, 0.0)))
        rep = convergence_sweep(cfg, W, params.get("workers"))
        return {"r_over_W": np.array([p.r / W for p in rep.points]),
                "N": np.array([p.N for p in rep.points]),
                "e": np.array([p.e for p in rep.points])}

    raise DomainError(f"unknown figure {figure!r}")
