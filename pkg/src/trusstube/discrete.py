"""Exact kinematics of axisymmetric tubes, built one zigzag at a time.

Node rings ``V_0, V_1, ...`` each hold ``N`` base vertices spaced ``2 pi / N``
around the z-axis, consecutive rings staggered by ``pi / N``.  Cell row ``m``
has its ``A`` vertex on ``V_{m-1}``, its ``B, D`` diagonal on ``V_m`` and its
``C`` vertex on ``V_{m+1}``.  Knowing ``V_{m-1}`` and ``V_m`` fixes the fold
angle of row ``m`` through ``|DB|``; the apex then follows from three spheres
around ``A, B, D`` and the new vertex ``C`` from three spheres around
``O, B, D``.  Only one representative cell per row is solved; the rest of
the row is its rotated copies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._vec import rotation_z
from .cell import THETA_MARGIN, THETA_MAX, build_cell, solve_closure, theta_from_diagonal
from .continuum import TubeGeometry, cylindrical_gamma_correction
from .errors import BranchAmbiguityError, DomainError, GeometryError, LockError
from .uniform import Mesh

SQRT2 = math.sqrt(2.0)
BAR_TOL = 1e-9


@dataclass(frozen=True)
class TubeSpec:
    N: int
    r: float
    theta0: float
    omega0: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 6:
            raise DomainError(f"N must be an integer >= 6, got {self.N!r}")
        if self.r <= 0:
            raise DomainError("r must be positive")
        if not THETA_MARGIN < self.theta0 < THETA_MAX - THETA_MARGIN:
            raise DomainError(f"theta0={math.degrees(self.theta0):.6g} deg outside (0, 120) deg")

    @property
    def W(self) -> float:
        """Flat-state circumference: ``N`` cell diagonals of length ``r sqrt 2``."""
        return self.N * self.r * SQRT2

    @property
    def pitch(self) -> float:
        """Flat-state axial spacing of consecutive node rings (half of ``AC``)."""
        return self.r / SQRT2

    def geometry(self) -> TubeGeometry:
        return TubeGeometry(W=self.W, r=self.r)


@dataclass
class DiscreteTube:
    spec: TubeSpec
    rings: list[np.ndarray]
    apex_rings: list[np.ndarray]
    # (kB, kD): indices on V_m of the B and D vertices of cell 0 of row m
    cell_index: list[tuple[int, int]]
    lock: LockError | None = None

    @property
    def n_rings(self) -> int:
        return len(self.rings)

    def radii(self) -> np.ndarray:
        return np.array([math.hypot(v[0, 0], v[0, 1]) for v in self.rings])

    def heights(self) -> np.ndarray:
        return np.array([v[0, 2] for v in self.rings])

    def thetas(self) -> np.ndarray:
        """Fold angle of each node ring, read from the hoop chord ``|DB|``."""
        r = self.spec.r
        return np.array([theta_from_diagonal(float(np.linalg.norm(v[1] - v[0])), r)
                         for v in self.rings])

    def gammas(self) -> np.ndarray:
        return math.pi / 2.0 - self.thetas()

    def cell(self, row: int, k: int = 0) -> dict[str, np.ndarray]:
        """Vertices of cell ``k`` of row ``row`` (rows start at 1)."""
        N = self.spec.N
        kB, kD = self.cell_index[row - 1]
        return {"O": self.apex_rings[row - 1][k], "A": self.rings[row - 1][k],
                "B": self.rings[row][(kB + k) % N], "C": self.rings[row + 1][k],
                "D": self.rings[row][(kD + k) % N]}

    def to_mesh(self) -> Mesh:
        N = self.spec.N
        n_base = len(self.rings) * N
        nodes = np.vstack(self.rings + self.apex_rings)
        bars: set[tuple[int, int]] = set()
        facets = []
        for m in range(1, len(self.apex_rings) + 1):
            kB, kD = self.cell_index[m - 1]
            for k in range(N):
                ids = {"O": n_base + (m - 1) * N + k, "A": (m - 1) * N + k,
                       "B": m * N + (kB + k) % N, "C": (m + 1) * N + k,
                       "D": m * N + (kD + k) % N}
                for p, q in (("O", "A"), ("O", "B"), ("O", "C"), ("O", "D"),
                             ("A", "B"), ("A", "D"), ("C", "B"), ("C", "D")):
                    a, b = ids[p], ids[q]
                    bars.add((min(a, b), max(a, b)))
                o = ids["O"]
                facets += [(o, ids["A"], ids["B"]), (o, ids["B"], ids["C"]),
                           (o, ids["C"], ids["D"]), (o, ids["D"], ids["A"])]
        return Mesh(nodes=nodes, bars=np.array(sorted(bars), dtype=int).reshape(-1, 2),
                    facets=np.array(facets, dtype=int).reshape(-1, 3),
                    base_nodes=np.arange(n_base),
                    apex_nodes=np.arange(n_base, len(nodes)))

    def audit(self) -> float:
        """Largest bar-length error over the assembled truss."""
        lengths = self.to_mesh().bar_lengths()
        return float(np.max(np.abs(lengths - self.spec.r))) if len(lengths) else 0.0


@dataclass
class GammaProfile:
    index: np.ndarray
    xi2: np.ndarray
    gamma: np.ndarray
    s: np.ndarray = field(default_factory=lambda: np.empty(0))
    gamma_hat: np.ndarray = field(default_factory=lambda: np.empty(0))


def trilaterate(p1, p2, p3, r1: float, r2: float, r3: float, tol: float = 1e-12):
    """Both intersection points of three spheres, or ``None`` if they miss.

    ``tol`` absorbs round-off in the squared height when the spheres are
    tangent.
    """
    p1, p2, p3 = (np.asarray(p, dtype=float) for p in (p1, p2, p3))
    ex = p2 - p1
    d = np.linalg.norm(ex)
    if d == 0.0:
        return None
    ex = ex / d
    i = ex @ (p3 - p1)
    ey = p3 - p1 - i * ex
    j = np.linalg.norm(ey)
    if j == 0.0:
        return None
    ey = ey / j
    ez = np.cross(ex, ey)
    x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
    y = (r1 * r1 - r3 * r3 + i * i + j * j) / (2.0 * j) - i * x / j
    h2 = r1 * r1 - x * x - y * y
    if h2 < -tol * r1 * r1:
        return None
    h = math.sqrt(max(h2, 0.0))
    base = p1 + x * ex + y * ey
    return base + h * ez, base - h * ez


def _ring(point: np.ndarray, N: int) -> np.ndarray:
    return np.array([rotation_z(2.0 * math.pi * k / N) @ point for k in range(N)])


def _local(u: np.ndarray, azimuth: float) -> np.ndarray:
    """Components of ``u`` along (radial, hoop, axial) at ``azimuth``."""
    c, s = math.cos(azimuth), math.sin(azimuth)
    return np.array([c * u[0] + s * u[1], -s * u[0] + c * u[1], u[2]])


def _azimuth(p: np.ndarray) -> float:
    return math.atan2(p[1], p[0])


def seed_ring(spec: TubeSpec) -> DiscreteTube:
    """Place one pyramid of fold angle ``theta0`` and copy it around the axis.

    The cell diagonal ``DB`` is the hoop chord subtending ``2 pi / N``; its
    ``AC`` direction is tilted by ``omega0`` from the axis in the meridian
    plane, so ``omega0 = 0`` points the apexes outward and ``omega0 = pi``
    inward.
    """
    N, r = spec.N, spec.r
    a = solve_closure(spec.theta0)
    cell = build_cell(r, a)
    half = math.pi / N
    rho_diag = r * a.s / math.sin(half)
    e1 = np.array([0.0, 1.0, 0.0])
    e2 = np.array([math.sin(spec.omega0), 0.0, math.cos(spec.omega0)])
    n = np.array([math.cos(spec.omega0), 0.0, -math.sin(spec.omega0)])
    mid = np.array([rho_diag * math.cos(half), 0.0, 0.0])
    apex = mid + r * a.c * n
    frame = np.column_stack([e1, e2, n])

    def place(p):
        return apex + frame @ p

    A, B, C, D = place(cell.A), place(cell.B), place(cell.C), place(cell.D)
    for name, p in (("A", A), ("C", C), ("O", apex)):
        if p[0] <= 0.0:
            raise GeometryError(
                f"seed vertex {name} crosses the axis at N={N}, theta0={math.degrees(spec.theta0):.4g} deg")
    rings = [_ring(A, N), _ring(B, N), _ring(C, N)]
    # D sits one hoop step behind B
    return DiscreteTube(spec=spec, rings=rings, apex_rings=[_ring(apex, N)],
                        cell_index=[(0, N - 1)])


def _neighbours(ring_prev: np.ndarray, ring_cur: np.ndarray, N: int) -> tuple[int, int]:
    az = _azimuth(ring_prev[0])
    ang = np.arctan2(ring_cur[:, 1], ring_cur[:, 0])
    dB = np.angle(np.exp(1j * (ang - az - math.pi / N)))
    dD = np.angle(np.exp(1j * (ang - az + math.pi / N)))
    return int(np.argmin(np.abs(dB))), int(np.argmin(np.abs(dD)))


def propagate_ring(tube: DiscreteTube) -> np.ndarray:
    """Complete the cells between the last two rings and append the next ring."""
    spec = tube.spec
    N, r = spec.N, spec.r
    row = len(tube.rings) - 1
    if row < 2:
        raise DomainError("propagation needs a seeded cell row (three node rings)")
    if len(tube.apex_rings) != row - 1:
        raise DomainError("propagation needs the apex ring of every completed row")
    prev, cur = tube.rings[row - 1], tube.rings[row]
    kB, kD = _neighbours(prev, cur, N)
    A, B, D = prev[0], cur[kB], cur[kD]

    chord = float(np.linalg.norm(B - D))
    theta = theta_from_diagonal(chord, r)
    if not THETA_MARGIN < theta < THETA_MAX - THETA_MARGIN or chord >= math.sqrt(3.0) * r:
        raise LockError(f"fold angle {math.degrees(theta):.6g} deg leaves (0, 120) deg", row)
    apexes = trilaterate(A, B, D, r, r, r)
    if apexes is None:
        raise LockError("apex spheres do not intersect", row)

    # continuity with the previous row's apex offset, compared in local cylindrical frames
    pc = tube.cell(row - 1)
    ref = _local(pc["O"] - (pc["A"] + pc["B"] + pc["D"]) / 3.0, _azimuth(pc["A"]))
    centroid = (A + B + D) / 3.0
    az = _azimuth(A)
    scores = [float(_local(o - centroid, az) @ ref) for o in apexes]
    if abs(scores[0] - scores[1]) <= 1e-12 * r * r:
        raise BranchAmbiguityError(f"apex candidates equally continuous at ring {row}")
    apex = apexes[0] if scores[0] > scores[1] else apexes[1]

    candidates = trilaterate(apex, B, D, r, r, r)
    if candidates is None:
        raise LockError("vertex spheres do not intersect", row)
    C = max(candidates, key=lambda p: float(np.linalg.norm(p - A)))
    if np.linalg.norm(C - A) < BAR_TOL * r:
        raise LockError("cell collapsed onto its own base", row)

    # keep C on the same index as A so that rows line up
    new = _ring(C, N)
    tube.apex_rings.append(_ring(apex, N))
    tube.cell_index.append((kB, kD))
    tube.rings.append(new)
    return new


def solve_tube(spec: TubeSpec, n_rings: int) -> DiscreteTube:
    """Seed and propagate to ``n_rings`` node rings.

    A lock stops propagation; the partial tube is returned with
    ``tube.lock`` set.
    """
    if n_rings < 2:
        raise DomainError("n_rings must be at least 2")
    tube = seed_ring(spec)
    if n_rings == 2:
        return DiscreteTube(spec=spec, rings=tube.rings[:2], apex_rings=[], cell_index=[])
    while len(tube.rings) < n_rings:
        try:
            propagate_ring(tube)
        except LockError as err:
            tube.lock = err
            break
    return tube


def extract_gamma_profile(tube: DiscreteTube) -> GammaProfile:
    """Per-ring ``gamma`` against the flat-state material coordinate.

    ``xi2 = 0`` sits on ring ``V_1``, the diagonal ring of the seed cell, so
    the profile starts where ``theta0`` and ``omega0`` were imposed.
    """
    if tube.n_rings < 2:
        raise DomainError("profile needs at least two rings")
    idx = np.arange(tube.n_rings)
    xi2 = (idx - 1) * tube.spec.pitch
    gamma = tube.gammas()
    geom = tube.spec.geometry()
    L = geom.Lscale
    return GammaProfile(index=idx, xi2=xi2, gamma=gamma, s=xi2 / L,
                        gamma_hat=gamma / geom.gamma_scale())


def cylindrical_seed(N: int, r: float, orientation: str = "outward",
                     n_rings: int = 30) -> tuple[float, DiscreteTube]:
    """Root-solve ``gamma0`` so that the propagated tube is an exact cylinder.

    With ``omega0`` on a fixed point the seed is mirror symmetric, so the
    ``A`` and ``C`` rings already agree; the root makes the diagonal ring
    ``V_1`` match them too.
    """
    omega0 = {"outward": 0.0, "inward": math.pi}[orientation]
    geom = TubeGeometry(W=N * r * SQRT2, r=r)
    guess = cylindrical_gamma_correction(geom, orientation) if r / geom.W < 0.1 else 0.0

    def mismatch(g):
        t = seed_ring(TubeSpec(N, r, math.pi / 2.0 - g, omega0))
        rad = t.radii()
        return rad[2] - rad[1]

    lo, hi = (0.0, 4.0 * guess) if guess > 0 else (4.0 * guess, 0.0)
    if guess == 0.0:
        lo, hi = -0.5, 0.5
    gamma = brentq(mismatch, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return gamma, solve_tube(TubeSpec(N, r, math.pi / 2.0 - gamma, omega0), n_rings)
