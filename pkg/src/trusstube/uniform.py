"""Uniform foldings: commuting rotation pairs and the cylinders they wind.

A uniform folding is fixed by the cell angle ``theta`` and the axis angle
``phi``.  The rotations ``L`` and ``R`` share the axis
``t = e1 cos(phi) + e2 sin(phi)`` and satisfy ``DC = L AB`` and ``BC = R AD``.
Iterating the rigid motions ``X -> R (X - A) + B`` and ``X -> L (X - A) + D``
tiles the whole cylinder.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._vec import norm, reject, rotation, rotation_angle, signed_angle, unit, vec
from .cell import UnitCell, closure_angles
from .errors import DegenerateAxisError, DomainError, SingularAxisError

SQRT2 = math.sqrt(2.0)
FLAT_TOL = 1e-14
AXIS_TOL = 1e-9


@dataclass(frozen=True)
class UniformFolding:
    cell: UnitCell
    phi: float
    t: np.ndarray
    rotL: np.ndarray
    rotR: np.ndarray
    alpha: float  # angle of rotR
    beta: float   # angle of rotL
    rho: float

    def step_R(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X) - self.cell.A) @ self.rotR.T + self.cell.B

    def step_L(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X) - self.cell.A) @ self.rotL.T + self.cell.D


@dataclass(frozen=True)
class CurvatureComponents:
    E: float
    G: float
    F: float


@dataclass
class Mesh:
    """Pin-jointed truss: node coordinates, bar index pairs, triangular facets."""
    nodes: np.ndarray
    bars: np.ndarray
    facets: np.ndarray
    base_nodes: np.ndarray  # indices of pyramid base vertices
    apex_nodes: np.ndarray

    def bar_lengths(self) -> np.ndarray:
        if len(self.bars) == 0:
            return np.zeros(0)
        d = self.nodes[self.bars[:, 1]] - self.nodes[self.bars[:, 0]]
        return np.linalg.norm(d, axis=1)


def _axis(phi: float) -> np.ndarray:
    return vec(math.cos(phi), math.sin(phi), 0.0)


def _axis_rotation(source, target, t, r) -> tuple[np.ndarray, float]:
    u, v = reject(source, t), reject(target, t)
    if norm(u) < AXIS_TOL * r or norm(v) < AXIS_TOL * r:
        raise DegenerateAxisError("diad is parallel to the rotation axis; rotation is not unique")
    if abs(np.dot(source - target, t)) > AXIS_TOL * r:
        raise DegenerateAxisError("diads have different components along the axis")
    angle = signed_angle(u, v, t)
    return rotation(t, angle), angle


def _is_flat(cell: UnitCell) -> bool:
    return abs(math.cos(cell.angles.theta)) < FLAT_TOL


def compatible_rotations(cell: UnitCell, phi: float) -> UniformFolding:
    """Rotations ``L`` and ``R`` about ``t(phi)`` mapping ``AB -> DC`` and ``AD -> BC``."""
    t = _axis(phi)
    A, B, C, D = cell.A, cell.B, cell.C, cell.D
    rotL, beta = _axis_rotation(B - A, C - D, t, cell.r)
    rotR, alpha = _axis_rotation(D - A, C - B, t, cell.r)
    return UniformFolding(cell=cell, phi=phi, t=t, rotL=rotL, rotR=rotR,
                          alpha=alpha, beta=beta, rho=cylinder_radius(cell, phi))


def cylinder_radius(cell: UnitCell, phi: float) -> float:
    """Distance from the cylinder axis to the pyramid base vertices.

    Returns ``inf`` in the flat state, where every admissible axis gives the
    same planar tiling (and the ``phi = +-pi/4`` family is indeterminate).
    """
    if _is_flat(cell):
        return math.inf
    a = cell.angles
    return _radius(a.s, a.c, a.s_star, a.c_star, phi, cell.r)


def _radius(s, c, ss, cs, phi, r):
    sp, cp = math.sin(phi), math.cos(phi)
    num = math.sqrt(max(0.0, 1.0 - (ss * sp + s * cp) ** 2)) * math.sqrt(max(0.0, 1.0 - (ss * sp - s * cp) ** 2))
    gap = abs(c - cs)
    if gap == 0.0:
        return math.inf
    return 0.5 * r * num / gap


def normalized_curvature(theta: float, phi: float) -> float:
    """``r/rho`` from the closed form, valid on the closed interval ``[0, 2pi/3]``.

    ``nan`` marks the indeterminate flat state at ``phi = +-pi/4``.
    """
    a = closure_angles(theta)
    flat = abs(math.cos(theta)) < FLAT_TOL
    if flat:
        return math.nan if abs(math.cos(2.0 * phi)) < 1e-12 else 0.0
    rho = _radius(a.s, a.c, a.s_star, a.c_star, phi, 1.0)
    return 0.0 if math.isinf(rho) else 1.0 / rho


def generate_uniform_mesh(folding: UniformFolding, n1: int, n2: int) -> Mesh:
    """Tile ``n1 x n2`` cells; cell ``(i, j)`` is ``R^i L^j`` applied to the seed."""
    if n1 < 1 or n2 < 1:
        raise DomainError("mesh needs at least one cell in each direction")
    cell = folding.cell
    seed = np.array([cell.O, cell.A, cell.B, cell.C, cell.D])
    # base vertices keyed by lattice position (half-diagonal units); apexes by cell
    offsets = {"A": (0, -1), "B": (1, 0), "C": (0, 1), "D": (-1, 0)}
    index: dict[tuple, int] = {}
    coords: list[np.ndarray] = []
    base, apex = [], []
    bars: set[tuple[int, int]] = set()
    facets = []

    def node(key, x, bucket):
        if key not in index:
            index[key] = len(coords)
            coords.append(x)
            bucket.append(index[key])
        return index[key]

    column = seed
    for i in range(n1):
        pts = column
        for j in range(n2):
            cx, cy = i - j, i + j
            ids = {"O": node(("O", i, j), pts[0], apex)}
            for k, name in enumerate("ABCD", start=1):
                dx, dy = offsets[name]
                ids[name] = node(("V", cx + dx, cy + dy), pts[k], base)
            for p, q in cell.bars():
                a, b = ids[p], ids[q]
                bars.add((min(a, b), max(a, b)))
            o = ids["O"]
            facets += [(o, ids["A"], ids["B"]), (o, ids["B"], ids["C"]),
                       (o, ids["C"], ids["D"]), (o, ids["D"], ids["A"])]
            pts = folding.step_L(pts)
        column = folding.step_R(column)

    return Mesh(nodes=np.array(coords), bars=np.array(sorted(bars), dtype=int),
                facets=np.array(facets, dtype=int), base_nodes=np.array(base, dtype=int),
                apex_nodes=np.array(apex, dtype=int))


def fit_axis(points: np.ndarray, direction) -> tuple[np.ndarray, float, float]:
    """Least-squares circle fit of ``points`` projected along ``direction``.

    Returns a point on the fitted axis, the radius and the largest
    deviation of any point's axis distance from that radius.
    """
    t = unit(direction)
    P = np.asarray(points, dtype=float)
    ref = vec(1.0, 0.0, 0.0) if abs(t[0]) < 0.9 else vec(0.0, 1.0, 0.0)
    u = unit(reject(ref, t))
    w = np.cross(t, u)
    x, y = P @ u, P @ w
    M = np.column_stack([x, y, np.ones_like(x)])
    sol, *_ = np.linalg.lstsq(M, x * x + y * y, rcond=None)
    xc, yc = sol[0] / 2.0, sol[1] / 2.0
    radius = math.sqrt(sol[2] + xc * xc + yc * yc)
    center = xc * u + yc * w
    d = np.linalg.norm(np.column_stack([x - xc, y - yc]), axis=1)
    return center, radius, float(np.max(np.abs(d - radius)))


def exact_curvatures(folding: UniformFolding) -> CurvatureComponents:
    """Finite-rotation versions of ``E, G, F`` measured on the folded cell."""
    e1, e2, n = vec(1, 0, 0), vec(0, 1, 0), vec(0, 0, 1)
    L, R = folding.rotL, folding.rotR
    cell = folding.cell
    DB = norm(cell.B - cell.D)
    AC = norm(cell.C - cell.A)
    return CurvatureComponents(
        E=float(np.dot(L.T @ R @ e1 - e1, n)) / DB,
        G=float(np.dot(L @ R @ e2 - e2, n)) / AC,
        F=float(np.dot(L @ R @ e1 - e1, n)) / AC,
    )


def _check_linear_inputs(gamma: float, phi: float) -> float:
    if abs(gamma) >= 0.2:
        raise DomainError(f"|gamma|={abs(gamma):.3g} too large for the linearized model (< 0.2)")
    if abs(gamma) > 0.1:
        warnings.warn(f"|gamma|={abs(gamma):.3g} > 0.1: leading-order formulas lose accuracy",
                      stacklevel=3)
    cos2 = math.cos(2.0 * phi)
    if abs(cos2) < AXIS_TOL:
        raise SingularAxisError("phi = +-pi/4: curvature is indeterminate")
    return cos2


def linearized_curvatures(gamma: float, phi: float, r: float) -> CurvatureComponents:
    cos2 = _check_linear_inputs(gamma, phi)
    k = 2.0 * SQRT2 * gamma / r
    sp, cp = math.sin(phi), math.cos(phi)
    return CurvatureComponents(E=k * sp * sp / cos2, G=k * cp * cp / cos2, F=-k * sp * cp / cos2)


def linearized_radius(gamma: float, phi: float, r: float) -> float:
    cos2 = _check_linear_inputs(gamma, phi)
    if gamma == 0.0:
        return math.inf
    return abs(cos2) / (2.0 * SQRT2) * r / abs(gamma)


def linearized_rotation_angles(gamma: float, phi: float) -> tuple[float, float]:
    """Leading-order angles of ``(rotL, rotR)``: ``2 gamma / (cos phi -+ sin phi)``."""
    _check_linear_inputs(gamma, phi)
    cp, sp = math.cos(phi), math.sin(phi)
    return 2.0 * gamma / (cp - sp), 2.0 * gamma / (cp + sp)


def measured_rotation_angles(folding: UniformFolding) -> tuple[float, float]:
    """Angles of ``rotL`` and ``rotR`` read back from the matrices."""
    return rotation_angle(folding.rotL, folding.t), rotation_angle(folding.rotR, folding.t)
