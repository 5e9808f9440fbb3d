"""Geometry of a single pyramidal unit cell.

The cell is an equilateral square pyramid with apex ``O`` and base vertices
``A, B, C, D``.  In the local frame ``(e1, e2, n)`` the diagonal ``DB`` runs
along ``e1``, ``AC`` along ``e2`` and the apex sits at the origin.  The two
central angles ``theta`` (between ``OB`` and ``OD``) and ``theta_star``
(between ``OA`` and ``OC``) are tied by the closure condition
``2 cos(theta/2) cos(theta_star/2) = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._vec import norm
from .errors import DomainError

THETA_MAX = 2.0 * math.pi / 3.0
THETA_MARGIN = 1e-9


@dataclass(frozen=True)
class FoldAngles:
    theta: float
    theta_star: float
    gamma: float
    s: float
    c: float
    s_star: float
    c_star: float

    @property
    def closure_residual(self) -> float:
        return 2.0 * self.c * self.c_star - 1.0


@dataclass(frozen=True)
class UnitCell:
    r: float
    angles: FoldAngles
    O: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @property
    def vertices(self) -> dict[str, np.ndarray]:
        return {"O": self.O, "A": self.A, "B": self.B, "C": self.C, "D": self.D}

    def bars(self) -> list[tuple[str, str]]:
        return [("O", "A"), ("O", "B"), ("O", "C"), ("O", "D"),
                ("A", "B"), ("B", "C"), ("C", "D"), ("D", "A")]

    def bar_lengths(self) -> np.ndarray:
        v = self.vertices
        return np.array([norm(v[q] - v[p]) for p, q in self.bars()])


def closure_angles(theta: float) -> FoldAngles:
    """Half-angle bookkeeping without the open-interval guard.

    Only requires ``cos(theta/2) >= 1/2``; endpoint states are allowed so
    that closed-form curves can be evaluated at ``theta = 0``.
    """
    s, c = math.sin(theta / 2.0), math.cos(theta / 2.0)
    if not 0.0 <= theta <= THETA_MAX or c < 0.5:
        raise DomainError(f"theta={theta!r} rad cannot close the cell")
    c_star = 1.0 / (2.0 * c)
    s_star = math.sqrt(max(0.0, 1.0 - c_star * c_star))
    # tan(theta*/2) = sqrt(4c^2 - 1); exact at the self-dual state theta = pi/2
    theta_star = 2.0 * math.atan(math.sqrt(max(0.0, (2.0 * c - 1.0) * (2.0 * c + 1.0))))
    return FoldAngles(theta, theta_star, math.pi / 2.0 - theta, s, c, s_star, c_star)


def solve_closure(theta: float) -> FoldAngles:
    """Fold angles of the cell for a central angle ``theta`` in ``(0, 2pi/3)``."""
    if not (THETA_MARGIN < theta < THETA_MAX - THETA_MARGIN):
        raise DomainError(
            f"theta={math.degrees(theta):.6g} deg outside (0, 120) deg: the linkage cannot close")
    return closure_angles(theta)


def build_cell(r: float, angles: FoldAngles) -> UnitCell:
    if r <= 0:
        raise DomainError(f"bar length must be positive, got {r!r}")
    s, c, ss, cs = angles.s, angles.c, angles.s_star, angles.c_star
    return UnitCell(
        r=r,
        angles=angles,
        O=np.zeros(3),
        A=r * np.array([0.0, -ss, -cs]),
        B=r * np.array([s, 0.0, -c]),
        C=r * np.array([0.0, ss, -cs]),
        D=r * np.array([-s, 0.0, -c]),
    )


def theta_from_diagonal(diagonal: float, r: float) -> float:
    """Central angle recovered from the base diagonal ``|DB|``."""
    return 2.0 * math.asin(min(1.0, diagonal / (2.0 * r)))
