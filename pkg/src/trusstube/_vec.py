"""Small 3-vector kernel: products, norms and axis-angle rotations."""
import math

import numpy as np


def vec(x, y, z) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


def dot(u, v) -> float:
    return float(u[0] * v[0] + u[1] * v[1] + u[2] * v[2])


def cross(u, v) -> np.ndarray:
    return vec(u[1] * v[2] - u[2] * v[1],
               u[2] * v[0] - u[0] * v[2],
               u[0] * v[1] - u[1] * v[0])


def norm(u) -> float:
    return math.sqrt(dot(u, u))


def unit(u) -> np.ndarray:
    return np.asarray(u, dtype=float) / norm(u)


def reject(u, axis) -> np.ndarray:
    """Component of ``u`` orthogonal to the unit vector ``axis``."""
    return np.asarray(u, dtype=float) - dot(u, axis) * np.asarray(axis, dtype=float)


def signed_angle(u, v, axis) -> float:
    """Angle turning ``u`` onto ``v`` counterclockwise about ``axis``."""
    return math.atan2(dot(cross(u, v), axis), dot(u, v))


def rotation(axis, angle: float) -> np.ndarray:
    """Rodrigues matrix for a rotation by ``angle`` about the unit ``axis``."""
    kx, ky, kz = axis
    K = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def rotation_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_angle(M: np.ndarray, axis) -> float:
    """Signed angle of the rotation matrix ``M`` about its (known) ``axis``."""
    axis = np.asarray(axis, dtype=float)
    probe = cross(axis, vec(1.0, 0.0, 0.0))
    if norm(probe) < 0.5:
        probe = cross(axis, vec(0.0, 1.0, 0.0))
    probe = unit(probe)
    return signed_angle(probe, M @ probe, axis)
