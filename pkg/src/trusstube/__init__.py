"""Pyramidal truss tessellations: uniform foldings, tubes and their continuum limit."""
__version__ = "0.1.0"

from .cell import FoldAngles, UnitCell, build_cell, closure_angles, solve_closure, theta_from_diagonal
from .continuum import (ElasticaState, TubeGeometry, integrate_elastica, pendulum_period,
                        phase_diagram, phase_invariant, reconstruct_profile)
from .discrete import DiscreteTube, TubeSpec, cylindrical_seed, extract_gamma_profile, solve_tube
from .errors import (DomainError, GeometryError, LockError, TrussTubeError)
from .uniform import (UniformFolding, compatible_rotations, cylinder_radius, generate_uniform_mesh,
                      normalized_curvature)

__all__ = [
    "__version__", "FoldAngles", "UnitCell", "build_cell", "closure_angles", "solve_closure",
    "theta_from_diagonal", "ElasticaState", "TubeGeometry", "integrate_elastica",
    "pendulum_period", "phase_diagram", "phase_invariant", "reconstruct_profile",
    "DiscreteTube", "TubeSpec", "cylindrical_seed", "extract_gamma_profile", "solve_tube",
    "DomainError", "GeometryError", "LockError", "TrussTubeError", "UniformFolding",
    "compatible_rotations", "cylinder_radius", "generate_uniform_mesh", "normalized_curvature",
]
