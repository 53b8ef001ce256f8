"""
Point perturbations of the 3D Laplacian: boundary matrices, Green Gram matrices and Green-combination states
"""
from .boundary import (
    PointConfig,
    boundary_matrices,
    gamma0,
    green_gram,
    green_gram_quadrature,
    point_config,
    power_kernel,
    weyl_matrix,
)
from .green_state import (
    GreenState,
    GreenStep,
    GreenTrajectory,
    Term,
    check_type_gamma0,
    evolve_green,
    green_eval,
    green_norm,
    resolvent_step_green,
)

__all__ = [
    'GreenState',
    'GreenStep',
    'GreenTrajectory',
    'PointConfig',
    'Term',
    'boundary_matrices',
    'check_type_gamma0',
    'evolve_green',
    'gamma0',
    'green_eval',
    'green_gram',
    'green_gram_quadrature',
    'green_norm',
    'point_config',
    'power_kernel',
    'resolvent_step_green',
    'weyl_matrix',
]
