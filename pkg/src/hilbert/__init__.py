"""
Finite-dimensional Hilbert-space surrogate: symmetric generators and shifted solves
"""
from .generator import (
    SelfAdjointGenerator,
    assemble_generator,
    diagonal,
    dirichlet_1d,
    from_matrix,
)

__all__ = [
    'SelfAdjointGenerator',
    'assemble_generator',
    'diagonal',
    'dirichlet_1d',
    'from_matrix',
]
