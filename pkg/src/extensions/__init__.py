"""
Nonlinear Kreĭn extensions, their verification and their implicit-Euler semigroups
"""
from .config import SolverConfig, ToleranceSet
from .krein import Decomposition, GraphPoint, KreinExtension, build_extension
from .semigroup import (
    Run,
    Trajectory,
    compare_trajectories,
    contraction_check,
    decay_rate,
    energy_increase,
    evolve,
    increment_increase,
    moreau_ladder,
    regularity_integrals,
    step,
    trace_ladder,
)
from .verification import CheckResult, VerificationReport, is_friedrichs, verify_identities

__all__ = [
    'CheckResult',
    'Decomposition',
    'GraphPoint',
    'KreinExtension',
    'Run',
    'SolverConfig',
    'ToleranceSet',
    'Trajectory',
    'VerificationReport',
    'build_extension',
    'compare_trajectories',
    'contraction_check',
    'decay_rate',
    'energy_increase',
    'evolve',
    'increment_increase',
    'is_friedrichs',
    'moreau_ladder',
    'regularity_integrals',
    'step',
    'trace_ladder',
    'verify_identities',
]
