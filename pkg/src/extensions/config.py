"""
Configuration parameters for inclusion solves, evolutions and report checks
"""
from dataclasses import asdict, dataclass, fields, replace
from typing import Dict, Optional

from ..errors import RejectedInputError


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs shared by the extension, semigroup and point-interaction solvers"""

    # Boundary inclusion
    inclusion_tol: float = 1e-10          # bound on the distance to the fixed point
    max_iterations: int = 100_000         # forward-backward iteration cap
    step: Optional[float] = None          # None uses c = 1/‖K‖

    # Structural checks
    symmetry_tol: float = 1e-10           # relative asymmetry accepted for generators
    rank_tol: float = 1e-10               # smallest singular value accepted for τ
    pair_tol: float = 1e-8                # inclusion residual accepted for graph pairs

    # Green-combination states
    prune_threshold: float = 1e-13        # charges below this norm are dropped
    max_amplification: float = 1e8        # largest growth |λ/(λ − μ)|^steps of an evolved coefficient

    # Time stepping
    default_h: float = 0.01
    default_horizon: float = 5.0

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class ToleranceSet:
    """Pass/fail thresholds of report checks"""

    resolvent_identity: float = 1e-8
    weyl_identity: float = 1e-10
    symmetry: float = 1e-10
    monotonicity: float = 1e-10
    lipschitz: float = 1e-10
    coercivity: float = 1e-10
    round_trip: float = 1e-8
    lambda_independence: float = 1e-8
    sub_potential: float = 1e-8
    linear_recovery: float = 1e-9
    friedrichs_recovery: float = 1e-12
    base_resolvent: float = 1e-8
    contraction: float = 1e-8
    energy_decrease: float = 1e-10
    increment_decrease: float = 1e-10     # relative growth of ‖u_k − u_{k−1}‖/h on a shifted run
    decay_rate: float = 0.05              # relative deviation from (1 − hλ°)^{-1}
    green_quadrature: float = 1e-6        # relative
    ladder_ratio: float = 1.0 - 1e-9      # consecutive sup-distance ratios, strictly below 1
    constancy: float = 1e-8               # drift of a run started at equilibrium
    norm_increase: float = 1e-8           # growth of ‖u_k‖ when (0, 0) ∈ Θ

    def with_overrides(self, overrides: Dict[str, float]) -> 'ToleranceSet':
        """Return a copy with selected thresholds replaced"""
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise RejectedInputError(f"unknown tolerance keys: {', '.join(unknown)}")
        return replace(self, **{key: float(value) for key, value in overrides.items()})

    def to_dict(self) -> Dict:
        return asdict(self)
