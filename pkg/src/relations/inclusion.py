"""
Forward-backward solver for ξ with η − Kξ ∈ Θ(ξ)
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from ..errors import RejectedInputError, ToleranceError, UnsupportedRelationError
from .convex import convex_from_dict
from .relation import (
    ComponentwiseRelation,
    LinearRelation,
    MonotoneRelation,
    RelationKind,
    ShiftedRelation,
    SubdifferentialRelation,
    YosidaRelation,
)
from .scalar_graphs import ScalarGraph

logger = logging.getLogger(__name__)


@dataclass
class InclusionResult:
    """Solution of a boundary inclusion"""
    xi: np.ndarray
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return {'xi': self.xi.tolist(), 'iterations': self.iterations, 'residual': self.residual}


def solve_inclusion(theta: MonotoneRelation, k: np.ndarray, eta: np.ndarray,
                    tol: float = 1e-10, max_iterations: int = 100_000,
                    step: Optional[float] = None) -> InclusionResult:
    """
    Solve η ∈ (K + Θ)(ξ) for a symmetric K with K − γI positive definite

    The iteration ξ ← J^{Θ+γ}_c(ξ − c((K − γI)ξ − η)) is a contraction with
    factor q = 1 − c·λmin(K − γI) for c = 1/λmax(K − γI).

    Args:
        theta: relation of type γ
        k: symmetric m×m matrix
        eta: right-hand side
        tol: bound on the distance to the fixed point
        max_iterations: iteration cap
        step: optional step c, must lie in (0, 2/λmax)

    Returns:
        InclusionResult with the solution and the iteration count

    Raises:
        UnsupportedRelationError: K − γI is not positive definite
        ToleranceError: the iteration cap was reached
    """
    k = np.asarray(k, dtype=float)
    eta = np.asarray(eta, dtype=float)
    m = theta.dim
    if k.shape != (m, m) or eta.shape != (m,):
        raise RejectedInputError(f"inclusion shapes K={k.shape}, η={eta.shape} do not match dim {m}")

    if theta.domain_is_origin:
        return InclusionResult(np.zeros(m), 0, 0.0)

    shifted = 0.5 * (k + k.T) - theta.type_constant * np.eye(m)
    spectrum = np.linalg.eigvalsh(shifted)
    low, high = float(spectrum[0]), float(spectrum[-1])
    if low <= 0:
        raise UnsupportedRelationError(
            f"K − γI is not positive definite (λmin={low:.3e}, γ={theta.type_constant})"
        )

    # linear relations are solved directly
    if isinstance(theta, LinearRelation):
        xi = np.linalg.solve(k + theta.matrix, eta)
        return InclusionResult(xi, 0, float(np.linalg.norm(k @ xi + theta.matrix @ xi - eta)))

    if step is None:
        c = 1.0 / high
        q = 1.0 - low / high
    else:
        if not 0 < step < 2.0 / high:
            raise RejectedInputError(f"inclusion step {step} must lie in (0, {2.0 / high})")
        c = step
        q = max(abs(1.0 - c * low), abs(1.0 - c * high))

    xi = np.zeros(m)
    change = np.inf
    for iteration in range(1, max_iterations + 1):
        updated = theta.resolve_corrected(c, xi - c * (shifted @ xi - eta))
        change = float(np.linalg.norm(updated - xi))
        xi = updated
        # a-posteriori bound ‖ξ − ξ*‖ ≤ q‖Δξ‖/(1 − q)
        if q * change <= tol * (1.0 - q):
            logger.debug("Inclusion converged in %d iterations (q=%.4f)", iteration, q)
            return InclusionResult(xi, iteration, change)

    raise ToleranceError(
        f"inclusion solver did not converge in {max_iterations} iterations", max_iterations, change
    )


def relation_from_dict(spec: Dict, dim: Optional[int] = None) -> MonotoneRelation:
    """
    Build a relation from its JSON description

    Args:
        spec: dict with 'kind' among the RelationKind values
        dim: boundary dimension, required for subdifferential relations without a matrix

    Returns:
        MonotoneRelation
    """
    try:
        kind = RelationKind(spec.get('kind'))
    except ValueError:
        raise UnsupportedRelationError(f"unknown relation kind: {spec.get('kind')!r}")

    if kind == RelationKind.LINEAR:
        return LinearRelation(spec['matrix'], float(spec.get('type_constant', 0.0)))
    if kind == RelationKind.COMPONENTWISE:
        graphs = [ScalarGraph.from_dict(g) for g in spec['graphs']]
        return ComponentwiseRelation(graphs, spec.get('type_constant'))
    if kind == RelationKind.SUBDIFFERENTIAL:
        phi = convex_from_dict(spec['potential'])
        size = spec.get('dim', dim)
        if size is None:
            raise RejectedInputError("subdifferential relation needs a dimension")
        return SubdifferentialRelation(phi, int(size))
    if kind == RelationKind.SHIFTED:
        offset, offset_tilde = spec['offset']
        return ShiftedRelation(relation_from_dict(spec['base'], dim), offset, offset_tilde)
    return YosidaRelation(relation_from_dict(spec['base'], dim), float(spec['c']))
