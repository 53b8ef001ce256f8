"""
Proper convex functions with prox oracles, and their Moreau envelopes
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Sequence

import numpy as np

from ..errors import InternalInconsistencyError, RejectedInputError
from .scalar_graphs import ScalarGraph


@dataclass(frozen=True, eq=False)
class ConvexSpec:
    """Convex function φ: 𝔥 → (−∞, +∞] exposed through its value and prox oracle"""

    name: str
    value: Callable[[np.ndarray], float]
    prox: Callable[[float, np.ndarray], np.ndarray]
    params: Dict = field(default_factory=dict)

    def __call__(self, x: np.ndarray) -> float:
        return float(self.value(np.asarray(x, dtype=float)))

    def in_domain(self, x: np.ndarray) -> bool:
        """Effective-domain membership, φ(x) < +∞"""
        return math.isfinite(self(x))

    def to_dict(self) -> dict:
        return {'kind': self.name, **self.params}


def quadratic(matrix: Sequence) -> ConvexSpec:
    """φ(x) = ½⟨Qx, x⟩ with Q symmetric positive semi-definite"""
    q = np.array(matrix, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise RejectedInputError(f"quadratic potential needs a square matrix, got shape {q.shape}")
    if np.linalg.norm(q - q.T) > 1e-10 * max(np.linalg.norm(q), 1.0):
        raise RejectedInputError("quadratic potential needs a symmetric matrix")
    if np.linalg.eigvalsh(q)[0] < -1e-12:
        raise RejectedInputError("quadratic potential needs a positive semi-definite matrix")
    identity = np.eye(q.shape[0])

    def value(x):
        return 0.5 * float(x @ q @ x)

    def prox(c, x):
        return np.linalg.solve(identity + c * q, x)

    return ConvexSpec('quadratic', value, prox, {'matrix': q.tolist()})


def l1(weight: float = 1.0) -> ConvexSpec:
    """φ(x) = w‖x‖₁; prox is soft thresholding"""
    if weight < 0:
        raise RejectedInputError("l1 weight must be nonnegative")

    def value(x):
        return weight * float(np.sum(np.abs(x)))

    def prox(c, x):
        return np.sign(x) * np.maximum(np.abs(x) - c * weight, 0.0)

    return ConvexSpec('l1', value, prox, {'weight': weight})


def l2_norm(weight: float = 1.0) -> ConvexSpec:
    """φ(x) = w‖x‖₂; prox is block soft thresholding"""
    if weight < 0:
        raise RejectedInputError("l2_norm weight must be nonnegative")

    def value(x):
        return weight * float(np.linalg.norm(x))

    def prox(c, x):
        norm = np.linalg.norm(x)
        if norm <= c * weight:
            return np.zeros_like(x)
        return (1.0 - c * weight / norm) * x

    return ConvexSpec('l2_norm', value, prox, {'weight': weight})


def zero_indicator() -> ConvexSpec:
    """Indicator of {0}; its sub-differential is ∂I_{0}"""

    def value(x):
        return 0.0 if not np.any(x) else math.inf

    def prox(c, x):
        return np.zeros_like(x)

    return ConvexSpec('zero', value, prox, {})


def box_indicator(lower: Sequence[float], upper: Sequence[float]) -> ConvexSpec:
    """Indicator of the box [lower, upper]; prox is the projection"""
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if np.any(lo > hi):
        raise RejectedInputError("box potential needs lower <= upper")

    def value(x):
        return 0.0 if np.all((x >= lo) & (x <= hi)) else math.inf

    def prox(c, x):
        return np.clip(x, lo, hi)

    return ConvexSpec('box', value, prox, {'lower': np.atleast_1d(lo).tolist(), 'upper': np.atleast_1d(hi).tolist()})


def separable(graphs: Sequence[ScalarGraph]) -> ConvexSpec:
    """φ(x) = Σ_i j_i(x_i) for scalar potentials of a componentwise relation"""
    graphs = tuple(graphs)

    def value(x):
        return float(sum(graph.potential(x[i]) for i, graph in enumerate(graphs)))

    def prox(c, x):
        return np.array([graph.resolve(c, x[i]) for i, graph in enumerate(graphs)], dtype=float)

    return ConvexSpec('separable', value, prox, {'graphs': [g.to_dict() for g in graphs]})


def moreau_envelope(phi: ConvexSpec, c: float, x: np.ndarray) -> float:
    """
    Moreau envelope φ_c(x) = inf_ζ {‖x − ζ‖²/(2c) + φ(ζ)}, evaluated at ζ = prox_c(x)

    Args:
        phi: convex function
        c: regularization parameter, c > 0
        x: evaluation point

    Returns:
        finite envelope value
    """
    if not c > 0:
        raise RejectedInputError(f"Moreau parameter must be positive, got {c}")
    x = np.asarray(x, dtype=float)
    zeta = phi.prox(c, x)
    phi_value = phi(zeta)
    if not math.isfinite(phi_value):
        raise InternalInconsistencyError(f"{phi.name} is infinite at its own prox point")
    return float(np.sum((x - zeta) ** 2)) / (2.0 * c) + phi_value


def moreau_spec(phi: ConvexSpec, c: float) -> ConvexSpec:
    """φ_c as a convex spec; its prox follows from prox_{c+d} of φ"""

    def value(x):
        return moreau_envelope(phi, c, x)

    def prox(d, x):
        return (c * x + d * phi.prox(c + d, x)) / (c + d)

    return ConvexSpec('moreau', value, prox, {'base': phi.to_dict(), 'c': c})


def convex_from_dict(spec: Dict) -> ConvexSpec:
    """Build a convex spec from its JSON description"""
    kind = spec.get('kind')
    if kind == 'quadratic':
        return quadratic(spec['matrix'])
    if kind == 'l1':
        return l1(float(spec.get('weight', 1.0)))
    if kind == 'l2_norm':
        return l2_norm(float(spec.get('weight', 1.0)))
    if kind == 'zero':
        return zero_indicator()
    if kind == 'box':
        return box_indicator(spec['lower'], spec['upper'])
    if kind == 'separable':
        return separable([ScalarGraph.from_dict(g) for g in spec['graphs']])
    raise RejectedInputError(f"unknown potential kind: {kind!r}")
