"""
Maximal monotone relations Θ ⊂ 𝔥×𝔥 exposed through their resolvents
"""
import logging
from abc import ABC, abstractmethod
from collections import defaultdict
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import RejectedInputError, StepSizeError, UnsupportedRelationError
from . import convex
from .convex import ConvexSpec
from .scalar_graphs import ScalarGraph, ScalarGraphKind

logger = logging.getLogger(__name__)

Box = Union[float, Tuple[float, float]]


class RelationKind(Enum):
    """Relation kind enumeration"""
    LINEAR = "linear"
    SUBDIFFERENTIAL = "subdifferential"
    COMPONENTWISE = "componentwise"
    SHIFTED = "shifted"
    YOSIDA = "yosida"


class MonotoneRelation(ABC):
    """Abstract base class for relations Θ such that Θ + γ is maximal monotone"""

    kind: RelationKind

    def __init__(self, dim: int, type_constant: float = 0.0):
        if dim < 1:
            raise RejectedInputError(f"relation dimension must be positive, got {dim}")
        self.dim = dim
        self.type_constant = float(type_constant)

    @abstractmethod
    def _resolve(self, c: float, x: np.ndarray) -> np.ndarray:
        """(I + cΘ)^{-1}(x), called only with admissible c"""

    def resolve(self, c: float, x: np.ndarray) -> np.ndarray:
        """
        Resolvent J_c := (I + cΘ)^{-1}

        Args:
            c: positive parameter with c·γ < 1 when γ > 0
            x: point of 𝔥

        Returns:
            the unique ξ with x ∈ ξ + cΘ(ξ)
        """
        if not c > 0:
            raise StepSizeError(f"resolvent parameter must be positive, got {c}")
        if self.type_constant > 0 and c * self.type_constant >= 1.0:
            raise StepSizeError(
                f"resolvent parameter c={c} violates c·γ < 1 for type γ={self.type_constant}"
            )
        x = self._check_vector(x)
        return self._resolve(c, x)

    def resolve_corrected(self, c: float, x: np.ndarray) -> np.ndarray:
        """Resolvent of the monotone relation Θ + γ: J^{Θ+γ}_c(x) = J^Θ_{c'}(x/(1+cγ)), c' = c/(1+cγ)"""
        scale = 1.0 + c * self.type_constant
        if scale <= 0:
            raise StepSizeError(
                f"corrected resolvent needs 1 + cγ > 0 (c={c}, γ={self.type_constant})"
            )
        return self.resolve(c / scale, np.asarray(x, dtype=float) / scale)

    def yosida(self, c: float, x: np.ndarray) -> np.ndarray:
        """Yosida approximation (x − J_c(x))/c"""
        x = self._check_vector(x)
        return (x - self.resolve(c, x)) / c

    def contains(self, xi: np.ndarray, xi_tilde: np.ndarray) -> float:
        """Inclusion residual of (ξ, ξ̃) ∈ Θ, measured as ‖J_c(ξ + cξ̃) − ξ‖"""
        c = 1.0 if self.type_constant < 1.0 else 0.5 / self.type_constant
        xi = self._check_vector(xi)
        xi_tilde = self._check_vector(xi_tilde)
        return float(np.linalg.norm(self.resolve(c, xi + c * xi_tilde) - xi))

    def inverse_apply(self, y: np.ndarray) -> np.ndarray:
        """Θ^{-1}(y) when Θ^{-1} is single-valued with an analytic branch"""
        raise UnsupportedRelationError(f"{self.kind.value} relation has no analytic inverse")

    def potential(self) -> Optional[ConvexSpec]:
        """Convex φ with Θ = ∂φ, when known"""
        return None

    @property
    def domain_is_origin(self) -> bool:
        """Whether dom Θ = {0}, so Θ + γ is monotone for every γ"""
        return False

    def contains_origin(self, tol: float = 1e-12) -> bool:
        """Whether (0, 0) ∈ Θ"""
        zero = np.zeros(self.dim)
        return self.contains(zero, zero) <= tol

    @abstractmethod
    def to_dict(self) -> dict:
        """Convert relation to its JSON spec"""

    def _check_vector(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise RejectedInputError(f"expected a vector of length {self.dim}, got shape {x.shape}")
        return x


class LinearRelation(MonotoneRelation):
    """Θ = B, a matrix with B + Bᵀ + 2γI positive semi-definite"""

    kind = RelationKind.LINEAR

    def __init__(self, matrix: Sequence, type_constant: float = 0.0):
        b = np.array(matrix, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise RejectedInputError(f"linear relation needs a square matrix, got shape {b.shape}")
        super().__init__(b.shape[0], type_constant)
        sym = 0.5 * (b + b.T) + self.type_constant * np.eye(self.dim)
        if np.linalg.eigvalsh(sym)[0] < -1e-12 * max(1.0, np.linalg.norm(b)):
            raise RejectedInputError(
                f"B + Bᵀ + 2γI is not positive semi-definite for declared type γ={self.type_constant}"
            )
        self.matrix = b

    def _resolve(self, c, x):
        return np.linalg.solve(np.eye(self.dim) + c * self.matrix, x)

    def inverse_apply(self, y):
        sym = 0.5 * (self.matrix + self.matrix.T)
        if np.linalg.eigvalsh(sym)[0] <= 0:
            raise UnsupportedRelationError("linear relation is not positive definite")
        return np.linalg.solve(self.matrix, self._check_vector(y))

    def potential(self):
        if self.type_constant > 0 or not np.allclose(self.matrix, self.matrix.T, atol=1e-12):
            return None
        return convex.quadratic(self.matrix)

    def to_dict(self):
        return {'kind': self.kind.value, 'matrix': self.matrix.tolist(), 'type_constant': self.type_constant}


class ComponentwiseRelation(MonotoneRelation):
    """Θ(ξ) = (g_1(ξ_1), ..., g_m(ξ_m)) for scalar graphs g_i"""

    kind = RelationKind.COMPONENTWISE

    def __init__(self, graphs: Sequence[ScalarGraph], type_constant: Optional[float] = None):
        graphs = tuple(graphs)
        natural = max(g.type_constant for g in graphs) if graphs else 0.0
        declared = natural if type_constant is None else float(type_constant)
        if declared < natural:
            raise RejectedInputError(
                f"declared type γ={declared} is below the graphs' own type {natural}"
            )
        super().__init__(len(graphs), declared)
        self.graphs = graphs
        groups: Dict[ScalarGraph, List[int]] = defaultdict(list)
        for index, graph in enumerate(graphs):
            groups[graph].append(index)
        self._groups = [(graph, np.array(indices)) for graph, indices in groups.items()]

    def _resolve(self, c, x):
        out = np.empty_like(x)
        for graph, indices in self._groups:
            out[indices] = graph.resolve(c, x[indices])
        return out

    def inverse_apply(self, y):
        y = self._check_vector(y)
        out = np.empty_like(y)
        for graph, indices in self._groups:
            out[indices] = graph.inverse(y[indices])
        return out

    def potential(self):
        if any(g.kind == ScalarGraphKind.LINEAR and g.slope < 0 for g in self.graphs):
            return None
        return convex.separable(self.graphs)

    @property
    def domain_is_origin(self):
        return all(g.kind == ScalarGraphKind.ZERO for g in self.graphs)

    def to_dict(self):
        return {
            'kind': self.kind.value,
            'graphs': [g.to_dict() for g in self.graphs],
            'type_constant': self.type_constant,
        }


class SubdifferentialRelation(MonotoneRelation):
    """Θ = ∂φ for a convex spec with a prox oracle"""

    kind = RelationKind.SUBDIFFERENTIAL

    def __init__(self, phi: ConvexSpec, dim: int):
        super().__init__(dim, 0.0)
        self.phi = phi

    def _resolve(self, c, x):
        return np.asarray(self.phi.prox(c, x), dtype=float)

    def potential(self):
        return self.phi

    @property
    def domain_is_origin(self):
        return self.phi.name == 'zero'

    def to_dict(self):
        return {'kind': self.kind.value, 'potential': self.phi.to_dict()}


class ShiftedRelation(MonotoneRelation):
    """Θ = {(ξ + a, ξ̃ + b) : (ξ, ξ̃) ∈ base}"""

    kind = RelationKind.SHIFTED

    def __init__(self, base: MonotoneRelation, offset: Sequence, offset_tilde: Sequence):
        super().__init__(base.dim, base.type_constant)
        self.base = base
        self.offset = self._check_vector(offset)
        self.offset_tilde = self._check_vector(offset_tilde)

    def _resolve(self, c, x):
        return self.base.resolve(c, x - self.offset - c * self.offset_tilde) + self.offset

    def to_dict(self):
        return {
            'kind': self.kind.value,
            'base': self.base.to_dict(),
            'offset': [self.offset.tolist(), self.offset_tilde.tolist()],
        }


class YosidaRelation(MonotoneRelation):
    """Θ_c = (I − J_c)/c, the Yosida approximation of a monotone base relation"""

    kind = RelationKind.YOSIDA

    def __init__(self, base: MonotoneRelation, c: float):
        if not c > 0:
            raise RejectedInputError(f"Yosida parameter must be positive, got {c}")
        if base.type_constant > 0:
            raise UnsupportedRelationError("Yosida approximation needs a monotone base (γ ≤ 0)")
        super().__init__(base.dim, 0.0)
        self.base = base
        self.c = float(c)

    def _resolve(self, d, x):
        total = self.c + d
        return (self.c * x + d * self.base.resolve(total, x)) / total

    def potential(self):
        phi = self.base.potential()
        return None if phi is None else convex.moreau_spec(phi, self.c)

    def to_dict(self):
        return {'kind': self.kind.value, 'base': self.base.to_dict(), 'c': self.c}


def sample_graph(theta: MonotoneRelation, n: int, box: Box = 1.0,
                 seed: int = 0) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Sample pairs of the graph of Θ through its resolvent

    Args:
        theta: relation to sample
        n: number of pairs, n ≥ 1
        box: half-width h (box [−h, h]^m) or explicit (low, high)
        seed: seed of the PCG64 generator

    Returns:
        list of (ξ, ξ̃) with ξ = J_c(x), ξ̃ = (x − ξ)/c, c = 1 unless γ ≥ 1
    """
    if n < 1:
        raise RejectedInputError(f"sample count must be positive, got {n}")
    low, high = (-box, box) if np.isscalar(box) else box
    rng = np.random.default_rng(seed)
    c = 1.0 if theta.type_constant < 1.0 else 0.5 / theta.type_constant
    pairs = []
    for x in rng.uniform(low, high, size=(n, theta.dim)):
        xi = theta.resolve(c, x)
        pairs.append((xi, (x - xi) / c))
    return pairs


def resolve(theta: MonotoneRelation, c: float, x: np.ndarray) -> np.ndarray:
    """J_c(x) = (I + cΘ)^{-1}(x)"""
    return theta.resolve(c, x)


def yosida_apply(theta: MonotoneRelation, c: float, x: np.ndarray) -> np.ndarray:
    """Θ_c(x) = (x − J_c(x))/c"""
    return theta.yosida(c, x)
