"""
Finite-dimensional self-adjoint generators with a cached spectral decomposition
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np
from scipy import linalg

from ..errors import InvalidShiftError, RejectedInputError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SelfAdjointGenerator:
    """Symmetric matrix A° with its ascending spectrum and orthonormal eigenvectors"""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    name: str = "explicit"
    params: Dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def lower_bound(self) -> float:
        """ω := −(smallest eigenvalue), so that A° + ω is positive semi-definite"""
        return -float(self.eigenvalues[0])

    def check_shift(self, lam: float) -> None:
        """Raise unless λ > ω"""
        if not lam > self.lower_bound:
            raise InvalidShiftError(
                f"shift {lam} must exceed the lower bound ω={self.lower_bound}"
            )

    def _spectral_apply(self, weights: np.ndarray, b: np.ndarray) -> np.ndarray:
        coeffs = self.eigenvectors.T @ b
        if coeffs.ndim == 1:
            return self.eigenvectors @ (weights * coeffs)
        return self.eigenvectors @ (weights[:, None] * coeffs)

    def resolvent_apply(self, lam: float, b: np.ndarray) -> np.ndarray:
        """
        Solve (A° + λ)x = b through the spectral cache

        Args:
            lam: shift λ > ω
            b: right-hand side, a vector or a matrix of column vectors

        Returns:
            x with the same shape as b
        """
        self.check_shift(lam)
        b = np.asarray(b, dtype=float)
        return self._spectral_apply(1.0 / (self.eigenvalues + lam), b)

    def resolvent_matrix(self, lam: float) -> np.ndarray:
        """Dense (A° + λ)^{-1}"""
        self.check_shift(lam)
        scaled = self.eigenvectors / (self.eigenvalues + lam)
        return scaled @ self.eigenvectors.T

    def inverse_apply(self, b: np.ndarray) -> np.ndarray:
        """A°^{-1} b, available when A° is strictly positive (ω < 0)"""
        return self.resolvent_apply(0.0, b)

    def half_power_energy(self, lam0: float, u: np.ndarray) -> float:
        """½‖(A° + λ°)^{1/2} u‖² = ½⟨(A° + λ°)u, u⟩"""
        self.check_shift(lam0)
        coeffs = self.eigenvectors.T @ np.asarray(u, dtype=float)
        return 0.5 * float(np.sum((self.eigenvalues + lam0) * coeffs ** 2))

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'dim': self.dim,
            'lower_bound': self.lower_bound,
            'params': dict(self.params),
        }


def _from_symmetric(matrix: np.ndarray, name: str, params: Dict) -> SelfAdjointGenerator:
    eigenvalues, eigenvectors = linalg.eigh(matrix)
    for array in (matrix, eigenvalues, eigenvectors):
        array.setflags(write=False)
    generator = SelfAdjointGenerator(matrix, eigenvalues, eigenvectors, name, params)
    logger.debug("Assembled %s generator: dim=%d, ω=%.6g", name, generator.dim, generator.lower_bound)
    return generator


def from_matrix(matrix: Union[Sequence, np.ndarray], tol: float = SYMMETRY_TOL) -> SelfAdjointGenerator:
    """Explicit dense matrix; symmetrized only when asymmetry is within tolerance"""
    matrix = np.array(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise RejectedInputError(f"generator matrix must be square and non-empty, got shape {matrix.shape}")
    scale = max(np.linalg.norm(matrix), 1.0)
    asymmetry = np.linalg.norm(matrix - matrix.T) / scale
    if asymmetry > tol:
        raise RejectedInputError(f"generator matrix is not symmetric (relative asymmetry {asymmetry:.3e})")
    return _from_symmetric(0.5 * (matrix + matrix.T), "explicit", {})


def diagonal(values: Sequence[float]) -> SelfAdjointGenerator:
    """Diagonal generator with the given eigenvalues"""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise RejectedInputError("diagonal generator needs a non-empty list of eigenvalues")
    return _from_symmetric(np.diag(values), "diagonal", {'values': values.tolist()})


def dirichlet_1d(n: int, h: Optional[float] = None) -> SelfAdjointGenerator:
    """
    Finite-difference Dirichlet Laplacian on n interior nodes

    Args:
        n: number of interior grid nodes (n ≥ 2)
        h: grid spacing, defaults to 1/(n+1) (unit interval)

    Returns:
        generator with matrix tridiag(−1, 2, −1)/h²
    """
    if n < 2:
        raise RejectedInputError(f"dirichlet_1d needs n >= 2, got {n}")
    if h is None:
        h = 1.0 / (n + 1)
    if h <= 0:
        raise RejectedInputError(f"dirichlet_1d needs h > 0, got {h}")
    main = np.full(n, 2.0)
    off = np.full(n - 1, -1.0)
    matrix = (np.diag(main) + np.diag(off, 1) + np.diag(off, -1)) / h ** 2
    return _from_symmetric(matrix, "dirichlet_1d", {'n': n, 'h': h})


def assemble_generator(spec: Union[Dict, Sequence, np.ndarray]) -> SelfAdjointGenerator:
    """
    Build a generator from a spec

    Args:
        spec: dense matrix, or a dict with 'kind' in {'explicit', 'diagonal', 'dirichlet_1d'}

    Returns:
        SelfAdjointGenerator with its spectral cache
    """
    if not isinstance(spec, dict):
        return from_matrix(spec)

    kind = spec.get('kind')
    if kind == 'explicit':
        return from_matrix(spec['matrix'])
    if kind == 'diagonal':
        return diagonal(spec['values'])
    if kind == 'dirichlet_1d':
        return dirichlet_1d(int(spec['n']), spec.get('h'))
    raise RejectedInputError(f"unknown generator kind: {kind!r}")
