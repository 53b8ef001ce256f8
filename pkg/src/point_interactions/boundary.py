"""
Boundary calculus of point perturbations of the 3D Laplacian
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import integrate, special
from scipy.spatial.distance import pdist, squareform

from ..errors import RejectedInputError

logger = logging.getLogger(__name__)

MIN_SEPARATION = 1e-9
FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True, eq=False)
class PointConfig:
    """Finite set Y ⊂ ℝ³ of distinct interaction centres"""

    points: np.ndarray
    distances: np.ndarray

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def to_dict(self) -> dict:
        return {'points': self.points.tolist()}


def point_config(points: Sequence) -> PointConfig:
    """
    Validate interaction centres

    Args:
        points: n×3 coordinates, n ≥ 1

    Returns:
        PointConfig with the pairwise distance matrix
    """
    points = np.array(points, dtype=float)
    if points.ndim == 1:
        points = points[None, :]
    if points.ndim != 2 or points.shape[1] != 3 or points.shape[0] == 0:
        raise RejectedInputError(f"points must be an n×3 array with n ≥ 1, got shape {points.shape}")
    distances = squareform(pdist(points)) if points.shape[0] > 1 else np.zeros((1, 1))
    if points.shape[0] > 1:
        separation = pdist(points).min()
        if separation <= MIN_SEPARATION:
            raise RejectedInputError(f"points are not distinct (minimum distance {separation:.3e})")
    points.setflags(write=False)
    distances.setflags(write=False)
    return PointConfig(points, distances)


def weyl_matrix(config: PointConfig, lam: float) -> np.ndarray:
    """M_λ: diagonal √λ/4π, off-diagonal −e^{−√λ r}/(4πr)"""
    if lam < 0:
        raise RejectedInputError(f"λ must be nonnegative, got {lam}")
    root = math.sqrt(lam)
    r = config.distances
    with np.errstate(divide='ignore'):
        off = np.where(r > 0, -np.exp(-root * r) / (FOUR_PI * np.where(r > 0, r, 1.0)), 0.0)
    np.fill_diagonal(off, root / FOUR_PI)
    return off


def boundary_matrices(config: PointConfig, lam: float, lam0: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Boundary matrices of the point-interaction family

    Args:
        config: interaction centres
        lam: λ ≥ 0
        lam0: reference shift λ° > 0

    Returns:
        (M_λ, M°_λ, L°) with L° = M_{λ°} and M°_λ = M_λ − L°
    """
    if not lam0 > 0:
        raise RejectedInputError(f"λ° must be positive, got {lam0}")
    m_lam = weyl_matrix(config, lam)
    reference = weyl_matrix(config, lam0)
    return m_lam, m_lam - reference, reference


def gamma0(config: PointConfig) -> float:
    """Smallest eigenvalue of M₀"""
    return float(np.linalg.eigvalsh(weyl_matrix(config, 0.0))[0])


def gram_block(distances: np.ndarray, lam: float, mu: float) -> np.ndarray:
    """∫G_λ(x − y)G_μ(x − y')dx for λ, μ ≥ 0 with λ + μ > 0"""
    a, b = math.sqrt(lam), math.sqrt(mu)
    if a + b == 0.0:
        raise RejectedInputError("Green Gram matrix of G_0 with itself is not finite")
    # e^{−br}(1 − e^{−(a−b)r})/((a−b)r) written through expm1, exact as a → b
    delta = a - b
    r = distances
    if delta == 0.0:
        factor = np.ones_like(r)
    else:
        with np.errstate(invalid='ignore'):
            factor = np.where(r > 0, -np.expm1(-delta * r) / (delta * np.where(r > 0, r, 1.0)), 1.0)
    return np.exp(-b * r) * factor / (FOUR_PI * (a + b))


def power_kernel(distances: np.ndarray, mu: float, order: int) -> np.ndarray:
    """
    Kernel of μ^{m−1}(−Δ + μ)^{-m} at the given distances, m = order ≥ 2

    Written as (√μ/4π)e^{−z}Σ_k c_k z^{n−k} with z = √μ r and n = m − 2, the
    half-integer Bessel polynomial, summed in log space so high orders stay finite.
    """
    if order < 2:
        raise RejectedInputError(f"power kernels start at order 2, got {order}")
    if not mu > 0:
        raise RejectedInputError(f"power kernels need μ > 0, got {mu}")
    root = math.sqrt(mu)
    n = order - 2
    k = np.arange(n + 1)
    log_c = ((1 - order - k) * math.log(2.0) + special.gammaln(n + k + 1) - special.gammaln(n + 2)
             - special.gammaln(k + 1) - special.gammaln(n - k + 1))
    z = root * np.asarray(distances, dtype=float)
    powers = (n - k).reshape((-1,) + (1,) * z.ndim)
    with np.errstate(divide='ignore', invalid='ignore'):
        log_z = np.log(z)
        log_terms = np.where(powers == 0, 0.0, powers * log_z[None, ...]) + log_c.reshape(powers.shape)
    return root / FOUR_PI * np.exp(special.logsumexp(log_terms, axis=0) - z)


def green_gram(config: PointConfig, lam: float, mu: float) -> np.ndarray:
    """
    Gram matrix G_μᵀG_λ of the Green charge maps

    Args:
        config: interaction centres
        lam: λ > 0
        mu: μ > 0

    Returns:
        symmetric n×n matrix, diagonal 1/(4π(√λ + √μ))
    """
    if not (lam > 0 and mu > 0):
        raise RejectedInputError(f"Green Gram needs λ, μ > 0, got λ={lam}, μ={mu}")
    return gram_block(config.distances, lam, mu)


def green_gram_quadrature(config: PointConfig, lam: float, mu: float) -> np.ndarray:
    """Green Gram matrix by adaptive quadrature in bipolar coordinates"""
    if not (lam > 0 and mu > 0):
        raise RejectedInputError(f"Green Gram needs λ, μ > 0, got λ={lam}, μ={mu}")
    a, b = math.sqrt(lam), math.sqrt(mu)
    n = config.n
    gram = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            r = config.distances[i, j]
            if r == 0.0:
                value, _ = integrate.quad(lambda rho: math.exp(-(a + b) * rho) / FOUR_PI, 0.0, np.inf,
                                          epsabs=0.0, epsrel=1e-12)
            else:
                value, _ = integrate.dblquad(
                    lambda rho2, rho1: math.exp(-a * rho1 - b * rho2),
                    0.0, np.inf,
                    lambda rho1: abs(rho1 - r), lambda rho1: rho1 + r,
                    epsabs=0.0, epsrel=1e-10,
                )
                value *= 2.0 * math.pi / r / FOUR_PI ** 2
            gram[i, j] = gram[j, i] = value
    return gram
