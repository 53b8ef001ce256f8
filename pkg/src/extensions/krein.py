"""
Nonlinear Kreĭn resolvent: extensions A_Θ of a symmetric restriction of A°
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..errors import (
    InvalidShiftError,
    RejectedInputError,
    UnsupportedConfigurationError,
)
from ..hilbert import SelfAdjointGenerator
from ..relations import ConvexSpec, InclusionResult, MonotoneRelation, sample_graph, solve_inclusion
from .config import SolverConfig

logger = logging.getLogger(__name__)


@dataclass
class GraphPoint:
    """Decomposed element u = u° + G°ξ of 𝒟(A_Θ) with its action w = A_Θ(u)"""
    u_circ: np.ndarray
    xi: np.ndarray
    xi_tilde: np.ndarray
    u: np.ndarray
    w: np.ndarray

    def to_dict(self) -> dict:
        return {
            'u_circ': self.u_circ.tolist(),
            'xi': self.xi.tolist(),
            'xi_tilde': self.xi_tilde.tolist(),
            'u': self.u.tolist(),
            'w': self.w.tolist(),
        }


@dataclass
class Decomposition:
    """Resolvent output u with the decomposition (u°, ξ) found by the boundary solve"""
    u: np.ndarray
    u_circ: np.ndarray
    xi: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True, eq=False)
class KreinExtension:
    """
    Data (A°, τ, λ°) of the extension family A_Θ

    G_λ = R°_λ τᵀ is the charge map and M°_λ = τ(G° − G_λ) the Weyl-type
    matrix, both available for every λ > ω.
    """

    generator: SelfAdjointGenerator
    trace: np.ndarray
    lam0: float
    green0: np.ndarray
    frame_constant: float
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def dim(self) -> int:
        return self.generator.dim

    @property
    def boundary_dim(self) -> int:
        return self.trace.shape[0]

    def green(self, lam: float) -> np.ndarray:
        """Charge map G_λ = R°_λ τᵀ as a dim×m matrix"""
        if lam == self.lam0:
            return self.green0
        return self.generator.resolvent_apply(lam, self.trace.T)

    def weyl(self, lam: float) -> np.ndarray:
        """M°_λ = τ(G° − G_λ), symmetrized"""
        if lam == self.lam0:
            return np.zeros((self.boundary_dim, self.boundary_dim))
        m = self.trace @ (self.green0 - self.green(lam))
        return 0.5 * (m + m.T)

    def coercivity_bound(self, lam: float) -> float:
        """Lower bound g₀²(λ − λ°)(λ° − ω)/(λ − ω) of M°_λ"""
        omega = self.generator.lower_bound
        return self.frame_constant ** 2 * (lam - self.lam0) * (self.lam0 - omega) / (lam - omega)

    def _check_lambda(self, lam: float) -> None:
        if not lam > self.lam0:
            raise InvalidShiftError(f"λ={lam} must exceed λ°={self.lam0}")

    def solve_boundary_inclusion(self, theta: MonotoneRelation, lam: float,
                                 eta: np.ndarray) -> InclusionResult:
        """
        Find ξ with η − M°_λ ξ ∈ Θ(ξ)

        Args:
            theta: boundary relation on ℝ^m
            lam: λ > λ°
            eta: boundary datum, usually G_λᵀu

        Returns:
            InclusionResult with ξ, iteration count and final step
        """
        self._check_lambda(lam)
        self._check_relation(theta)
        return solve_inclusion(
            theta, self.weyl(lam), eta,
            tol=self.config.inclusion_tol,
            max_iterations=self.config.max_iterations,
            step=self.config.step,
        )

    def resolvent_decomposed(self, theta: MonotoneRelation, lam: float, u: np.ndarray) -> Decomposition:
        """(A_Θ + λ)^{-1}u together with the decomposition of the result"""
        self._check_lambda(lam)
        u = self._check_state(u)
        g_lam = self.green(lam)
        result = self.solve_boundary_inclusion(theta, lam, g_lam.T @ u)
        free = self.generator.resolvent_apply(lam, u)
        out = free + g_lam @ result.xi
        u_circ = out - self.green0 @ result.xi
        return Decomposition(out, u_circ, result.xi, result.iterations, result.residual)

    def resolvent(self, theta: MonotoneRelation, lam: float, u: np.ndarray) -> np.ndarray:
        """R^Θ_λ(u) = R°_λu + G_λ ξ with η − M°_λξ ∈ Θ(ξ), η = G_λᵀu"""
        return self.resolvent_decomposed(theta, lam, u).u

    def graph_point(self, theta: MonotoneRelation, pair: Tuple[np.ndarray, np.ndarray],
                    kernel: Optional[np.ndarray] = None) -> GraphPoint:
        """
        Assemble an element of the graph of A_Θ from a pair (ξ, ξ̃) ∈ Θ

        Args:
            theta: boundary relation
            pair: (ξ, ξ̃) in the graph of Θ
            kernel: optional vector projected onto ker τ and added to u°

        Returns:
            GraphPoint with τu° = ξ̃, u = u° + G°ξ and w = A°u° − λ°G°ξ
        """
        xi, xi_tilde = (np.asarray(v, dtype=float) for v in pair)
        residual = theta.contains(xi, xi_tilde)
        if residual > self.config.pair_tol:
            raise RejectedInputError(f"pair is not in the graph of Θ (residual {residual:.3e})")
        pinv = linalg.pinv(self.trace)
        u_circ = pinv @ xi_tilde
        if kernel is not None:
            kernel = self._check_state(kernel)
            u_circ = u_circ + kernel - pinv @ (self.trace @ kernel)
        singular = self.green0 @ xi
        u = u_circ + singular
        w = self.generator.matrix @ u_circ - self.lam0 * singular
        return GraphPoint(u_circ, xi, xi_tilde, u, w)

    def sample_graph_points(self, theta: MonotoneRelation, n: int, seed: int = 0,
                            box: float = 1.0) -> List[GraphPoint]:
        """GraphPoints from sampled pairs of Θ plus random components along ker τ"""
        pairs = sample_graph(theta, n, box, seed)
        rng = np.random.default_rng([seed, 1])
        kernels = rng.uniform(-box, box, size=(n, self.dim))
        return [self.graph_point(theta, pair, kernel) for pair, kernel in zip(pairs, kernels)]

    def energy(self, phi: ConvexSpec, point) -> float:
        """
        Φ = ½‖(A° + λ°)^{1/2}u°‖² + φ(ξ) on a decomposition

        Args:
            phi: convex potential of Θ
            point: any object carrying u_circ and xi (GraphPoint, Decomposition)

        Returns:
            energy value, math.inf when ξ lies outside the domain of φ
        """
        boundary = phi(point.xi)
        if not math.isfinite(boundary):
            return math.inf
        return self.generator.half_power_energy(self.lam0, point.u_circ) + boundary

    def equilibrium(self, theta: MonotoneRelation) -> np.ndarray:
        """
        Zero u_∞ = (λ°A°⁻¹ + 1)G°ξ of A_Θ for a strictly positive A° and λ° ∈ (ω, 0)

        ξ solves −M°_0 ξ ∈ Θ(ξ), so that τu° = λ°G_0ᵀG°ξ with u° = λ°A°⁻¹G°ξ.
        """
        if not self.generator.lower_bound < 0:
            raise UnsupportedConfigurationError("equilibrium needs a strictly positive A° (ω < 0)")
        if not self.lam0 < 0:
            raise UnsupportedConfigurationError(f"equilibrium needs λ° < 0, got {self.lam0}")
        if theta.contains_origin():
            return np.zeros(self.dim)
        result = solve_inclusion(
            theta, self.weyl(0.0), np.zeros(self.boundary_dim),
            tol=self.config.inclusion_tol,
            max_iterations=self.config.max_iterations,
            step=self.config.step,
        )
        singular = self.green0 @ result.xi
        u_inf = self.lam0 * self.generator.inverse_apply(singular) + singular
        logger.info("Equilibrium found: ‖ξ‖=%.6g, ‖u_∞‖=%.6g", np.linalg.norm(result.xi), np.linalg.norm(u_inf))
        return u_inf

    def base_resolvent(self, theta: MonotoneRelation, u: np.ndarray) -> np.ndarray:
        """(A_Θ + λ°)^{-1}u = R°_{λ°}u + G°Θ^{-1}(G°ᵀu), available when Θ^{-1} is single-valued"""
        u = self._check_state(u)
        xi = theta.inverse_apply(self.green0.T @ u)
        return self.generator.resolvent_apply(self.lam0, u) + self.green0 @ xi

    def linear_krein_resolvent(self, b: np.ndarray, lam: float) -> np.ndarray:
        """Dense R°_λ + G_λ(B + M°_λ)^{-1}G_λᵀ for a linear boundary relation B"""
        self._check_lambda(lam)
        g_lam = self.green(lam)
        inner = np.linalg.solve(np.asarray(b, dtype=float) + self.weyl(lam), g_lam.T)
        return self.generator.resolvent_matrix(lam) + g_lam @ inner

    def to_dict(self) -> dict:
        return {
            'generator': self.generator.to_dict(),
            'boundary_dim': self.boundary_dim,
            'lam0': self.lam0,
            'frame_constant': self.frame_constant,
        }

    def _check_state(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dim,):
            raise RejectedInputError(f"expected a state of length {self.dim}, got shape {u.shape}")
        return u

    def _check_relation(self, theta: MonotoneRelation) -> None:
        if theta.dim != self.boundary_dim:
            raise RejectedInputError(
                f"relation acts on ℝ^{theta.dim}, boundary space is ℝ^{self.boundary_dim}"
            )


def build_extension(generator: SelfAdjointGenerator, trace: Sequence, lam0: float,
                    config: Optional[SolverConfig] = None) -> KreinExtension:
    """
    Assemble the extension data and cache G° = G_{λ°}

    Args:
        generator: self-adjoint reference operator A°
        trace: m×dim matrix τ of full row rank
        lam0: reference shift λ° > ω
        config: solver configuration

    Returns:
        KreinExtension with frame constant g₀ = σ_min(G°)
    """
    config = config or SolverConfig()
    trace = np.array(trace, dtype=float)
    if trace.ndim == 1:
        trace = trace[None, :]
    if trace.ndim != 2 or trace.shape[1] != generator.dim:
        raise RejectedInputError(f"trace must be m×{generator.dim}, got shape {trace.shape}")
    if trace.shape[0] > generator.dim:
        raise RejectedInputError("trace has more rows than the state dimension")
    singular_values = linalg.svdvals(trace)
    if singular_values[-1] <= config.rank_tol:
        raise RejectedInputError(
            f"trace is rank deficient (smallest singular value {singular_values[-1]:.3e})"
        )
    generator.check_shift(lam0)
    green0 = generator.resolvent_apply(lam0, trace.T)
    trace.setflags(write=False)
    frame_constant = float(linalg.svdvals(green0)[-1])
    logger.debug(
        "Built extension: dim=%d, m=%d, λ°=%.6g, g₀=%.6g",
        generator.dim, trace.shape[0], lam0, frame_constant,
    )
    return KreinExtension(generator, trace, float(lam0), green0, frame_constant, config)
