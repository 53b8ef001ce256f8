"""
Green-combination states u = Σ_j μ_j^{m_j−1}(−Δ + μ_j)^{-m_j}δ_Y ζ_j and the symbolic resolvent step
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import RejectedInputError, SingularPointError, UnsupportedRelationError, UnsupportedStepError
from ..extensions.config import SolverConfig
from ..relations import MonotoneRelation, solve_inclusion
from .boundary import FOUR_PI, PointConfig, gamma0, gram_block, power_kernel, weyl_matrix

logger = logging.getLogger(__name__)


class Term(NamedTuple):
    """μ^{m−1}(−Δ + μ)^{-m}δ_Y ζ; order 1 is the Green combination G_μζ"""
    mu: float
    charges: np.ndarray
    order: int = 1


@dataclass(frozen=True, eq=False)
class GreenState:
    """Finite combination of Green kernels and their resolvent powers, one term per (exponent, order)"""

    n: int
    terms: Tuple[Term, ...] = ()
    remainder: bool = False

    @classmethod
    def zero(cls, n: int) -> 'GreenState':
        return cls(n)

    @classmethod
    def single(cls, mu: float, charges: Sequence[float]) -> 'GreenState':
        charges = np.asarray(charges, dtype=float)
        return cls(len(charges)).combine([(mu, charges)])

    def combine(self, terms: Sequence[tuple], prune_threshold: float = 0.0) -> 'GreenState':
        """New state with extra (μ, ζ) or (μ, ζ, order) terms; equal keys merged, small charges dropped"""
        merged: Dict[Tuple[float, int], np.ndarray] = {}
        for item in list(self.terms) + list(terms):
            term = Term(*item)
            mu, order = float(term.mu), int(term.order)
            if mu < 0:
                raise RejectedInputError(f"Green exponents must be nonnegative, got {mu}")
            if order < 1 or (order > 1 and mu == 0.0):
                raise RejectedInputError(f"order {order} is not available at exponent {mu}")
            charges = np.asarray(term.charges, dtype=float)
            if charges.shape != (self.n,):
                raise RejectedInputError(f"charge vector must have length {self.n}, got {charges.shape}")
            if not np.all(np.isfinite(charges)):
                raise RejectedInputError("charge vector is not finite")
            key = (mu, order)
            merged[key] = merged[key] + charges if key in merged else charges.copy()
        kept = tuple(
            Term(mu, charges, order) for (mu, order), charges in sorted(merged.items())
            if np.linalg.norm(charges) > prune_threshold
        )
        return GreenState(self.n, kept, self.remainder)

    @property
    def exponents(self) -> List[float]:
        return sorted({term.mu for term in self.terms})

    @property
    def max_order(self) -> int:
        return max((term.order for term in self.terms), default=0)

    def __add__(self, other: 'GreenState') -> 'GreenState':
        if other.n != self.n:
            raise RejectedInputError(f"cannot add states on {self.n} and {other.n} points")
        return GreenState(self.n, self.terms, self.remainder or other.remainder).combine(other.terms)

    def __sub__(self, other: 'GreenState') -> 'GreenState':
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> 'GreenState':
        return GreenState(self.n, tuple(Term(t.mu, factor * t.charges, t.order) for t in self.terms), self.remainder)

    def to_dict(self) -> List[dict]:
        out = []
        for term in self.terms:
            entry = {'mu': term.mu, 'charges': term.charges.tolist()}
            if term.order > 1:
                entry['order'] = term.order
            out.append(entry)
        return out

    @classmethod
    def from_dict(cls, n: int, spec: Sequence[dict]) -> 'GreenState':
        return cls(n).combine([(t['mu'], t['charges'], t.get('order', 1)) for t in spec])


def _term_kernel(distances: np.ndarray, term: Term) -> np.ndarray:
    """Pointwise kernel of one term at positive distances"""
    if term.order == 1:
        return np.exp(-math.sqrt(term.mu) * distances) / (FOUR_PI * distances)
    return power_kernel(distances, term.mu, term.order)


def _inner_block(distances: np.ndarray, a: Term, b: Term) -> np.ndarray:
    """L² inner products of the kernels of two terms centred at pairs of points"""
    if a.order == 1 and b.order == 1:
        return gram_block(distances, a.mu, b.mu)
    if a.mu == b.mu:
        return power_kernel(distances, a.mu, a.order + b.order) / a.mu
    if a.order > 1 and b.order > 1:
        raise UnsupportedStepError("higher-order terms at different exponents have no closed inner product")
    low, high = (a, b) if a.order == 1 else (b, a)
    # partial fractions of (x + μ)^{-1}λ^{q−1}(x + λ)^{-q}
    lam, q, d = high.mu, high.order, high.mu - low.mu
    ratio = lam / d
    block = ratio ** (q - 1) * gram_block(distances, lam, low.mu)
    for j in range(2, q + 1):
        block = block - ratio ** (q - j) / d * power_kernel(distances, lam, j)
    return block


def green_eval(config: PointConfig, state: Union[GreenState, Tuple[float, Sequence[float]]],
               x: Sequence) -> Union[float, np.ndarray]:
    """
    Pointwise value of a Green combination; order-1 terms give Σ_y e^{−√μ|x − y|}/(4π|x − y|) ζ_y

    Args:
        config: interaction centres
        state: GreenState or a single (λ, ξ) term
        x: one point (3,) or several points (k, 3), none in Y

    Returns:
        float for one point, array for several
    """
    if not isinstance(state, GreenState):
        mu, charges = state
        state = GreenState.single(mu, charges)
    points = np.asarray(x, dtype=float)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    r = np.linalg.norm(points[:, None, :] - config.points[None, :, :], axis=2)
    if np.any(r <= 1e-12):
        raise SingularPointError("Green combination evaluated at an interaction centre")
    values = np.zeros(points.shape[0])
    for term in state.terms:
        values += _term_kernel(r, term) @ term.charges
    return float(values[0]) if single else values


def green_norm(config: PointConfig, state: GreenState) -> float:
    """L²(ℝ³) norm of a Green combination through Gram matrices"""
    total = 0.0
    terms = state.terms
    for i, a in enumerate(terms):
        for j in range(i, len(terms)):
            b = terms[j]
            value = float(a.charges @ _inner_block(config.distances, a, b) @ b.charges)
            total += value if i == j else 2.0 * value
    return math.sqrt(max(total, 0.0))


def check_type_gamma0(theta: MonotoneRelation, config: PointConfig, tol: float = 1e-12) -> float:
    """
    Require Θ to be of type γ₀

    Relations with domain {0} have every type and always pass.

    Returns:
        γ₀ of the configuration

    Raises:
        UnsupportedRelationError: the declared type of Θ exceeds γ₀
    """
    if theta.dim != config.n:
        raise RejectedInputError(f"relation acts on ℝ^{theta.dim}, configuration has {config.n} points")
    bound = gamma0(config)
    if not theta.domain_is_origin and theta.type_constant > bound + tol:
        raise UnsupportedRelationError(
            f"relation type {theta.type_constant:.6g} exceeds γ₀={bound:.6g}"
        )
    return bound


@dataclass
class GreenStep:
    """Result of one resolvent step: new state and the charges ξ of the appended G_λ term"""
    state: GreenState
    lam: float
    charges: np.ndarray
    iterations: int


def resolvent_step_green(config: PointConfig, theta: MonotoneRelation, lam: float, state: GreenState,
                         solver: Optional[SolverConfig] = None) -> GreenStep:
    """
    ((−Δ)_Θ + λ)^{-1} applied to a Green combination

    R°_λ maps G_μζ to (G_μ − G_λ)ζ/(λ − μ) for μ ≠ λ and raises the order of
    terms at μ = λ by one; the singular part G_λξ solves η ∈ (Θ + M_λ)(ξ)
    with η = τR°_λu.

    Raises:
        UnsupportedStepError: a term of order above 1 sits at an exponent other than λ,
            or the state has a regular remainder
    """
    solver = solver or SolverConfig()
    if not lam > 0:
        raise RejectedInputError(f"λ must be positive, got {lam}")
    if state.remainder:
        raise UnsupportedStepError("state carries a regular remainder with no symbolic resolvent")
    for term in state.terms:
        if term.order > 1 and term.mu != lam:
            raise UnsupportedStepError(
                f"order-{term.order} term at μ={term.mu} can only be stepped with λ={term.mu}"
            )
    check_type_gamma0(theta, config)

    free_terms: List[tuple] = []
    eta = np.zeros(config.n)
    for mu, charges, order in state.terms:
        if mu == lam:
            free_terms.append((lam, charges / lam, order + 1))
            eta += power_kernel(config.distances, lam, order + 1) @ charges / lam
        else:
            free_terms.append((mu, charges / (lam - mu)))
            free_terms.append((lam, -charges / (lam - mu)))
            eta += gram_block(config.distances, lam, mu) @ charges

    result = solve_inclusion(
        theta, weyl_matrix(config, lam), eta,
        tol=solver.inclusion_tol, max_iterations=solver.max_iterations, step=solver.step,
    )
    new_state = GreenState(config.n, (), state.remainder).combine(
        free_terms + [(lam, result.xi)], solver.prune_threshold
    )
    return GreenStep(new_state, lam, result.xi, result.iterations)


@dataclass
class GreenTrajectory:
    """Green-combination states of an implicit-Euler run with the charges of every step"""
    lam: float
    times: List[float]
    states: List[GreenState]
    charges: List[np.ndarray] = field(default_factory=list)

    def norms(self, config: PointConfig) -> np.ndarray:
        return np.array([green_norm(config, s) for s in self.states])


def evolve_green(config: PointConfig, theta: MonotoneRelation, h: float, steps: int, state0: GreenState,
                 solver: Optional[SolverConfig] = None) -> GreenTrajectory:
    """
    Implicit-Euler run u_{k+1} = λ((−Δ)_Θ + λ)^{-1}u_k with λ = 1/h, reaching t = steps·h

    Each step raises the order of the terms at λ, so repeated steps never collide.
    A term at μ ≠ λ has its coefficient multiplied by λ/(λ − μ) every step while
    the λ terms cancel the growth; runs whose growth exceeds max_amplification
    are refused.

    Raises:
        UnsupportedStepError: coefficient growth over the run exceeds solver.max_amplification
    """
    solver = solver or SolverConfig()
    if not h > 0:
        raise RejectedInputError(f"time step must be positive, got {h}")
    if steps < 1:
        raise RejectedInputError(f"at least one step is required, got {steps}")
    lam = 1.0 / h
    for mu in state0.exponents:
        if mu == lam:
            continue
        growth = steps * math.log(abs(lam / (lam - mu)))
        if growth > math.log(solver.max_amplification):
            raise UnsupportedStepError(
                f"term at μ={mu} grows by {math.exp(min(growth, 700.0)):.3g} over {steps} steps of λ={lam}; "
                f"shorten the run or start from exponents far from λ"
            )
    state = state0
    trajectory = GreenTrajectory(lam, [0.0], [state])
    for k in range(1, steps + 1):
        result = resolvent_step_green(config, theta, lam, state.scale(lam), solver)
        state = result.state
        trajectory.times.append(k * h)
        trajectory.states.append(state)
        trajectory.charges.append(result.charges)
    logger.info("Green evolution reached t=%.6g with %d terms (max order %d)",
                trajectory.times[-1], len(state.terms), state.max_order)
    return trajectory
