"""
Residual checks of the resolvent identities on a λ-grid
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..errors import InvalidShiftError, RejectedInputError, UnsupportedRelationError
from ..relations import LinearRelation, MonotoneRelation
from .config import ToleranceSet
from .krein import KreinExtension

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    """Maximal residual of one identity, compared with its threshold"""
    name: str
    residual: float
    threshold: float
    lam: Optional[float] = None
    mu: Optional[float] = None
    active_fraction: Optional[float] = None    # share of samples with ξ ≠ 0

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.threshold)

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'lam': self.lam,
            'mu': self.mu,
            'residual': self.residual,
            'threshold': self.threshold,
            'passed': self.passed,
            'active_fraction': self.active_fraction,
        }


@dataclass
class VerificationReport:
    """Collection of checks with the sampling metadata that produced them"""
    lam_grid: List[float]
    samples: int
    seed: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def worst(self, name: str) -> float:
        """Largest residual over all checks with the given name"""
        values = [c.residual for c in self.checks if c.name == name]
        return max(values) if values else 0.0

    def active_fraction(self) -> Optional[float]:
        """Smallest share of sampled states with a nonzero boundary charge, None if no check samples states"""
        values = [c.active_fraction for c in self.checks if c.active_fraction is not None]
        return min(values) if values else None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([check.to_dict() for check in self.checks])

    def to_dict(self) -> dict:
        return {
            'lam_grid': self.lam_grid,
            'samples': self.samples,
            'seed': self.seed,
            'passed': self.passed,
            'active_fraction': self.active_fraction(),
            'checks': [check.to_dict() for check in self.checks],
        }


def is_friedrichs(theta: MonotoneRelation) -> bool:
    """Θ = ∂I_{0}, whose extension is A° itself"""
    return theta.domain_is_origin


def sample_states(ext: KreinExtension, lam: float, samples: int, rng: np.random.Generator,
                  boundary_scale: float = 1.0) -> np.ndarray:
    """
    Random states whose boundary data η = G_λᵀu have norms log-uniform in
    [boundary_scale/10, 10·boundary_scale]

    Args:
        ext: extension data
        lam: shift of the resolvent the states are fed to
        samples: number of states
        rng: random stream
        boundary_scale: centre of the η-norm range, the scale at which Θ switches branches

    Returns:
        samples×dim array
    """
    directions = rng.standard_normal((samples, ext.dim))
    eta_norms = np.linalg.norm(directions @ ext.green(lam), axis=1)
    targets = boundary_scale * 10.0 ** rng.uniform(-1.0, 1.0, samples)
    factors = np.where(eta_norms > 0, targets / np.where(eta_norms > 0, eta_norms, 1.0), 1.0)
    return directions * factors[:, None]


def _check_at(ext: KreinExtension, theta: MonotoneRelation, lam: float, samples: int,
              seed: int, index: int, tolerances: ToleranceSet,
              boundary_scale: float = 1.0) -> List[CheckResult]:
    rng = np.random.default_rng([seed, index])
    checks = []

    m = ext.weyl(lam)
    raw = ext.trace @ (ext.green0 - ext.green(lam))
    symmetry = float(np.linalg.norm(raw - raw.T) / max(np.linalg.norm(raw), 1.0))
    checks.append(CheckResult('weyl_symmetry', symmetry, tolerances.symmetry, lam))

    bound = ext.coercivity_bound(lam)
    xis = rng.standard_normal((samples, ext.boundary_dim))
    quotients = np.einsum('ij,jk,ik->i', xis, m, xis) / np.einsum('ij,ij->i', xis, xis)
    checks.append(CheckResult('coercivity', float(max(0.0, bound - quotients.min())), tolerances.coercivity, lam))

    us = sample_states(ext, lam, samples, rng, boundary_scale)
    vs = sample_states(ext, lam, samples, rng, boundary_scale)
    monotone = 0.0
    lipschitz = 0.0
    active = 0
    for u, v in zip(us, vs):
        du = ext.resolvent_decomposed(theta, lam, u)
        dv = ext.resolvent_decomposed(theta, lam, v)
        ru, rv = du.u, dv.u
        active += int(np.any(du.xi != 0.0)) + int(np.any(dv.xi != 0.0))
        monotone = max(monotone, -float((ru - rv) @ (u - v)))
        lipschitz = max(lipschitz, float(np.linalg.norm(ru - rv) - np.linalg.norm(u - v) / (lam - ext.lam0)))
    fraction = active / (2 * samples)
    checks.append(CheckResult('monotonicity', monotone, tolerances.monotonicity, lam, active_fraction=fraction))
    checks.append(CheckResult('lipschitz', lipschitz, tolerances.lipschitz, lam))

    points = ext.sample_graph_points(theta, samples, seed)
    round_trip = max(
        float(np.linalg.norm(ext.resolvent(theta, lam, p.w + lam * p.u) - p.u)) for p in points
    )
    checks.append(CheckResult('round_trip', round_trip, tolerances.round_trip, lam))

    if isinstance(theta, LinearRelation):
        dense = ext.linear_krein_resolvent(theta.matrix, lam)
        linear = max(float(np.linalg.norm(ext.resolvent(theta, lam, u) - dense @ u)) for u in us)
        checks.append(CheckResult('linear_recovery', linear, tolerances.linear_recovery, lam))

    if is_friedrichs(theta):
        free = max(
            float(np.linalg.norm(ext.resolvent(theta, lam, u) - ext.generator.resolvent_apply(lam, u)))
            for u in us
        )
        checks.append(CheckResult('friedrichs_recovery', free, tolerances.friedrichs_recovery, lam))

    try:
        base = 0.0
        for u in us:
            x = ext.base_resolvent(theta, u)
            base = max(base, float(np.linalg.norm(ext.resolvent(theta, lam, u + (lam - ext.lam0) * x) - x)))
        checks.append(CheckResult('base_resolvent', base, tolerances.base_resolvent, lam))
    except (UnsupportedRelationError, InvalidShiftError):
        pass

    logger.info("λ=%.6g: %d checks, worst residual %.3e, active fraction %.2f",
                lam, len(checks), max(c.residual for c in checks), fraction)
    return checks


def _check_pair(ext: KreinExtension, theta: MonotoneRelation, lam: float, mu: float, samples: int,
                seed: int, index: int, tolerances: ToleranceSet,
                boundary_scale: float = 1.0) -> List[CheckResult]:
    rng = np.random.default_rng([seed, index])
    weyl = ext.weyl(lam) - ext.weyl(mu) - (lam - mu) * ext.green(mu).T @ ext.green(lam)
    scale = max(np.linalg.norm(ext.weyl(lam)), 1.0)
    checks = [CheckResult('weyl_identity', float(np.linalg.norm(weyl) / scale), tolerances.weyl_identity, lam, mu)]

    identity = 0.0
    active = 0
    for u in sample_states(ext, lam, samples, rng, boundary_scale):
        d_lam = ext.resolvent_decomposed(theta, lam, u)
        r_mu = ext.resolvent(theta, mu, u - (lam - mu) * d_lam.u)
        identity = max(identity, float(np.linalg.norm(d_lam.u - r_mu)))
        active += int(np.any(d_lam.xi != 0.0))
    checks.append(CheckResult('resolvent_identity', identity, tolerances.resolvent_identity, lam, mu,
                              active_fraction=active / samples))

    independence = 0.0
    for p in ext.sample_graph_points(theta, samples, seed):
        d_lam = ext.resolvent_decomposed(theta, lam, p.w + lam * p.u)
        d_mu = ext.resolvent_decomposed(theta, mu, p.w + mu * p.u)
        w_lam = ext.generator.matrix @ d_lam.u_circ - ext.lam0 * ext.green0 @ d_lam.xi
        w_mu = ext.generator.matrix @ d_mu.u_circ - ext.lam0 * ext.green0 @ d_mu.xi
        independence = max(
            independence,
            float(np.linalg.norm(w_lam - w_mu)),
            float(np.linalg.norm(d_lam.xi - d_mu.xi)),
        )
    checks.append(CheckResult('lambda_independence', independence, tolerances.lambda_independence, lam, mu))
    return checks


def sub_potential_residual(ext: KreinExtension, theta: MonotoneRelation, samples: int,
                           seed: int) -> Optional[float]:
    """
    Largest violation of Φ(q) ≥ Φ(p) + ⟨w + λ°u, v − u⟩ over sampled decompositions

    Returns:
        None when Θ has no known convex potential
    """
    phi = theta.potential()
    if phi is None or theta.type_constant > 0:
        return None
    points = ext.sample_graph_points(theta, samples, seed)
    others = ext.sample_graph_points(theta, samples, seed + 1)
    energies = np.array([ext.energy(phi, p) for p in points])
    other_energies = np.array([ext.energy(phi, q) for q in others])
    worst = 0.0
    for p, energy_p in zip(points, energies):
        slopes = np.array([(p.w + ext.lam0 * p.u) @ (p.u - q.u) for q in others])
        worst = max(worst, float(np.max(energy_p - other_energies - slopes)))
    return worst


def verify_identities(ext: KreinExtension, theta: MonotoneRelation, lam_grid: Sequence[float],
                      samples: int = 20, seed: int = 0, tolerances: Optional[ToleranceSet] = None,
                      workers: int = 1, boundary_scale: float = 1.0) -> VerificationReport:
    """
    Evaluate identity residuals of R^Θ_λ on a λ-grid

    Args:
        ext: extension data
        theta: boundary relation
        lam_grid: shifts, all above λ°
        samples: random vectors and graph points per check
        seed: base seed; every grid task derives its own stream from it
        tolerances: pass/fail thresholds
        workers: thread-pool size
        boundary_scale: centre of the sampled boundary-datum norms

    Returns:
        VerificationReport ordered by λ, then by (λ, μ) pairs
    """
    tolerances = tolerances or ToleranceSet()
    if not boundary_scale > 0:
        raise RejectedInputError(f"boundary_scale must be positive, got {boundary_scale}")
    grid = sorted(float(lam) for lam in lam_grid)
    for lam in grid:
        if not lam > ext.lam0:
            raise InvalidShiftError(f"grid point {lam} must exceed λ°={ext.lam0}")
    pairs = list(combinations(grid, 2))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        singles = [
            executor.submit(_check_at, ext, theta, lam, samples, seed, i, tolerances, boundary_scale)
            for i, lam in enumerate(grid)
        ]
        doubles = [
            executor.submit(_check_pair, ext, theta, lam, mu, samples, seed, len(grid) + i, tolerances,
                            boundary_scale)
            for i, (lam, mu) in enumerate(pairs)
        ]
        checks = [check for future in singles + doubles for check in future.result()]

    sub_potential = sub_potential_residual(ext, theta, samples, seed)
    if sub_potential is not None:
        checks.append(CheckResult('sub_potential', sub_potential, tolerances.sub_potential))

    report = VerificationReport(grid, samples, seed, checks)
    logger.info("Verification %s: %d checks, active fraction %s", "passed" if report.passed else "FAILED",
                len(checks), report.active_fraction())
    return report
