"""
Implicit-Euler evolution of the nonlinear semigroup generated by −A_Θ
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import RejectedInputError, StepSizeError
from ..relations import ConvexSpec, MonotoneRelation, YosidaRelation
from .krein import Decomposition, KreinExtension, build_extension

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    """States u_k at times k·h with per-step diagnostics"""
    h: float
    times: np.ndarray
    states: np.ndarray
    increments: np.ndarray
    charges: List[np.ndarray]
    residuals: np.ndarray
    energies: Optional[np.ndarray] = None
    shift: bool = False

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_frame(self) -> pd.DataFrame:
        """Columns t, u_0..u_{d−1}, inc_norm and, when recorded, energy"""
        frame = pd.DataFrame(self.states, columns=[f"u_{i}" for i in range(self.states.shape[1])])
        frame.insert(0, 't', self.times)
        frame['inc_norm'] = self.increments
        if self.energies is not None:
            frame['energy'] = self.energies
        return frame

    def to_csv(self, path: Union[str, Path]) -> None:
        self.to_frame().to_csv(path, index=False, float_format='%.17g')


@dataclass
class Run:
    """One evolution of a ladder: extension, relation and initial state"""
    label: str
    ext: KreinExtension
    theta: MonotoneRelation
    u0: np.ndarray
    shift: bool = False


def step_shift(ext: KreinExtension, h: float, shift: bool = False) -> float:
    """Resolvent shift λ of one implicit-Euler step"""
    if not h > 0:
        raise StepSizeError(f"time step must be positive, got {h}")
    if shift:
        return 1.0 / h + ext.lam0
    if h * ext.lam0 >= 1.0:
        raise StepSizeError(f"time step h={h} violates h·λ° < 1 for λ°={ext.lam0}")
    return 1.0 / h


def step_decomposed(ext: KreinExtension, theta: MonotoneRelation, h: float, u: np.ndarray,
                    shift: bool = False) -> Decomposition:
    """One implicit-Euler step with the decomposition of the new state"""
    lam = step_shift(ext, h, shift)
    return ext.resolvent_decomposed(theta, lam, np.asarray(u, dtype=float) / h)


def step(ext: KreinExtension, theta: MonotoneRelation, h: float, u: np.ndarray,
         shift: bool = False) -> np.ndarray:
    """
    Implicit-Euler step u' = (A_Θ + 1/h)^{-1}(u/h)

    Args:
        ext: extension data
        theta: boundary relation
        h: time step with h·λ° < 1
        u: current state
        shift: step the flow of A_Θ + λ° instead

    Returns:
        the new state
    """
    return step_decomposed(ext, theta, h, u, shift).u


def evolve(ext: KreinExtension, theta: MonotoneRelation, h: float, horizon: float, u0: np.ndarray,
           phi: Optional[ConvexSpec] = None, shift: bool = False) -> Trajectory:
    """
    Evolve ⌈T/h⌉ implicit-Euler steps from u₀

    Energies are recorded only for the shifted flow with a potential; the
    initial decomposition is (u₀, ξ = 0).
    """
    if not horizon > 0:
        raise RejectedInputError(f"horizon must be positive, got {horizon}")
    step_shift(ext, h, shift)
    n_steps = int(math.ceil(horizon / h - 1e-9))
    u = ext._check_state(u0).copy()
    track_energy = phi is not None and shift

    states = [u]
    increments = [math.nan]
    charges = [np.zeros(ext.boundary_dim)]
    residuals = [0.0]
    energies = []
    if track_energy:
        energies.append(ext.energy(phi, Decomposition(u, u, np.zeros(ext.boundary_dim), 0, 0.0)))

    for _ in range(n_steps):
        result = step_decomposed(ext, theta, h, u, shift)
        increments.append(float(np.linalg.norm(result.u - u)) / h)
        charges.append(result.xi)
        residuals.append(result.residual)
        if track_energy:
            energies.append(ext.energy(phi, result))
        u = result.u
        states.append(u)

    trajectory = Trajectory(
        h=h,
        times=h * np.arange(n_steps + 1),
        states=np.array(states),
        increments=np.array(increments),
        charges=charges,
        residuals=np.array(residuals),
        energies=np.array(energies) if track_energy else None,
        shift=shift,
    )
    logger.debug("Evolved %d steps (h=%g, shift=%s), ‖u_T‖=%.6g", n_steps, h, shift, np.linalg.norm(u))
    return trajectory


def energy_increase(trajectory: Trajectory) -> float:
    """Largest increase of consecutive energy values relative to max(1, |Φ_0|)"""
    if trajectory.energies is None:
        return 0.0
    finite = np.isfinite(trajectory.energies)
    if not np.any(finite):
        return 0.0
    energies = trajectory.energies[int(np.argmax(finite)):]
    if not np.all(np.isfinite(energies)):
        return math.inf
    if len(energies) < 2:
        return 0.0
    scale = max(1.0, abs(float(energies[0])))
    return float(max(0.0, np.max(np.diff(energies)))) / scale


def increment_increase(trajectory: Trajectory) -> float:
    """Largest increase of consecutive difference quotients ‖u_{k+1} − u_k‖/h, relative to max(1, first)"""
    values = trajectory.increments[1:]
    if len(values) < 2:
        return 0.0
    return float(max(0.0, np.max(np.diff(values)))) / max(1.0, float(values[0]))


def regularity_integrals(trajectory: Trajectory) -> Dict[str, float]:
    """Discrete ∫t‖u'‖², ∫‖u'‖² and ∫|Φ| over the trajectory"""
    h = trajectory.h
    quotients = trajectory.increments[1:] ** 2
    times = trajectory.times[1:]
    integrals = {
        'int_t_du2': float(np.sum(times * quotients) * h),
        'int_du2': float(np.sum(quotients) * h),
    }
    if trajectory.energies is not None:
        integrals['int_abs_energy'] = float(np.sum(np.abs(trajectory.energies[1:])) * h)
    return integrals


def _as_run(index: int, run) -> Run:
    if isinstance(run, Run):
        return run
    ext, theta, u0 = run
    return Run(f"run_{index}", ext, theta, np.asarray(u0, dtype=float))


def compare_trajectories(runs: Sequence, h: float, horizon: float, workers: int = 1) -> pd.DataFrame:
    """
    Sup-over-time distances of every run to the last (reference) run

    Args:
        runs: Run objects or (ext, Θ, u₀) tuples sharing the state dimension
        h: common time step
        horizon: common horizon T
        workers: thread-pool size

    Returns:
        DataFrame with columns label, sup_distance (0 for the reference)
    """
    runs = [_as_run(i, run) for i, run in enumerate(runs)]
    if not runs:
        raise RejectedInputError("compare_trajectories needs at least one run")
    dims = {run.ext.dim for run in runs} | {len(run.u0) for run in runs}
    if len(dims) != 1:
        raise RejectedInputError(f"runs disagree on the state dimension: {sorted(dims)}")

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = [
            executor.submit(evolve, run.ext, run.theta, h, horizon, run.u0, None, run.shift)
            for run in runs
        ]
        trajectories = [future.result() for future in futures]

    reference = trajectories[-1].states
    rows = []
    for run, trajectory in zip(runs, trajectories):
        distance = float(np.max(np.linalg.norm(trajectory.states - reference, axis=1)))
        rows.append({'label': run.label, 'sup_distance': distance})
        logger.info("%s: sup distance %.6e", run.label, distance)
    return pd.DataFrame(rows)


def moreau_ladder(ext: KreinExtension, theta: MonotoneRelation, u0: np.ndarray,
                  parameters: Sequence[float] = (1e-1, 1e-2, 1e-3), shift: bool = False) -> List[Run]:
    """Runs with the Yosida approximations Θ_c, followed by the reference run with Θ"""
    u0 = np.asarray(u0, dtype=float)
    runs = [Run(f"yosida_{c:g}", ext, YosidaRelation(theta, c), u0, shift) for c in parameters]
    runs.append(Run("reference", ext, theta, u0, shift))
    return runs


def trace_ladder(ext: KreinExtension, theta: MonotoneRelation, u0: np.ndarray,
                 distances: Sequence[float] = (1e-1, 1e-2, 1e-3), seed: int = 0,
                 shift: bool = False) -> List[Run]:
    """Runs with perturbed traces τ + εP, ‖P‖ = 1, followed by the reference run with τ"""
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(ext.trace.shape)
    direction /= np.linalg.norm(direction, 2)
    u0 = np.asarray(u0, dtype=float)
    runs = []
    for eps in distances:
        perturbed = build_extension(ext.generator, ext.trace + eps * direction, ext.lam0, ext.config)
        runs.append(Run(f"trace_{eps:g}", perturbed, theta, u0, shift))
    runs.append(Run("reference", ext, theta, u0, shift))
    return runs


def contraction_check(ext: KreinExtension, theta: MonotoneRelation, h: float, steps: int,
                      pairs: int = 20, seed: int = 0, box: float = 1.0) -> float:
    """
    Largest violation of ‖u_k − v_k‖ ≤ (1 − hλ°)^{−k}‖u₀ − v₀‖ over random initial pairs

    Returns:
        0 when every pair contracts at the type-λ° rate
    """
    rng = np.random.default_rng(seed)
    starts = rng.uniform(-box, box, size=(pairs, 2, ext.dim))
    horizon = steps * h
    factors = (1.0 - h * ext.lam0) ** -np.arange(steps + 1)
    worst = 0.0
    for u0, v0 in starts:
        u = evolve(ext, theta, h, horizon, u0).states
        v = evolve(ext, theta, h, horizon, v0).states
        gaps = np.linalg.norm(u - v, axis=1) - factors * np.linalg.norm(u0 - v0)
        worst = max(worst, float(np.max(gaps)))
    return worst


def decay_rate(trajectory: Trajectory, u_inf: np.ndarray, window: Tuple[int, int] = (100, 500)) -> float:
    """Measured per-step factor (‖u_b − u_∞‖/‖u_a − u_∞‖)^{1/(b−a)}"""
    first, last = window
    if not 0 <= first < last <= trajectory.steps:
        raise RejectedInputError(f"window {window} outside the trajectory of {trajectory.steps} steps")
    distances = np.linalg.norm(trajectory.states - np.asarray(u_inf, dtype=float), axis=1)
    return float((distances[last] / distances[first]) ** (1.0 / (last - first)))
