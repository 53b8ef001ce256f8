"""
Scenario tasks: each returns checks, a summary and CSV tables
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np
import pandas as pd

from ..extensions import (
    CheckResult,
    ToleranceSet,
    compare_trajectories,
    contraction_check,
    decay_rate,
    energy_increase,
    evolve,
    increment_increase,
    moreau_ladder,
    regularity_integrals,
    trace_ladder,
    verify_identities,
)
from ..extensions.semigroup import step
from ..point_interactions import (
    boundary_matrices,
    check_type_gamma0,
    evolve_green,
    green_eval,
    green_gram,
    green_gram_quadrature,
    green_norm,
)
from . import builders
from .schema import Scenario

logger = logging.getLogger(__name__)


@dataclass
class TaskOutcome:
    """Checks, scalar summary and CSV tables produced by one task"""
    checks: List[CheckResult] = field(default_factory=list)
    summary: Dict = field(default_factory=dict)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)


def _horizon(scenario: Scenario, solver) -> float:
    return scenario.horizon if scenario.horizon is not None else solver.default_horizon


def _step(scenario: Scenario, solver) -> float:
    return scenario.h if scenario.h is not None else solver.default_h


def run_verify(scenario: Scenario, tolerances: ToleranceSet, workers: int) -> TaskOutcome:
    ext = builders.build_abstract(scenario)
    theta = builders.build_relation(scenario, ext.boundary_dim)
    report = verify_identities(ext, theta, scenario.lam_grid, scenario.samples, scenario.seed, tolerances, workers,
                               scenario.boundary_scale)
    summary = {'extension': ext.to_dict(), 'relation': theta.to_dict(), 'active_fraction': report.active_fraction()}
    return TaskOutcome(report.checks, summary, {'checks': report.to_frame()})


def run_evolve(scenario: Scenario, tolerances: ToleranceSet, workers: int) -> TaskOutcome:
    ext = builders.build_abstract(scenario)
    theta = builders.build_relation(scenario, ext.boundary_dim)
    phi = builders.build_potential(scenario, theta)
    h, horizon = _step(scenario, ext.config), _horizon(scenario, ext.config)
    from_equilibrium = scenario.u0 == 'equilibrium'
    u0 = ext.equilibrium(theta) if from_equilibrium else np.asarray(scenario.u0, dtype=float)

    trajectory = evolve(ext, theta, h, horizon, u0, phi, scenario.shift)
    outcome = TaskOutcome(summary={
        'steps': trajectory.steps,
        'final_norm': float(np.linalg.norm(trajectory.final)),
        'regularity': regularity_integrals(trajectory),
    })
    outcome.tables['trajectory'] = trajectory.to_frame()

    if from_equilibrium:
        drift = float(np.max(np.linalg.norm(trajectory.states - u0, axis=1)))
        outcome.checks.append(CheckResult('constancy', drift, tolerances.constancy))
    if trajectory.energies is not None:
        outcome.checks.append(CheckResult('energy_decrease', energy_increase(trajectory), tolerances.energy_decrease))
    if scenario.shift:
        # increments are nonincreasing only for the flow of a maximal monotone generator
        outcome.checks.append(
            CheckResult('increment_decrease', increment_increase(trajectory), tolerances.increment_decrease)
        )
    if scenario.pairs > 0:
        violation = contraction_check(ext, theta, h, trajectory.steps, scenario.pairs, scenario.seed)
        outcome.checks.append(CheckResult('contraction', violation, tolerances.contraction))
    return outcome


def _ladder_outcome(runs, scenario: Scenario, tolerances: ToleranceSet, workers: int, h: float,
                    horizon: float) -> TaskOutcome:
    table = compare_trajectories(runs, h, horizon, workers)
    distances = table['sup_distance'].to_numpy()[:-1]
    ratios = distances[1:] / distances[:-1]
    worst = float(np.max(ratios)) if len(ratios) else 0.0
    checks = [CheckResult('ladder_ratio', worst, tolerances.ladder_ratio)]
    summary = {'sup_distances': dict(zip(table['label'], table['sup_distance'].astype(float)))}
    return TaskOutcome(checks, summary, {'ladder': table})


def run_ladder_moreau(scenario: Scenario, tolerances: ToleranceSet, workers: int) -> TaskOutcome:
    ext = builders.build_abstract(scenario)
    theta = builders.build_relation(scenario, ext.boundary_dim)
    runs = moreau_ladder(ext, theta, scenario.u0, scenario.ladder, scenario.shift)
    return _ladder_outcome(runs, scenario, tolerances, workers,
                           _step(scenario, ext.config), _horizon(scenario, ext.config))


def run_ladder_trace(scenario: Scenario, tolerances: ToleranceSet, workers: int) -> TaskOutcome:
    ext = builders.build_abstract(scenario)
    theta = builders.build_relation(scenario, ext.boundary_dim)
    runs = trace_ladder(ext, theta, scenario.u0, scenario.ladder, scenario.seed, scenario.shift)
    return _ladder_outcome(runs, scenario, tolerances, workers,
                           _step(scenario, ext.config), _horizon(scenario, ext.config))


def run_equilibrium(scenario: Scenario, tolerances: ToleranceSet, workers: int) -> TaskOutcome:
    ext = builders.build_abstract(scenario)
    theta = builders.build_relation(scenario, ext.boundary_dim)
    u_inf = ext.equilibrium(theta)
    u0 = u_inf if scenario.u0 == 'equilibrium' else np.asarray(scenario.u0, dtype=float)
    trajectory = evolve(ext, theta, scenario.h, scenario.horizon, u0)

    fixed = float(np.linalg.norm(step(ext, theta, scenario.h, u_inf) - u_inf))
    checks = [CheckResult('equilibrium_fixed_point', fixed, tolerances.constancy)]
    bound = 1.0 / (1.0 - scenario.h * ext.lam0)
    summary = {'u_inf': u_inf.tolist(), 'rate_bound': bound}
    if scenario.window is not None:
        rate = decay_rate(trajectory, u_inf, tuple(scenario.window))
        summary['rate'] = rate
        checks.append(CheckResult('decay_rate', abs(rate - bound) / bound, tolerances.decay_rate))
        logger.info("Measured decay %.8f per step, bound %.8f", rate, bound)
    frame = trajectory.to_frame()
    frame['distance'] = np.linalg.norm(trajectory.states - u_inf, axis=1)
    return TaskOutcome(checks, summary, {'trajectory': frame})


def run_point3d_evolve(scenario: Scenario, tolerances: ToleranceSet, workers: int) -> TaskOutcome:
    config = builders.build_points(scenario)
    solver = builders.build_solver(scenario.solver)
    theta = builders.build_relation(scenario, config.n)
    gamma = check_type_gamma0(theta, config)
    state0 = builders.build_green_state(scenario, config.n)
    trajectory = evolve_green(config, theta, scenario.h, scenario.steps, state0, solver)

    lam, mu = 1.0 / scenario.h, 2.0 / scenario.h
    _, weyl_lam, _ = boundary_matrices(config, lam, mu)
    weyl_residual = float(np.linalg.norm(weyl_lam - (lam - mu) * green_gram(config, mu, lam)))
    checks = [CheckResult('weyl_identity', weyl_residual, tolerances.weyl_identity)]
    if scenario.quadrature:
        exact = green_gram(config, lam, mu)
        numeric = green_gram_quadrature(config, lam, mu)
        relative = float(np.max(np.abs(numeric - exact) / np.abs(exact)))
        checks.append(CheckResult('green_quadrature', relative, tolerances.green_quadrature))
    norms = trajectory.norms(config) if all(
        mu_j > 0 for state in trajectory.states for mu_j in state.exponents
    ) else None
    if norms is not None and theta.contains_origin():
        growth = float(max(0.0, np.max(np.diff(norms)))) if len(norms) > 1 else 0.0
        checks.append(CheckResult('norm_increase', growth, tolerances.norm_increase))

    rows = []
    for k, time in enumerate(trajectory.times):
        row = {'t': time, 'terms': len(trajectory.states[k].terms)}
        if norms is not None:
            row['norm'] = norms[k]
        charges = trajectory.charges[k - 1] if k > 0 else np.zeros(config.n)
        row.update({f"xi_{i}": float(value) for i, value in enumerate(charges)})
        rows.append(row)
    tables = {'charges': pd.DataFrame(rows)}
    if scenario.eval_points:
        points = np.asarray(scenario.eval_points, dtype=float)
        samples = pd.DataFrame(points, columns=['x', 'y', 'z'])
        samples['value'] = green_eval(config, trajectory.states[-1], points)
        tables['green_eval'] = samples

    summary = {
        'gamma0': gamma,
        'final_state': trajectory.states[-1].to_dict(),
        'lam': trajectory.lam,
    }
    if norms is not None:
        summary['final_norm'] = float(norms[-1])
    return TaskOutcome(checks, summary, tables)


TASKS: Dict[str, Callable[[Scenario, ToleranceSet, int], TaskOutcome]] = {
    'verify': run_verify,
    'evolve': run_evolve,
    'ladder_moreau': run_ladder_moreau,
    'ladder_trace': run_ladder_trace,
    'equilibrium': run_equilibrium,
    'point3d_evolve': run_point3d_evolve,
}
