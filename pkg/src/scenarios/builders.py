"""
Translate validated scenario specs into domain objects
"""
from dataclasses import fields
from typing import Any, Dict, Optional

import numpy as np

from ..errors import RejectedInputError
from ..extensions import KreinExtension, SolverConfig, ToleranceSet, build_extension
from ..hilbert import SelfAdjointGenerator, assemble_generator
from ..point_interactions import GreenState, PointConfig, point_config
from ..relations import ConvexSpec, MonotoneRelation, convex_from_dict, relation_from_dict
from .schema import GeneratorSpec, Scenario, TraceSpec


def build_generator(spec: GeneratorSpec) -> SelfAdjointGenerator:
    return assemble_generator(spec.model_dump(exclude_none=True))


def robin_trace(generator: SelfAdjointGenerator) -> np.ndarray:
    """One-sided outward normal differences −u_1/h and −u_n/h at both endpoints of a Dirichlet grid"""
    n = generator.dim
    h = generator.params.get('h', 1.0 / (n + 1))
    trace = np.zeros((2, n))
    trace[0, 0] = -1.0 / h
    trace[1, n - 1] = -1.0 / h
    return trace


def build_trace(spec: TraceSpec, generator: SelfAdjointGenerator) -> np.ndarray:
    """
    Build the trace matrix τ

    Args:
        spec: trace spec
        generator: reference operator, fixes the state dimension

    Returns:
        m×dim matrix
    """
    if spec.kind == 'explicit':
        return np.array(spec.matrix, dtype=float)
    if spec.kind == 'point_eval':
        indices = spec.indices
        if len(set(indices)) != len(indices) or min(indices) < 0 or max(indices) >= generator.dim:
            raise RejectedInputError(f"point_eval indices must be distinct and within [0, {generator.dim})")
        return np.eye(generator.dim)[indices]
    if generator.name != 'dirichlet_1d':
        raise RejectedInputError("robin_1d trace needs a dirichlet_1d generator")
    return robin_trace(generator)


def build_solver(overrides: Dict[str, Any]) -> SolverConfig:
    known = {f.name for f in fields(SolverConfig)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise RejectedInputError(f"unknown solver keys: {', '.join(unknown)}")
    return SolverConfig(**overrides)


def build_tolerances(scenario: Scenario, cli_overrides: Optional[Dict[str, float]] = None) -> ToleranceSet:
    """Scenario thresholds first, CLI overrides last"""
    return ToleranceSet().with_overrides(scenario.tolerances).with_overrides(cli_overrides or {})


def build_abstract(scenario: Scenario) -> KreinExtension:
    generator = build_generator(scenario.generator)
    trace = build_trace(scenario.trace, generator)
    return build_extension(generator, trace, scenario.lam0, build_solver(scenario.solver))


def build_relation(scenario: Scenario, dim: int) -> MonotoneRelation:
    theta = relation_from_dict(scenario.relation, dim)
    if theta.dim != dim:
        raise RejectedInputError(f"relation acts on ℝ^{theta.dim}, boundary space is ℝ^{dim}")
    return theta


def build_potential(scenario: Scenario, theta: MonotoneRelation) -> Optional[ConvexSpec]:
    """Explicit potential of the scenario, else the relation's own potential"""
    if scenario.potential is not None:
        return convex_from_dict(scenario.potential)
    return theta.potential()


def build_points(scenario: Scenario) -> PointConfig:
    return point_config(scenario.points)


def build_green_state(scenario: Scenario, n: int) -> GreenState:
    return GreenState(n).combine([(term.mu, term.charges, term.order) for term in scenario.initial_state])
