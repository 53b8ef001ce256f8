"""
Scenario documents: pydantic schema plus task-level semantic checks
"""
import json
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import Diagnostic, ScenarioError
from ..relations import RelationKind, ScalarGraphKind

RANDOMIZED = {'verify', 'ladder_trace'}


class GeneratorSpec(BaseModel):
    """Reference operator A°"""
    model_config = ConfigDict(extra='forbid')

    kind: Literal['explicit', 'diagonal', 'dirichlet_1d']
    matrix: Optional[List[List[float]]] = None
    values: Optional[List[float]] = None
    n: Optional[int] = None
    h: Optional[float] = None


class TraceSpec(BaseModel):
    """Trace map τ: explicit rows, point evaluations or 1D endpoint normal differences"""
    model_config = ConfigDict(extra='forbid')

    kind: Literal['explicit', 'point_eval', 'robin_1d']
    matrix: Optional[List[List[float]]] = None
    indices: Optional[List[int]] = None


class GreenTerm(BaseModel):
    model_config = ConfigDict(extra='forbid')

    mu: float = Field(ge=0.0)
    charges: List[float]
    order: int = Field(default=1, ge=1)


class Scenario(BaseModel):
    """Validated scenario document"""
    model_config = ConfigDict(extra='forbid')

    name: str
    task: Literal['verify', 'evolve', 'ladder_moreau', 'ladder_trace', 'point3d_evolve', 'equilibrium']
    generator: Optional[GeneratorSpec] = None
    trace: Optional[TraceSpec] = None
    lam0: Optional[float] = None
    relation: Optional[Dict[str, Any]] = None
    potential: Optional[Dict[str, Any]] = None
    seed: Optional[int] = None

    # verification
    lam_grid: List[float] = Field(default_factory=list)
    samples: int = Field(default=20, ge=1)
    boundary_scale: float = Field(default=1.0, gt=0.0)

    # evolution
    h: Optional[float] = Field(default=None, gt=0.0)
    horizon: Optional[float] = Field(default=None, gt=0.0)
    u0: Optional[Union[Literal['equilibrium'], List[float]]] = None
    shift: bool = False
    pairs: int = Field(default=0, ge=0)
    window: Optional[List[int]] = None

    # ladders
    ladder: List[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3])

    # point interactions
    points: Optional[List[List[float]]] = None
    steps: Optional[int] = Field(default=None, ge=1)
    initial_state: Optional[List[GreenTerm]] = None
    eval_points: Optional[List[List[float]]] = None
    quadrature: bool = False

    tolerances: Dict[str, float] = Field(default_factory=dict)
    solver: Dict[str, Any] = Field(default_factory=dict)

    @field_validator('relation', 'potential')
    @classmethod
    def _known_kinds(cls, spec):
        if spec is not None:
            _check_kinds(spec)
        return spec


def _check_kinds(spec: Dict[str, Any], path: str = '') -> None:
    """Recursive check of relation and potential kinds"""
    kind = spec.get('kind')
    relation_kinds = {k.value for k in RelationKind}
    potential_kinds = {'quadratic', 'l1', 'l2_norm', 'zero', 'box', 'separable'}
    if kind not in relation_kinds | potential_kinds:
        raise ValueError(f"unknown kind {kind!r} at {path or '/'}")
    graph_kinds = {k.value for k in ScalarGraphKind}
    for i, graph in enumerate(spec.get('graphs', [])):
        if graph.get('kind') not in graph_kinds:
            raise ValueError(f"unknown scalar graph kind {graph.get('kind')!r} at {path}/graphs/{i}")
    for key in ('base', 'potential'):
        if isinstance(spec.get(key), dict):
            _check_kinds(spec[key], f"{path}/{key}")


def _pointer(location) -> str:
    return '/' + '/'.join(str(part) for part in location)


def _require(scenario: Scenario, fields: List[str]) -> List[Diagnostic]:
    return [
        Diagnostic(f"/{name}", f"required by task {scenario.task!r}")
        for name in fields if getattr(scenario, name) in (None, [])
    ]


def semantic_diagnostics(scenario: Scenario) -> List[Diagnostic]:
    """Task-required fields, λ-grid placement and seed presence"""
    abstract = ['generator', 'trace', 'lam0', 'relation']
    required = {
        'verify': abstract + ['lam_grid'],
        'evolve': abstract + ['u0'],
        'ladder_moreau': abstract + ['u0'],
        'ladder_trace': abstract + ['u0'],
        'point3d_evolve': ['points', 'relation', 'h', 'steps', 'initial_state'],
        'equilibrium': abstract + ['u0', 'h', 'horizon'],
    }[scenario.task]
    diagnostics = _require(scenario, required)

    if scenario.lam0 is not None:
        for i, lam in enumerate(scenario.lam_grid):
            if not lam > scenario.lam0:
                diagnostics.append(Diagnostic(f"/lam_grid/{i}", f"{lam} must exceed lam0={scenario.lam0}"))
    randomized = scenario.task in RANDOMIZED or scenario.pairs > 0
    if randomized and scenario.seed is None:
        diagnostics.append(Diagnostic('/seed', f"required by randomized task {scenario.task!r}"))
    if scenario.trace is not None:
        if scenario.trace.kind == 'explicit' and scenario.trace.matrix is None:
            diagnostics.append(Diagnostic('/trace/matrix', "required by explicit trace"))
        if scenario.trace.kind == 'point_eval' and not scenario.trace.indices:
            diagnostics.append(Diagnostic('/trace/indices', "required by point_eval trace"))
        if scenario.trace.kind == 'robin_1d' and scenario.generator is not None \
                and scenario.generator.kind != 'dirichlet_1d':
            diagnostics.append(Diagnostic('/trace/kind', "robin_1d needs a dirichlet_1d generator"))
    if scenario.generator is not None:
        needed = {'explicit': 'matrix', 'diagonal': 'values', 'dirichlet_1d': 'n'}[scenario.generator.kind]
        if getattr(scenario.generator, needed) is None:
            diagnostics.append(Diagnostic(f"/generator/{needed}", f"required by {scenario.generator.kind} generator"))
    if scenario.task.startswith('ladder') and scenario.u0 == 'equilibrium':
        diagnostics.append(Diagnostic('/u0', "ladders need an explicit initial state"))
    if scenario.window is not None and len(scenario.window) != 2:
        diagnostics.append(Diagnostic('/window', "window must list two step indices"))
    for i, c in enumerate(scenario.ladder):
        if not c > 0:
            diagnostics.append(Diagnostic(f"/ladder/{i}", "ladder entries must be positive"))
    return diagnostics


def parse_scenario(text: str) -> Scenario:
    """
    Parse and validate a scenario document

    Args:
        text: JSON document

    Returns:
        validated Scenario

    Raises:
        ScenarioError: with one Diagnostic per offending field
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([Diagnostic('', f"invalid JSON: {exc.msg} (line {exc.lineno})")])
    try:
        scenario = Scenario.model_validate(data)
    except ValidationError as exc:
        raise ScenarioError([Diagnostic(_pointer(err['loc']), err['msg']) for err in exc.errors()])
    diagnostics = semantic_diagnostics(scenario)
    if diagnostics:
        raise ScenarioError(diagnostics)
    return scenario
