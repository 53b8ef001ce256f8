"""
Maximal monotone relations in the boundary space: resolvents, Yosida and Moreau regularizations
"""
from .convex import (
    ConvexSpec,
    box_indicator,
    convex_from_dict,
    l1,
    l2_norm,
    moreau_envelope,
    moreau_spec,
    quadratic,
    separable,
    zero_indicator,
)
from .inclusion import InclusionResult, relation_from_dict, solve_inclusion
from .relation import (
    ComponentwiseRelation,
    LinearRelation,
    MonotoneRelation,
    RelationKind,
    ShiftedRelation,
    SubdifferentialRelation,
    YosidaRelation,
    resolve,
    sample_graph,
    yosida_apply,
)
from .scalar_graphs import ScalarGraph, ScalarGraphKind

__all__ = [
    'ComponentwiseRelation',
    'ConvexSpec',
    'InclusionResult',
    'LinearRelation',
    'MonotoneRelation',
    'RelationKind',
    'ScalarGraph',
    'ScalarGraphKind',
    'ShiftedRelation',
    'SubdifferentialRelation',
    'YosidaRelation',
    'box_indicator',
    'convex_from_dict',
    'l1',
    'l2_norm',
    'moreau_envelope',
    'moreau_spec',
    'quadratic',
    'relation_from_dict',
    'resolve',
    'sample_graph',
    'separable',
    'solve_inclusion',
    'yosida_apply',
    'zero_indicator',
]
