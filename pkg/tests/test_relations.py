"""
Tests for scalar graphs, convex potentials and monotone relations
"""
import math
import os
import sys

import numpy as np
import pytest

# Add the repository root to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.errors import (
    InternalInconsistencyError,
    RejectedInputError,
    StepSizeError,
    UnsupportedRelationError,
)
from src.relations import (
    ComponentwiseRelation,
    ConvexSpec,
    LinearRelation,
    ScalarGraph,
    ScalarGraphKind,
    ShiftedRelation,
    SubdifferentialRelation,
    YosidaRelation,
    box_indicator,
    l1,
    l2_norm,
    moreau_envelope,
    quadratic,
    relation_from_dict,
    resolve,
    sample_graph,
    yosida_apply,
    zero_indicator,
)

ABS = ScalarGraph(ScalarGraphKind.ABS)


def graph_relation(*graphs):
    return ComponentwiseRelation(list(graphs))


def catalog():
    """One relation per kind, all monotone"""
    return [
        LinearRelation([[2.0, 0.5], [-0.5, 1.0]]),
        graph_relation(ABS, ABS),
        graph_relation(ScalarGraph(ScalarGraphKind.POWER, exponent=3.0),
                       ScalarGraph(ScalarGraphKind.POWER, exponent=1.5)),
        graph_relation(ScalarGraph(ScalarGraphKind.BOX, lower=-0.5, upper=0.25),
                       ScalarGraph(ScalarGraphKind.RELU, weight=2.0)),
        SubdifferentialRelation(l2_norm(0.7), 2),
        ShiftedRelation(graph_relation(ABS, ABS), [0.2, -0.1], [0.3, 0.0]),
        YosidaRelation(graph_relation(ABS, ABS), 0.5),
    ]


@pytest.mark.parametrize("theta, c, x, expected", [
    (SubdifferentialRelation(quadratic([[1.0]]), 1), 1.0, [2.0], [1.0]),
    (graph_relation(ABS), 1.0, [0.5], [0.0]),
    (graph_relation(ABS), 1.0, [2.0], [1.0]),
    (graph_relation(ScalarGraph(ScalarGraphKind.ZERO)), 3.0, [5.0], [0.0]),
    (SubdifferentialRelation(zero_indicator(), 2), 0.1, [1.0, -2.0], [0.0, 0.0]),
])
def test_resolve_examples(theta, c, x, expected):
    np.testing.assert_allclose(resolve(theta, c, np.array(x)), expected, atol=1e-14)


@pytest.mark.parametrize("theta, c, x, expected", [
    (graph_relation(ABS), 1.0, [2.0], [1.0]),
    (graph_relation(ABS), 1.0, [0.0], [0.0]),
    (LinearRelation(np.eye(2)), 1.0, [2.0, 0.0], [1.0, 0.0]),
])
def test_yosida_examples(theta, c, x, expected):
    np.testing.assert_allclose(yosida_apply(theta, c, np.array(x)), expected, atol=1e-14)


@pytest.mark.parametrize("phi, c, x, expected", [
    (l1(), 1.0, [0.0], 0.0),
    (l1(), 1.0, [2.0], 1.5),
    (quadratic([[1.0]]), 1.0, [2.0], 1.0),
])
def test_moreau_envelope_examples(phi, c, x, expected):
    assert moreau_envelope(phi, c, np.array(x)) == pytest.approx(expected)


def test_moreau_envelope_flags_broken_prox():
    broken = ConvexSpec('broken', lambda x: math.inf, lambda c, x: x)
    with pytest.raises(InternalInconsistencyError):
        moreau_envelope(broken, 1.0, np.zeros(1))


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.5])
def test_power_resolvent_solves_scalar_equation(p):
    graph = ScalarGraph(ScalarGraphKind.POWER, exponent=p)
    s = np.linspace(-5.0, 5.0, 41)
    for c in (0.1, 1.0, 10.0):
        z = graph.resolve(c, s)
        residual = z + c * np.abs(z) ** (p - 1) * np.sign(z) - s
        np.testing.assert_allclose(residual, 0.0, atol=1e-10)


def test_power_resolvent_scalar_input():
    graph = ScalarGraph(ScalarGraphKind.POWER, exponent=3.0)
    z = graph.resolve(1.0, np.array([2.0]))
    assert z[0] + z[0] ** 2 == pytest.approx(2.0)
    assert z[0] == pytest.approx(1.0)


@pytest.mark.parametrize("theta", catalog(), ids=lambda t: t.kind.value)
def test_firm_nonexpansiveness(theta):
    rng = np.random.default_rng(4)
    for c in (0.1, 1.0, 5.0):
        for x, y in rng.uniform(-3, 3, size=(20, 2, 2)):
            jx, jy = theta.resolve(c, x), theta.resolve(c, y)
            assert (jx - jy) @ (jx - jy) <= (x - y) @ (jx - jy) + 1e-12


@pytest.mark.parametrize("theta", catalog(), ids=lambda t: t.kind.value)
def test_sampled_pairs_are_monotone(theta):
    pairs = sample_graph(theta, 30, 2.0, seed=9)
    for (xi1, t1), (xi2, t2) in zip(pairs, pairs[1:]):
        assert (t1 - t2) @ (xi1 - xi2) >= -1e-12
    for xi, xi_tilde in pairs:
        assert theta.contains(xi, xi_tilde) <= 1e-12


@pytest.mark.parametrize("theta", catalog(), ids=lambda t: t.kind.value)
def test_resolvent_identity_in_boundary_space(theta):
    rng = np.random.default_rng(12)
    c, d = 2.0, 0.5
    for x in rng.uniform(-3, 3, size=(10, 2)):
        jc = theta.resolve(c, x)
        composed = theta.resolve(d, d / c * x + (1 - d / c) * jc)
        np.testing.assert_allclose(composed, jc, atol=1e-9)


@pytest.mark.parametrize("theta", catalog(), ids=lambda t: t.kind.value)
def test_yosida_is_monotone(theta):
    rng = np.random.default_rng(13)
    for x, y in rng.uniform(-3, 3, size=(20, 2, 2)):
        assert (yosida_apply(theta, 0.3, x) - yosida_apply(theta, 0.3, y)) @ (x - y) >= -1e-12


def test_abs_samples_carry_sign():
    for xi, xi_tilde in sample_graph(graph_relation(ABS), 50, 3.0, seed=1):
        if xi[0] != 0.0:
            assert xi_tilde[0] == pytest.approx(np.sign(xi[0]))


def test_linear_samples_lie_on_the_matrix():
    b = np.array([[2.0, 0.5], [-0.5, 1.0]])
    for xi, xi_tilde in sample_graph(LinearRelation(b), 20, 1.0, seed=2):
        np.testing.assert_allclose(xi_tilde, b @ xi, atol=1e-12)


def test_sampling_is_deterministic():
    first = sample_graph(graph_relation(ABS, ABS), 5, 1.0, seed=42)
    second = sample_graph(graph_relation(ABS, ABS), 5, 1.0, seed=42)
    for (a, b), (c, d) in zip(first, second):
        np.testing.assert_array_equal(a, c)
        np.testing.assert_array_equal(b, d)


def test_moreau_envelope_properties():
    phi = l1(1.0)
    rng = np.random.default_rng(3)
    for x in rng.uniform(-2, 2, size=(10, 3)):
        values = [moreau_envelope(phi, c, x) for c in (1.0, 0.1, 0.01, 0.001)]
        assert all(a <= b + 1e-14 for a, b in zip(values, values[1:]))
        assert values[-1] <= phi(x) + 1e-14
    x, y = rng.uniform(-2, 2, size=(2, 3))
    midpoint = moreau_envelope(phi, 0.5, 0.5 * (x + y))
    assert midpoint <= 0.5 * (moreau_envelope(phi, 0.5, x) + moreau_envelope(phi, 0.5, y)) + 1e-14


def test_moreau_gradient_is_yosida():
    theta = SubdifferentialRelation(l2_norm(1.0), 2)
    phi = theta.potential()
    x = np.array([1.5, -0.7])
    step = 1e-6
    gradient = np.array([
        (moreau_envelope(phi, 0.4, x + step * e) - moreau_envelope(phi, 0.4, x - step * e)) / (2 * step)
        for e in np.eye(2)
    ])
    np.testing.assert_allclose(gradient, yosida_apply(theta, 0.4, x), atol=1e-6)


def test_prox_minimizes_locally():
    phi = box_indicator([-1.0, -1.0], [0.5, 1.0])
    x = np.array([2.0, -0.3])
    zeta = phi.prox(0.7, x)
    best = phi(zeta) + np.sum((x - zeta) ** 2) / 1.4
    for delta in np.random.default_rng(0).normal(scale=1e-3, size=(20, 2)):
        other = zeta + delta
        if phi.in_domain(other):
            assert phi(other) + np.sum((x - other) ** 2) / 1.4 >= best - 1e-15


def test_type_corrected_relation():
    theta = graph_relation(ScalarGraph(ScalarGraphKind.LINEAR, slope=-0.5))
    assert theta.type_constant == pytest.approx(0.5)
    np.testing.assert_allclose(theta.resolve(1.0, np.array([1.0])), [2.0])
    with pytest.raises(StepSizeError):
        theta.resolve(2.0, np.array([1.0]))
    # Θ + γ = 0, so the corrected resolvent is the identity
    np.testing.assert_allclose(theta.resolve_corrected(3.0, np.array([1.0])), [1.0])


def test_strongly_monotone_type_is_negative():
    theta = graph_relation(ScalarGraph(ScalarGraphKind.LINEAR, slope=0.2))
    assert theta.type_constant == pytest.approx(-0.2)
    np.testing.assert_allclose(theta.resolve_corrected(1.0, np.array([1.0])), [1.0])


def test_linear_relation_rejects_nonmonotone_matrix():
    with pytest.raises(RejectedInputError):
        LinearRelation([[-1.0, 0.0], [0.0, 1.0]])
    LinearRelation([[-1.0, 0.0], [0.0, 1.0]], type_constant=1.0)


def test_inverse_branches():
    np.testing.assert_allclose(LinearRelation(np.diag([2.0, 4.0])).inverse_apply(np.array([2.0, 2.0])), [1.0, 0.5])
    power = graph_relation(ScalarGraph(ScalarGraphKind.POWER, exponent=3.0))
    np.testing.assert_allclose(power.inverse_apply(np.array([4.0])), [2.0])
    with pytest.raises(UnsupportedRelationError):
        graph_relation(ABS).inverse_apply(np.array([0.5]))


def test_potentials():
    assert graph_relation(ABS, ABS).potential()(np.array([1.0, -2.0])) == pytest.approx(3.0)
    relu = graph_relation(ScalarGraph(ScalarGraphKind.RELU, weight=2.0))
    assert relu.potential()(np.array([0.5])) == pytest.approx(0.5)
    assert relu.potential()(np.array([-3.0])) == 0.0
    assert YosidaRelation(graph_relation(ABS), 1.0).potential()(np.array([2.0])) == pytest.approx(1.5)
    assert LinearRelation([[0.0, 1.0], [-1.0, 0.0]]).potential() is None


def test_relation_round_trips_through_dict():
    for theta in catalog():
        if isinstance(theta, SubdifferentialRelation):
            continue
        rebuilt = relation_from_dict(theta.to_dict(), theta.dim)
        x = np.array([0.7, -1.3])
        np.testing.assert_allclose(rebuilt.resolve(0.8, x), theta.resolve(0.8, x), atol=1e-14)


def test_unknown_relation_kind():
    with pytest.raises(UnsupportedRelationError):
        relation_from_dict({'kind': 'spline'})
    with pytest.raises(UnsupportedRelationError):
        relation_from_dict({'kind': 'componentwise', 'graphs': [{'kind': 'cubic'}]})


def test_sample_graph_needs_positive_count():
    with pytest.raises(RejectedInputError):
        sample_graph(graph_relation(ABS), 0)
