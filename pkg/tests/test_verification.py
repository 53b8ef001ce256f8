"""
Tests for identity verification on λ-grids
"""
import os
import sys

import numpy as np
import pytest

# Add the repository root to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.errors import InvalidShiftError, RejectedInputError
from src.extensions import ToleranceSet, build_extension, is_friedrichs, verify_identities
from src.extensions.verification import sample_states, sub_potential_residual
from src.hilbert import diagonal, dirichlet_1d
from src.relations import (
    ComponentwiseRelation,
    LinearRelation,
    ScalarGraph,
    ScalarGraphKind,
    SubdifferentialRelation,
    l2_norm,
    zero_indicator,
)

ABS = ScalarGraph(ScalarGraphKind.ABS)


@pytest.fixture
def ext():
    return build_extension(diagonal([1.0, 2.0, 3.0, 4.0]),
                           [[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]], 0.5)


def test_linear_relation_passes_every_check(ext):
    theta = LinearRelation([[2.0, 0.5], [0.5, 1.0]])
    report = verify_identities(ext, theta, [1.0, 2.0, 4.0, 8.0], samples=10, seed=7)
    assert report.passed
    names = {check.name for check in report.checks}
    assert {'weyl_identity', 'resolvent_identity', 'linear_recovery', 'base_resolvent', 'sub_potential'} <= names
    assert report.worst('linear_recovery') <= 1e-9
    assert report.worst('resolvent_identity') <= 1e-9


def test_abs_relation_on_a_grid():
    generator = dirichlet_1d(20)
    trace = np.zeros((2, 20))
    trace[0, 4] = trace[1, 14] = 1.0
    ext = build_extension(generator, trace, 1.0)
    report = verify_identities(ext, ComponentwiseRelation([ABS, ABS]), [2.0, 5.0, 10.0], samples=20, seed=11)
    assert report.passed
    assert report.worst('resolvent_identity') <= 1e-8
    # point traces of a unit-interval grid are small, so unscaled samples would never leave ξ = 0
    assert report.active_fraction() > 0
    assert all(c.active_fraction > 0 for c in report.checks if c.name == 'resolvent_identity')
    assert 'base_resolvent' not in {check.name for check in report.checks}


def test_friedrichs_relation_adds_recovery_check(ext):
    theta = ComponentwiseRelation([ScalarGraph(ScalarGraphKind.ZERO)] * 2)
    assert is_friedrichs(theta)
    assert is_friedrichs(SubdifferentialRelation(zero_indicator(), 2))
    assert not is_friedrichs(ComponentwiseRelation([ABS, ABS]))
    report = verify_identities(ext, theta, [1.0, 3.0], samples=5)
    assert report.worst('friedrichs_recovery') == 0.0
    assert report.passed


def test_equal_shifts_give_zero_identity_residual(ext):
    report = verify_identities(ext, ComponentwiseRelation([ABS, ABS]), [2.0, 2.0], samples=4)
    same = [c for c in report.checks if c.name == 'resolvent_identity']
    assert same and all(c.residual == 0.0 for c in same)


def test_grid_must_exceed_lam0(ext):
    with pytest.raises(InvalidShiftError):
        verify_identities(ext, ComponentwiseRelation([ABS, ABS]), [2.0, 0.5])


def test_report_is_reproducible_and_worker_independent(ext):
    theta = SubdifferentialRelation(l2_norm(0.7), 2)
    first = verify_identities(ext, theta, [1.0, 4.0], samples=5, seed=3, workers=1)
    second = verify_identities(ext, theta, [4.0, 1.0], samples=5, seed=3, workers=3)
    assert first.to_dict() == second.to_dict()


def test_tolerances_drive_the_verdict(ext):
    strict = ToleranceSet().with_overrides({'resolvent_identity': 0.0, 'round_trip': 0.0})
    report = verify_identities(ext, ComponentwiseRelation([ABS, ABS]), [1.0, 9.0], samples=5,
                               tolerances=strict)
    failed = {c.name for c in report.checks if not c.passed}
    assert failed <= {'resolvent_identity', 'round_trip'}


def test_sub_potential_inequality(ext):
    assert sub_potential_residual(ext, ComponentwiseRelation([ABS, ABS]), 10, 0) <= 1e-10
    assert sub_potential_residual(ext, LinearRelation([[0.0, 1.0], [-1.0, 0.0]]), 10, 0) is None


def test_report_frame(ext):
    report = verify_identities(ext, LinearRelation(np.eye(2)), [1.0, 2.0], samples=3)
    frame = report.to_frame()
    assert list(frame.columns) == ['name', 'lam', 'mu', 'residual', 'threshold', 'passed', 'active_fraction']
    assert len(frame) == len(report.checks)


@pytest.mark.parametrize("boundary_scale", [0.01, 1.0, 50.0])
def test_sampled_boundary_data_span_two_decades(boundary_scale):
    generator = dirichlet_1d(20)
    trace = np.zeros((2, 20))
    trace[0, 4] = trace[1, 14] = 1.0
    ext = build_extension(generator, trace, 1.0)
    states = sample_states(ext, 5.0, 200, np.random.default_rng(0), boundary_scale)
    norms = np.linalg.norm(states @ ext.green(5.0), axis=1)
    assert np.all(norms >= boundary_scale / 10 * (1 - 1e-12))
    assert np.all(norms <= boundary_scale * 10 * (1 + 1e-12))
    assert boundary_scale / 3 < np.median(norms) < 3 * boundary_scale


def test_friedrichs_relation_is_never_active(ext):
    theta = ComponentwiseRelation([ScalarGraph(ScalarGraphKind.ZERO)] * 2)
    assert verify_identities(ext, theta, [1.0, 3.0], samples=5).active_fraction() == 0.0
    assert verify_identities(ext, LinearRelation(np.eye(2)), [1.0, 3.0], samples=5).active_fraction() == 1.0


def test_boundary_scale_must_be_positive(ext):
    with pytest.raises(RejectedInputError):
        verify_identities(ext, ComponentwiseRelation([ABS, ABS]), [1.0, 2.0], boundary_scale=0.0)


@pytest.mark.slow
def test_sub_potential_over_ten_thousand_combinations(ext):
    theta = SubdifferentialRelation(l2_norm(0.7), 2)
    assert sub_potential_residual(ext, theta, 100, 0) <= 1e-8
    assert sub_potential_residual(ext, ComponentwiseRelation([ABS, ABS]), 100, 1) <= 1e-8
