"""
Tests for scenario parsing, task dispatch, reports and exit codes
"""
import json
import os
import sys

import numpy as np
import pandas as pd
import pytest

# Add the repository root to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.errors import ScenarioError
from src.scenarios import (
    EXIT_CONFIG,
    EXIT_PASS,
    EXIT_TOLERANCE,
    Settings,
    build_trace,
    load_scenario,
    parse_scenario,
    report_hash,
    run_file,
    run_scenario,
    run_suite,
    suite_exit_code,
)
from src.scenarios.builders import build_generator

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), '..', 'scenarios')

MINIMAL_VERIFY = {
    "name": "minimal",
    "task": "verify",
    "generator": {"kind": "diagonal", "values": [1.0, 2.0, 3.0]},
    "trace": {"kind": "explicit", "matrix": [[1.0, 1.0, 1.0]]},
    "lam0": 0.5,
    "relation": {"kind": "linear", "matrix": [[1.0]]},
    "lam_grid": [1.0, 3.0],
    "samples": 5,
    "seed": 1,
}


def document(**changes):
    data = dict(MINIMAL_VERIFY)
    data.update(changes)
    return json.dumps({k: v for k, v in data.items() if v is not None})


def pointers(text):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    return [d.pointer for d in info.value.diagnostics]


def test_minimal_verify_parses():
    scenario = parse_scenario(document())
    assert scenario.task == 'verify'
    assert scenario.lam_grid == [1.0, 3.0]
    assert scenario.ladder == [0.1, 0.01, 0.001]


def test_grid_entry_at_lam0_is_named():
    assert pointers(document(lam_grid=[1.0, 0.5, 2.0])) == ['/lam_grid/1']


@pytest.mark.parametrize("changes, pointer", [
    ({'relation': {'kind': 'spline'}}, '/relation'),
    ({'relation': {'kind': 'componentwise', 'graphs': [{'kind': 'cubic'}]}}, '/relation'),
    ({'bogus': 1}, '/bogus'),
    ({'seed': None}, '/seed'),
    ({'lam_grid': []}, '/lam_grid'),
    ({'samples': 0}, '/samples'),
    ({'trace': {'kind': 'point_eval'}}, '/trace/indices'),
    ({'generator': {'kind': 'diagonal'}}, '/generator/values'),
])
def test_field_diagnostics(changes, pointer):
    assert pointer in pointers(document(**changes))


def test_evolve_needs_initial_state():
    text = document(task='evolve', lam_grid=[], seed=None, h=0.1, horizon=1.0)
    assert pointers(text) == ['/u0']


def test_ladder_needs_explicit_initial_state():
    text = document(task='ladder_moreau', lam_grid=[], u0='equilibrium')
    assert '/u0' in pointers(text)


def test_invalid_json():
    assert pointers('{"name": ') == ['']


def test_robin_trace_has_full_row_rank():
    scenario = parse_scenario(json.dumps({
        "name": "robin",
        "task": "verify",
        "generator": {"kind": "dirichlet_1d", "n": 50},
        "trace": {"kind": "robin_1d"},
        "lam0": 1.0,
        "relation": {"kind": "componentwise", "graphs": [{"kind": "abs"}, {"kind": "abs"}]},
        "lam_grid": [2.0],
        "seed": 0,
    }))
    generator = build_generator(scenario.generator)
    trace = build_trace(scenario.trace, generator)
    assert trace.shape == (2, 50)
    assert np.linalg.matrix_rank(trace) == 2


def test_verify_linear_scenario_passes(tmp_path):
    scenario = load_scenario(os.path.join(SCENARIO_DIR, 'verify_linear.json'))
    outcome = run_scenario(scenario, tmp_path)
    assert outcome.exit_code == EXIT_PASS
    report = json.loads((tmp_path / 'report.json').read_text())
    assert report['passed']
    assert report['seed'] == 7
    linear = [c['residual'] for c in report['checks'] if c['name'] == 'linear_recovery']
    assert linear and max(linear) <= 1e-9
    assert (tmp_path / 'checks.csv').exists()


def test_report_hash_is_reproducible(tmp_path):
    scenario = load_scenario(os.path.join(SCENARIO_DIR, 'verify_linear.json'))
    first = run_scenario(scenario, tmp_path / 'first').report
    second = run_scenario(scenario, tmp_path / 'second', workers=3).report
    assert first['report_hash'] == second['report_hash']
    assert report_hash(first) == first['report_hash']
    reseeded = run_scenario(scenario, tmp_path / 'third', seed=8).report
    assert reseeded['seed'] == 8
    assert reseeded['report_hash'] != first['report_hash']


def test_evolution_from_equilibrium_is_constant(tmp_path):
    outcome = run_file(os.path.join(SCENARIO_DIR, 'evolve_from_equilibrium.json'), tmp_path)
    assert outcome.exit_code == EXIT_PASS
    frame = pd.read_csv(outcome.out_dir / 'trajectory.csv')
    states = frame[[c for c in frame.columns if c.startswith('u_')]].to_numpy()
    assert np.max(np.abs(states - states[0])) <= 1e-7


def test_moreau_ladder_is_strictly_decreasing(tmp_path):
    outcome = run_file(os.path.join(SCENARIO_DIR, 'ladder_moreau.json'), tmp_path)
    assert outcome.exit_code == EXIT_PASS
    table = pd.read_csv(outcome.out_dir / 'ladder.csv')
    distances = table['sup_distance'].to_numpy()[:-1]
    assert np.all(np.diff(distances) < 0)


def test_single_point_interaction_scenario(tmp_path):
    outcome = run_file(os.path.join(SCENARIO_DIR, 'point3d_single_abs.json'), tmp_path)
    assert outcome.exit_code == EXIT_PASS
    charges = pd.read_csv(outcome.out_dir / 'charges.csv')
    assert 'xi_0' in charges.columns


def test_failed_tolerance_exits_with_one(tmp_path):
    scenario = load_scenario(os.path.join(SCENARIO_DIR, 'verify_linear.json'))
    outcome = run_scenario(scenario, tmp_path, tolerance_overrides={'weyl_identity': -1.0})
    assert outcome.exit_code == EXIT_TOLERANCE
    assert not outcome.report['passed']


def test_unknown_tolerance_key_is_a_configuration_error(tmp_path):
    scenario = load_scenario(os.path.join(SCENARIO_DIR, 'verify_linear.json'))
    assert run_scenario(scenario, tmp_path, tolerance_overrides={'nonsense': 1.0}).exit_code == EXIT_CONFIG


def test_rank_deficient_trace_is_a_configuration_error(tmp_path):
    text = document(trace={"kind": "explicit", "matrix": [[1.0, 1.0, 1.0], [2.0, 2.0, 2.0]]},
                    relation={"kind": "linear", "matrix": [[1.0, 0.0], [0.0, 1.0]]})
    assert run_scenario(parse_scenario(text), tmp_path).exit_code == EXIT_CONFIG


def test_run_file_reports_diagnostics(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text(document(lam_grid=[0.1]))
    outcome = run_file(path, tmp_path / 'out')
    assert outcome.exit_code == EXIT_CONFIG
    assert outcome.diagnostics == [{'pointer': '/lam_grid/0', 'message': '0.1 must exceed lam0=0.5'}]
    assert run_file(tmp_path / 'missing.json', tmp_path / 'out').exit_code == EXIT_CONFIG


def test_suite_exit_code_takes_the_worst(tmp_path):
    suite = tmp_path / 'suite'
    suite.mkdir()
    (suite / 'a_good.json').write_text(document(name='good'))
    (suite / 'b_bad.json').write_text(document(name='bad', lam_grid=[0.1]))
    outcomes = run_suite(suite, tmp_path / 'out', workers=2)
    assert [o.exit_code for o in outcomes] == [EXIT_PASS, EXIT_CONFIG]
    assert suite_exit_code(outcomes) == EXIT_CONFIG
    assert (tmp_path / 'out' / 'good' / 'report.json').exists()


def test_empty_suite_is_rejected(tmp_path):
    with pytest.raises(ScenarioError):
        run_suite(tmp_path, tmp_path / 'out')


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv('KREIN_OUTPUT_DIR', 'elsewhere')
    monkeypatch.setenv('KREIN_LOG_LEVEL', 'debug')
    monkeypatch.setenv('KREIN_WORKERS', '0')
    settings = Settings.from_env()
    assert settings == Settings(output_dir='elsewhere', log_level='DEBUG', workers=1)


def test_trace_ladder_scenario_over_two_time_units(tmp_path):
    outcome = run_file(os.path.join(SCENARIO_DIR, 'ladder_trace.json'), tmp_path)
    assert outcome.exit_code == EXIT_PASS
    table = pd.read_csv(outcome.out_dir / 'ladder.csv')
    distances = table['sup_distance'].to_numpy()[:-1]
    assert len(distances) == 3
    assert np.all(np.diff(distances) < 0)


def test_equilibrium_decay_scenario(tmp_path):
    outcome = run_file(os.path.join(SCENARIO_DIR, 'equilibrium_decay.json'), tmp_path)
    assert outcome.exit_code == EXIT_PASS
    summary = outcome.report['summary']
    assert abs(summary['rate'] - summary['rate_bound']) / summary['rate_bound'] <= 0.05
    names = [c['name'] for c in outcome.report['checks']]
    assert names == ['equilibrium_fixed_point', 'decay_rate']
    frame = pd.read_csv(outcome.out_dir / 'trajectory.csv')
    assert len(frame) == 501


def test_increment_tolerance_is_its_own_key(tmp_path):
    scenario = load_scenario(os.path.join(SCENARIO_DIR, 'evolve_robin_relu.json'))
    assert run_scenario(scenario, tmp_path / 'default').exit_code == EXIT_PASS
    outcome = run_scenario(scenario, tmp_path / 'strict', tolerance_overrides={'increment_decrease': -1.0})
    assert outcome.exit_code == EXIT_TOLERANCE
    failed = [c['name'] for c in outcome.report['checks'] if not c['passed']]
    assert failed == ['increment_decrease']
    assert outcome.report['tolerances']['increment_decrease'] == -1.0
    assert outcome.report['tolerances']['energy_decrease'] == 1e-10


def test_command_line_workers_option(tmp_path, monkeypatch, capsys):
    import run_scenario as cli
    path = os.path.join(SCENARIO_DIR, 'verify_linear.json')
    monkeypatch.setenv('KREIN_WORKERS', '4')
    monkeypatch.setattr(sys, 'argv', ['run_scenario.py', 'run', path, '--out', str(tmp_path), '--workers', '2'])
    assert cli.main() == EXIT_PASS
    assert "Workers: 2" in capsys.readouterr().out
    monkeypatch.setattr(sys, 'argv', ['run_scenario.py', 'run', path, '--out', str(tmp_path), '--workers', '0'])
    assert cli.main() == EXIT_CONFIG


@pytest.mark.slow
@pytest.mark.parametrize("name, active", [
    ('verify_linear', True),
    ('verify_abs_robin', True),
    ('verify_box_relu', True),
    ('verify_l2_potential', True),
    ('verify_friedrichs', False),
])
def test_verify_scenarios_at_full_sample_size(tmp_path, name, active):
    outcome = run_file(os.path.join(SCENARIO_DIR, f'{name}.json'), tmp_path)
    assert outcome.exit_code == EXIT_PASS
    report = outcome.report
    assert json.loads((tmp_path / name / 'report.json').read_text())['report_hash'] == report['report_hash']
    residuals = {}
    for check in report['checks']:
        residuals[check['name']] = max(residuals.get(check['name'], 0.0), check['residual'])
    assert residuals['resolvent_identity'] <= 1e-8
    assert residuals['round_trip'] <= 1e-8
    assert residuals['lambda_independence'] <= 1e-8
    assert (report['summary']['active_fraction'] > 0) == active


@pytest.mark.slow
def test_contraction_scenario_runs_twenty_pairs(tmp_path):
    outcome = run_file(os.path.join(SCENARIO_DIR, 'contraction_abs_box.json'), tmp_path)
    assert outcome.exit_code == EXIT_PASS
    contraction = [c for c in outcome.report['checks'] if c['name'] == 'contraction']
    assert len(contraction) == 1 and contraction[0]['residual'] <= 1e-8
    assert outcome.report['summary']['steps'] == 500


def test_point_pair_scenario_reaches_its_horizon(tmp_path):
    outcome = run_file(os.path.join(SCENARIO_DIR, 'point3d_pair_linear.json'), tmp_path)
    assert outcome.exit_code == EXIT_PASS
    charges = pd.read_csv(outcome.out_dir / 'charges.csv')
    assert len(charges) == 31
    assert charges['t'].iloc[-1] == pytest.approx(3.0, rel=1e-12)
    assert np.all(np.diff(charges['norm'].to_numpy()) <= 1e-10 * charges['norm'].iloc[0])
    assert {c['name'] for c in outcome.report['checks']} == {'weyl_identity', 'green_quadrature', 'norm_increase'}
