"""
Configuration-driven scenario runner: schema, builders, tasks and reports
"""
from .builders import build_abstract, build_relation, build_trace, robin_trace
from .report import build_report, report_hash
from .runner import (
    EXIT_CONFIG,
    EXIT_PASS,
    EXIT_TOLERANCE,
    RunOutcome,
    Settings,
    load_scenario,
    run_file,
    run_scenario,
    run_suite,
    suite_exit_code,
)
from .schema import Scenario, parse_scenario
from .tasks import TASKS, TaskOutcome

__all__ = [
    'EXIT_CONFIG',
    'EXIT_PASS',
    'EXIT_TOLERANCE',
    'RunOutcome',
    'Scenario',
    'Settings',
    'TASKS',
    'TaskOutcome',
    'build_abstract',
    'build_relation',
    'build_report',
    'build_trace',
    'load_scenario',
    'parse_scenario',
    'report_hash',
    'robin_trace',
    'run_file',
    'run_scenario',
    'run_suite',
    'suite_exit_code',
]
