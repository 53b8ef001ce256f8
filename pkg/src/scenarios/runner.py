"""
Scenario runner: parse, dispatch, write artifacts and map outcomes to exit codes
"""
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Union

from dotenv import load_dotenv

from ..errors import (
    InvalidShiftError,
    KreinError,
    RejectedInputError,
    ScenarioError,
    StepSizeError,
    UnsupportedConfigurationError,
    UnsupportedRelationError,
)
from . import builders
from .report import build_report, write_report
from .schema import Scenario, parse_scenario
from .tasks import TASKS

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2

CONFIG_ERRORS = (
    ScenarioError,
    RejectedInputError,
    InvalidShiftError,
    UnsupportedRelationError,
    UnsupportedConfigurationError,
    StepSizeError,
)


@dataclass(frozen=True)
class Settings:
    """Environment-level defaults of the command-line runner"""

    output_dir: str = "results"           # KREIN_OUTPUT_DIR
    log_level: str = "INFO"               # KREIN_LOG_LEVEL
    workers: int = 4                      # KREIN_WORKERS

    @classmethod
    def from_env(cls) -> 'Settings':
        return cls(
            output_dir=os.getenv('KREIN_OUTPUT_DIR', cls.output_dir),
            log_level=os.getenv('KREIN_LOG_LEVEL', cls.log_level).upper(),
            workers=max(1, int(os.getenv('KREIN_WORKERS', cls.workers))),
        )


@dataclass
class RunOutcome:
    """Exit status, report and output directory of one scenario run"""
    name: str
    exit_code: int
    report: Optional[Dict]
    out_dir: Optional[Path]
    diagnostics: Optional[List[Dict]] = None


def load_scenario(path: Union[str, Path]) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def run_scenario(scenario: Scenario, out_dir: Union[str, Path], workers: int = 1,
                 tolerance_overrides: Optional[Dict[str, float]] = None,
                 seed: Optional[int] = None) -> RunOutcome:
    """
    Execute one scenario and write report.json plus CSV tables

    Args:
        scenario: parsed scenario
        out_dir: scenario-scoped output directory
        workers: thread-pool size for grids and ladders
        tolerance_overrides: thresholds from the command line
        seed: seed replacing the scenario's own

    Returns:
        RunOutcome with exit code 0 (pass), 1 (tolerance failure) or 2 (configuration error)
    """
    if seed is not None:
        scenario = scenario.model_copy(update={'seed': seed})
    out_dir = Path(out_dir)
    try:
        tolerances = builders.build_tolerances(scenario, tolerance_overrides)
    except RejectedInputError as exc:
        logger.error("%s: %s", scenario.name, exc)
        return RunOutcome(scenario.name, EXIT_CONFIG, None, None)

    logger.info("Running scenario %s (task %s)", scenario.name, scenario.task)
    started = time.perf_counter()
    error = None
    try:
        outcome = TASKS[scenario.task](scenario, tolerances, workers)
    except CONFIG_ERRORS as exc:
        logger.error("%s: configuration error in task %s: %s", scenario.name, scenario.task, exc)
        return RunOutcome(scenario.name, EXIT_CONFIG, None, None)
    except KreinError as exc:
        logger.error("%s: task %s failed: %s", scenario.name, scenario.task, exc)
        outcome = None
        error = f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - started

    checks = outcome.checks if outcome else []
    summary = outcome.summary if outcome else {}
    report = build_report(scenario.name, scenario.task, scenario.seed, tolerances, checks, summary,
                          {'task_seconds': elapsed}, error)
    write_report(out_dir, report)
    if outcome:
        for name, table in outcome.tables.items():
            table.to_csv(out_dir / f"{name}.csv", index=False, float_format='%.17g')

    for check in checks:
        if not check.passed:
            logger.warning("%s: check %s failed (%.3e > %.3e)", scenario.name, check.name,
                           check.residual, check.threshold)
    exit_code = EXIT_PASS if report['passed'] else EXIT_TOLERANCE
    logger.info("Scenario %s finished in %.2fs: %s", scenario.name, elapsed,
                "pass" if exit_code == EXIT_PASS else "FAIL")
    return RunOutcome(scenario.name, exit_code, report, out_dir)


def run_file(path: Union[str, Path], out_root: Union[str, Path], workers: int = 1,
             tolerance_overrides: Optional[Dict[str, float]] = None,
             seed: Optional[int] = None) -> RunOutcome:
    """Parse a scenario file and run it into out_root/<scenario name>"""
    path = Path(path)
    try:
        scenario = load_scenario(path)
    except OSError as exc:
        logger.error("%s: cannot read scenario: %s", path, exc)
        return RunOutcome(path.stem, EXIT_CONFIG, None, None, [{"pointer": "", "message": str(exc)}])
    except ScenarioError as exc:
        for diagnostic in exc.diagnostics:
            logger.error("%s%s: %s", path.name, diagnostic.pointer, diagnostic.message)
        return RunOutcome(path.stem, EXIT_CONFIG, None, None, [d.to_dict() for d in exc.diagnostics])
    return run_scenario(scenario, Path(out_root) / scenario.name, workers, tolerance_overrides, seed)


def run_suite(directory: Union[str, Path], out_root: Union[str, Path], workers: int = 1,
              tolerance_overrides: Optional[Dict[str, float]] = None) -> List[RunOutcome]:
    """Run every *.json scenario of a directory in a thread pool, ordered by file name"""
    paths = sorted(Path(directory).glob('*.json'))
    if not paths:
        raise ScenarioError([], f"no scenario files in {directory}")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = [
            executor.submit(run_file, path, out_root, 1, tolerance_overrides)
            for path in paths
        ]
        return [future.result() for future in futures]


def suite_exit_code(outcomes: List[RunOutcome]) -> int:
    """Configuration errors dominate tolerance failures"""
    return max((outcome.exit_code for outcome in outcomes), default=EXIT_PASS)
