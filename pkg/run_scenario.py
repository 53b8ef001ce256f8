"""
Main script to run Kreĭn extension scenarios
"""
import argparse
import logging
import sys
from typing import Dict, List

from src.scenarios import (
    EXIT_CONFIG,
    Settings,
    run_file,
    run_suite,
    suite_exit_code,
)
from src.errors import ScenarioError


def _parse_tolerances(items: List[str]) -> Dict[str, float]:
    overrides = {}
    for item in items:
        key, sep, value = item.partition('=')
        if not sep:
            raise ValueError(f"--tol expects KEY=VAL, got {item!r}")
        overrides[key.strip()] = float(value)
    return overrides


def _parse_args(settings: Settings) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Run nonlinear Kreĭn extension scenarios.")
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help="Run one scenario file.")
    run.add_argument('scenario', help="Path to a scenario JSON file.")
    run.add_argument('--out', default=settings.output_dir, help="Output root directory.")
    run.add_argument('--seed', type=int, default=None, help="Seed replacing the scenario's own.")
    run.add_argument('--tol', action='append', default=[], metavar='KEY=VAL',
                     help="Tolerance override. Repeat for several keys.")
    run.add_argument('--workers', type=int, default=settings.workers,
                     help="Thread-pool size for grids and ladders (default KREIN_WORKERS).")

    suite = commands.add_parser('suite', help="Run every scenario of a directory.")
    suite.add_argument('directory', help="Directory holding scenario JSON files.")
    suite.add_argument('--out', default=settings.output_dir, help="Output root directory.")
    suite.add_argument('--tol', action='append', default=[], metavar='KEY=VAL',
                       help="Tolerance override. Repeat for several keys.")
    suite.add_argument('--workers', type=int, default=settings.workers,
                       help="Scenarios run concurrently (default KREIN_WORKERS).")
    return parser.parse_args()


def _print_outcome(outcome) -> None:
    status = {0: "PASS", 1: "FAIL", 2: "CONFIG ERROR"}[outcome.exit_code]
    print(f"\n{outcome.name}: {status}")
    if outcome.report is None:
        for diagnostic in outcome.diagnostics or []:
            print(f"  {diagnostic['pointer'] or '/'}: {diagnostic['message']}")
        return
    print(f"Task: {outcome.report['task']}   Seed: {outcome.report['seed']}")
    for check in outcome.report['checks']:
        flag = "ok" if check['passed'] else "FAILED"
        lam = f" λ={check['lam']:g}" if check['lam'] is not None else ""
        mu = f" μ={check['mu']:g}" if check['mu'] is not None else ""
        print(f"  {check['name']:<24}{lam}{mu}: {check['residual']:.3e} (≤ {check['threshold']:.1e}) {flag}")
    if outcome.report['error']:
        print(f"  error: {outcome.report['error']}")
    print(f"Report hash: {outcome.report['report_hash']}")
    print(f"Artifacts written to: {outcome.out_dir}")


def main() -> int:
    settings = Settings.from_env()
    args = _parse_args(settings)
    logging.basicConfig(level=settings.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if args.workers < 1:
        print(f"Error: --workers must be at least 1, got {args.workers}")
        return EXIT_CONFIG
    try:
        tolerances = _parse_tolerances(args.tol)
    except ValueError as exc:
        print(f"Error: {exc}")
        return EXIT_CONFIG

    print("=" * 60)
    print("NONLINEAR KREĬN EXTENSION SCENARIOS")
    print("=" * 60)
    print(f"Output Root: {args.out}")
    print(f"Workers: {args.workers}")
    print("-" * 60)

    if args.command == 'run':
        outcomes = [run_file(args.scenario, args.out, args.workers, tolerances, args.seed)]
    else:
        try:
            outcomes = run_suite(args.directory, args.out, args.workers, tolerances)
        except ScenarioError as exc:
            print(f"Error: {exc}")
            return EXIT_CONFIG

    for outcome in outcomes:
        _print_outcome(outcome)

    exit_code = suite_exit_code(outcomes)
    passed = sum(1 for outcome in outcomes if outcome.exit_code == 0)
    print("\n" + "=" * 60)
    print(f"{passed}/{len(outcomes)} scenarios passed (exit code {exit_code})")
    print("=" * 60)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
