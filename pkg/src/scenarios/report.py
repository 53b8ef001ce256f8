"""
Scenario reports: canonical JSON with a hash over everything but timings
"""
import hashlib
import json
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from ..extensions import CheckResult, ToleranceSet


def _plain(value):
    """Replace numpy scalars and non-finite floats by JSON-safe values"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def canonical_json(payload: Dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(',', ':'), ensure_ascii=True)


def report_hash(report: Dict) -> str:
    """SHA-256 of the canonical report without its timings and hash fields"""
    body = {k: v for k, v in report.items() if k not in ('timings', 'report_hash')}
    return hashlib.sha256(canonical_json(body).encode('utf-8')).hexdigest()


def build_report(name: str, task: str, seed: Optional[int], tolerances: ToleranceSet,
                 checks: List[CheckResult], summary: Dict, timings: Dict[str, float],
                 error: Optional[str] = None) -> Dict:
    """
    Assemble the report document

    Args:
        name: scenario name
        task: task identifier
        seed: seed used, None for deterministic tasks
        tolerances: thresholds in force
        checks: check results
        summary: task-specific values
        timings: wall-clock seconds per phase, excluded from the hash
        error: message of a task failure, if any

    Returns:
        JSON-ready dict including report_hash
    """
    report = _plain({
        'scenario': name,
        'task': task,
        'seed': seed,
        'tolerances': tolerances.to_dict(),
        'checks': [check.to_dict() for check in checks],
        'summary': summary,
        'passed': error is None and all(check.passed for check in checks),
        'error': error,
        'timings': timings,
    })
    report['report_hash'] = report_hash(report)
    return report


def write_report(out_dir: Path, report: Dict) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / 'report.json'
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
