"""CSV/JSON report writing and the ``run <config>`` driver."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .jobs import header_for, merge_rows, run_tasks, task_list

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(value)


def csv_text(header, rows) -> str:
    """RFC 4180 quoting, LF line endings, reals to 12 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows))


@dataclass
class JobOutcome:
    name: str
    type: str
    path: str
    rows: int
    violations: int
    errors: list[dict] = field(default_factory=list)

    @property
    def capacity_errors(self) -> int:
        return sum(e["kind"] == "capacity" for e in self.errors)


@dataclass
class ExperimentReport:
    out_dir: str
    jobs: list[JobOutcome]
    manifest_path: str
    exit_code: int

    @property
    def violations(self) -> int:
        return sum(j.violations for j in self.jobs)


def _exit_code(jobs: list[JobOutcome]) -> int:
    if any(e["kind"] == "error" for j in jobs for e in j.errors):
        return EXIT_CONFIG
    if any(j.capacity_errors for j in jobs):
        return EXIT_CAPACITY
    if any(j.violations for j in jobs):
        return EXIT_VIOLATIONS
    return EXIT_OK


def run_config(config: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """Execute every job, flushing each CSV as soon as the job finishes."""
    start = time.time()
    workers = workers or config.workers or os.cpu_count() or 1
    os.makedirs(config.out, exist_ok=True)
    outcomes = []
    for job in config.jobs:
        tasks = task_list(job.type, job.params, config.seed, config.cap_order)
        results = run_tasks(tasks, workers)
        rows = merge_rows(job.type, results)
        path = os.path.join(config.out, f"{job.name}.csv")
        write_csv(path, header_for(job.type, job.params), rows)
        errors = [
            {"unit": str(t[1]), "kind": r.error_kind, "message": r.error}
            for t, r in zip(tasks, results)
            if r.error is not None
        ]
        outcomes.append(JobOutcome(job.name, job.type, path, len(rows), sum(r.violations for r in results), errors))
    code = _exit_code(outcomes)
    manifest = {
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "cap_order": config.cap_order,
        "workers": workers,
        "versions": {
            "cayleydiam": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "platform": sys.platform,
        },
        "wall_time_s": round(time.time() - start, 3),
        "exit_code": code,
        "jobs": [
            {
                "name": o.name,
                "type": o.type,
                "file": os.path.basename(o.path),
                "rows": o.rows,
                "violations": o.violations,
                "errors": o.errors,
            }
            for o in outcomes
        ],
    }
    manifest_path = os.path.join(config.out, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ExperimentReport(config.out, outcomes, manifest_path, code)
