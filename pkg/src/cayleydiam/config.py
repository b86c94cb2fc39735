"""Strict JSON schema for experiment configs.

Top level::

    {"seed": 0, "workers": 1, "out": "results", "cap_order": 1048576,
     "jobs": [{"type": "f_eval", "groups": ["cyclic:5"], "c": [0.5, 1]}, ...]}

Every key is checked; unknown keys are rejected with their path
(``unknown key at jobs[0].trails``).
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ConfigError, DescriptorError, DomainError
from .families import parse_family
from .groups import parse_descriptor

U64_MAX = (1 << 64) - 1
DEFAULT_CAP_ORDER = 1 << 20
CORPUS_NAMES = ("default", "extra", "witness")


def _int(path: str, value, lo: int = 0, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path} must be an integer, got {value!r}")
    if value < lo or (hi is not None and value > hi):
        raise ConfigError(f"{path} must lie in [{lo}, {hi if hi is not None else 'inf'}], got {value}")
    return value


def _u64(path, value):
    return _int(path, value, 0, U64_MAX)


def _positive(path, value):
    return _int(path, value, 1)


def _real(path: str, value, lo: float | None = None, hi: float | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number, got {value!r}")
    value = float(value)
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise ConfigError(f"{path} must lie in [{lo}, {hi}], got {value}")
    return value


def _list(path: str, value, item: Callable[[str, Any], Any]) -> list:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path} must be a non-empty list")
    return [item(f"{path}[{i}]", v) for i, v in enumerate(value)]


def _descriptor(path, value) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{path} must be a group descriptor string")
    try:
        return str(parse_descriptor(value))
    except (DescriptorError, OSError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _family(path, value) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{path} must be a family spec string")
    try:
        return str(parse_family(value))
    except (DescriptorError, DomainError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _choice(*options):
    def check(path, value):
        if value not in options:
            raise ConfigError(f"{path} must be one of {', '.join(options)}, got {value!r}")
        return value

    return check


def _corpus(path, value) -> str:
    if isinstance(value, str):
        if value in CORPUS_NAMES:
            return value
        name, _, arg = value.partition(":")
        if name == "small" and arg.isdigit():
            return value
    raise ConfigError(f"{path} must be one of {', '.join(CORPUS_NAMES)} or small:<max order>, got {value!r}")


def _xs(path, value):
    if value == "all":
        return value
    return _list(path, value, lambda p, v: _int(p, v, 1))


def _name(path, value):
    if not isinstance(value, str) or not value or os.sep in value or value.startswith("."):
        raise ConfigError(f"{path} must be a plain file stem")
    return value


def _bool(path, value):
    if not isinstance(value, bool):
        raise ConfigError(f"{path} must be true or false")
    return value


_COMMON = {"type": None, "name": _name}
_REALS = lambda p, v: _list(p, v, lambda q, x: _real(q, x, lo=0.0))  # noqa: E731
_PROBS = lambda p, v: _list(p, v, lambda q, x: _real(q, x, 0.0, 1.0))  # noqa: E731
_GROUPS = lambda p, v: _list(p, v, _descriptor)  # noqa: E731

# (required keys, optional keys with defaults)
JOB_SCHEMAS: dict[str, tuple[dict, dict]] = {
    "f_eval": (
        {"groups": _GROUPS, "c": _REALS},
        {
            "mode": (_choice("exact", "factorised", "estimate"), "exact"),
            "x_sample": (_positive, 4096),
            "y_sample": (_positive, 1 << 16),
        },
    ),
    "simulate": (
        {"groups": _GROUPS, "trials": _positive},
        {"p": (_PROBS, None), "c": (_REALS, None)},
    ),
    "exact": (
        {"groups": _GROUPS, "p": _PROBS},
        {"x": (_xs, "all")},
    ),
    "depgraph": (
        {"groups": _GROUPS},
        {"x": (_xs, "all")},
    ),
    "verify_tables": ({}, {"groups": (_GROUPS, None), "corpus": (_corpus, None)}),
    "verify_observations": ({}, {"groups": (_GROUPS, None), "corpus": (_corpus, None)}),
    "family": (
        {"spec": _family, "k": lambda p, v: _list(p, v, _positive)},
        {"emit": (_choice("descriptor", "threshold", "census"), "descriptor")},
    ),
}

_TOP = {
    "seed": (_u64, 0),
    "workers": (_positive, None),
    "out": (lambda p, v: v if isinstance(v, str) and v else _raise(f"{p} must be a path string"), "results"),
    "cap_order": (_positive, DEFAULT_CAP_ORDER),
}


def _raise(message: str):
    raise ConfigError(message)


@dataclass
class JobConfig:
    type: str
    name: str
    params: dict

    def semantic(self) -> dict:
        return {"type": self.type, "name": self.name, **self.params}


@dataclass
class ExperimentConfig:
    jobs: list[JobConfig]
    seed: int = 0
    workers: int | None = None
    out: str = "results"
    cap_order: int = DEFAULT_CAP_ORDER
    source: dict = field(default_factory=dict, repr=False)

    def semantic(self) -> dict:
        """Fields that determine the report bodies (worker count and paths excluded)."""
        return {"seed": self.seed, "cap_order": self.cap_order, "jobs": [j.semantic() for j in self.jobs]}

    def config_hash(self) -> str:
        blob = json.dumps(self.semantic(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _validate_job(path: str, raw) -> JobConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must be an object")
    if "type" not in raw:
        raise ConfigError(f"missing key at {path}.type")
    kind = raw["type"]
    if kind not in JOB_SCHEMAS:
        raise ConfigError(f"{path}.type must be one of {', '.join(JOB_SCHEMAS)}, got {kind!r}")
    required, optional = JOB_SCHEMAS[kind]
    for key in raw:
        if key not in required and key not in optional and key not in _COMMON:
            raise ConfigError(f"unknown key at {path}.{key}")
    params = {}
    for key, check in required.items():
        if key not in raw:
            raise ConfigError(f"missing key at {path}.{key}")
        params[key] = check(f"{path}.{key}", raw[key])
    for key, (check, default) in optional.items():
        params[key] = check(f"{path}.{key}", raw[key]) if key in raw else default
    if kind == "simulate" and (params["p"] is None) == (params["c"] is None):
        raise ConfigError(f"{path} needs exactly one of p or c")
    if kind.startswith("verify") and (params["groups"] is None) == (params["corpus"] is None):
        raise ConfigError(f"{path} needs exactly one of groups or corpus")
    name = _name(f"{path}.name", raw["name"]) if "name" in raw else None
    return JobConfig(kind, name or "", params)


def validate_config(raw) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for key in raw:
        if key not in _TOP and key != "jobs":
            raise ConfigError(f"unknown key at {key}")
    if "jobs" not in raw:
        raise ConfigError("missing key at jobs")
    if not isinstance(raw["jobs"], list):
        raise ConfigError("jobs must be a list")
    jobs = [_validate_job(f"jobs[{i}]", j) for i, j in enumerate(raw["jobs"])]
    for i, job in enumerate(jobs):
        if not job.name:
            job.name = f"{i:02d}_{job.type}"
    names = [j.name for j in jobs]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise ConfigError(f"duplicate job names: {', '.join(sorted(dup))}")
    shared = {key: (check(key, raw[key]) if key in raw else default) for key, (check, default) in _TOP.items()}
    return ExperimentConfig(jobs, source=raw, **shared)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return validate_config(raw)
