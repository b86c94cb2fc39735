"""Job runners shared by the CLI subcommands and ``run <config>``.

A job is split into independent tasks (usually one per group).  Each task is
a picklable ``(kind, unit, params, seed, cap_order)`` tuple whose result only
depends on that tuple, so results can be computed on any worker and merged
in task order.
"""

from __future__ import annotations

import math
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import relations
from .corpus import closure_witness_groups, default_corpus, extra_corpus, small_corpus
from .depgraph import build_dep_graph, greedy_maximal_matching, verify_observations
from .errors import CapacityError, CayleyDiamError, DomainError, VerificationError
from .families import (
    build_family_member,
    closed_form_threshold,
    family_census,
    involution_proportion,
    parse_family,
)
from .functional import EXACT_CAP, estimated_profile, exact_profile
from .groups import Group, build_group, descriptor_order, parse_descriptor
from .rng import derive
from .sampler import c_from_p, exact_far_probability, monte_carlo_diam2, p_from_c

HEADERS = {
    "f_eval": ("group", "order", "c", "f_total", "log10_f", "f_tilde", "mode", "seed"),
    "simulate": ("group", "order", "p", "c_equiv", "trials", "successes", "p_hat", "ci_lo", "ci_hi", "seed"),
    "exact": ("group", "x_index", "p", "exact_prob", "kleitman_bound", "ok"),
    "depgraph": ("group", "x_index", "order", "loops", "edges", "max_degree", "matching_size"),
    "verify_tables": (
        "row",
        "printed_partition",
        "derived_partition",
        "population",
        "printed_partition_mismatches",
        "violations",
    ),
    "verify_observations": (
        "group",
        "order",
        "pairs",
        "max_degree_violations",
        "isolated_violations",
        "loop_census_violations",
        "pair_multiplicity_violations",
    ),
    "family_descriptor": ("spec", "k", "descriptor", "order"),
    "family_threshold": ("spec", "k", "threshold", "threshold_value", "involution_proportion"),
    "family_census": ("spec", "k", "check", "group", "x_index", "value", "expected", "slack", "ok"),
}


@dataclass
class TaskResult:
    rows: list[tuple] = field(default_factory=list)
    violations: int = 0
    stats: dict = field(default_factory=dict)
    error: str | None = None
    error_kind: str | None = None


def header_for(kind: str, params: dict) -> tuple[str, ...]:
    if kind == "family":
        return HEADERS[f"family_{params['emit']}"]
    return HEADERS[kind]


def resolve_corpus(name: str) -> list[str]:
    if name == "default":
        groups = default_corpus()
    elif name == "extra":
        groups = extra_corpus()
    elif name == "witness":
        groups = closure_witness_groups()
    else:
        groups = small_corpus(int(name.partition(":")[2]))
    return [str(G.descriptor) for G in groups]


def _group(desc: str, cap_order: int) -> Group:
    d = parse_descriptor(desc)
    order = descriptor_order(d)
    if order > cap_order:
        raise CapacityError(f"{desc} has order {order}, above the cap {cap_order}")
    return build_group(d)


def _xs(G: Group, xs) -> list[int]:
    if xs == "all":
        return list(range(1, G.order))
    bad = [x for x in xs if not 1 <= x < G.order]
    if bad:
        raise DomainError(f"x index {bad[0]} out of range for {G.name}")
    return list(xs)


def _group_seed(seed: int, G: Group) -> int:
    """Per-group stream key, stable across runs and platforms."""
    return derive(seed, zlib.crc32(G.name.encode()))


def _partition_text(partition) -> str:
    return "|".join("".join(map(str, b)) for b in partition)


def task_list(kind: str, params: dict, seed: int, cap_order: int) -> list[tuple]:
    if kind == "family":
        units = list(params["k"])
    elif kind.startswith("verify"):
        units = params["groups"] if params.get("groups") is not None else resolve_corpus(params["corpus"])
    else:
        units = list(params["groups"])
    return [(kind, unit, params, seed, cap_order) for unit in units]


def run_task(task: tuple) -> TaskResult:
    kind, unit, params, seed, cap_order = task
    try:
        return _RUNNERS[kind](unit, params, seed, cap_order)
    except CapacityError as exc:
        return TaskResult(error=str(exc), error_kind="capacity")
    except CayleyDiamError as exc:
        return TaskResult(error=str(exc), error_kind="error")


def _f_eval(desc, params, seed, cap_order):
    G = _group(desc, cap_order)
    mode = params["mode"]
    task_seed = None
    if mode == "estimate":
        task_seed = _group_seed(seed, G)
        prof = estimated_profile(G, params["x_sample"], params["y_sample"], task_seed)
    else:
        prof = exact_profile(G, EXACT_CAP, factorised=mode == "factorised")
    rows = []
    for c in params["c"]:
        lf = prof.log_f(c)
        lt = prof.log_f(c, tilde=True)
        rows.append(
            (
                G.name,
                G.order,
                c,
                math.exp(lf) if lf > -math.inf else 0.0,
                lf / math.log(10) if lf > -math.inf else -math.inf,
                math.exp(lt) if lt > -math.inf else 0.0,
                prof.mode,
                task_seed,
            )
        )
    return TaskResult(rows)


def _simulate(desc, params, seed, cap_order):
    G = _group(desc, cap_order)
    if params["p"] is not None:
        ps = list(params["p"])
    else:
        ps = [p_from_c(G.order, c) for c in params["c"]]
    rows = []
    for i, p in enumerate(ps):
        task_seed = derive(_group_seed(seed, G), i)
        s = monte_carlo_diam2(G, p, params["trials"], task_seed)
        lo, hi = s.wilson_ci
        c_equiv = c_from_p(G.order, p) if G.order > 1 else float("nan")
        rows.append((G.name, G.order, p, c_equiv, s.trials, s.successes, s.p_hat, lo, hi, task_seed))
    return TaskResult(rows)


def _exact(desc, params, seed, cap_order):
    G = _group(desc, cap_order)
    rows, bad = [], 0
    for x in _xs(G, params["x"]):
        for p in params["p"]:
            r = exact_far_probability(G, x, p)
            bad += not r.ok
            rows.append((G.name, x, p, r.exact, r.bound, r.ok))
    return TaskResult(rows, bad)


def _depgraph(desc, params, seed, cap_order):
    G = _group(desc, cap_order)
    rows = []
    for x in _xs(G, params["x"]):
        dg = build_dep_graph(G, x)
        rows.append((G.name, x, G.order, dg.loop_count, dg.edge_count, dg.max_degree, greedy_maximal_matching(dg)))
    return TaskResult(rows)


def _verify_tables(desc, params, seed, cap_order):
    G = _group(desc, cap_order)
    population: Counter = Counter()
    printed_bad: Counter = Counter()
    violations: Counter = Counter()
    for x in range(1, G.order):
        a = relations.analyze(G, x)
        steps = (
            relations.verify_table_rows,
            relations.verify_f_columns,
            relations.row_pairing_census,
            relations.selection_expectation_check,
        )
        for step in steps:
            try:
                out = step(G, x, a)
            except VerificationError as exc:
                w = exc.witness
                y = w[2] if isinstance(w, tuple) and len(w) > 2 and isinstance(w[2], int) else None
                violations[int(a.rows[y]) if y is not None else 0] += 1
                continue
            if step is relations.verify_table_rows:
                population.update(out)
        mism = a.eligible & ~a.printed_ok
        printed_bad.update(a.rows[mism].tolist())
    stats = {"population": population, "printed": printed_bad, "violations": violations}
    return TaskResult([], sum(violations.values()), stats)


def _verify_observations(desc, params, seed, cap_order):
    G = _group(desc, cap_order)
    counts = [0, 0, 0, 0]
    for x in range(1, G.order):
        rep = verify_observations(G, x)
        for i, ok in enumerate((rep.max_degree_ok, rep.no_isolated_ok, rep.loop_census_ok, rep.pair_multiplicity_ok)):
            counts[i] += not ok
    return TaskResult([(G.name, G.order, G.order - 1, *counts)], sum(counts))


def _family(k, params, seed, cap_order):
    spec = parse_family(params["spec"])
    emit = params["emit"]
    desc = build_family_member(spec, k, cap_order)
    if emit == "descriptor":
        return TaskResult([(str(spec), k, str(desc), descriptor_order(desc))])
    if emit == "threshold":
        t = closed_form_threshold(spec)
        alpha = involution_proportion(build_group(desc)) if descriptor_order(desc) <= cap_order else None
        return TaskResult([(str(spec), k, _fraction_text(t), float(t), _fraction_text(alpha) if alpha is not None else None)])
    checks = family_census(spec, k, cap_order)
    rows = [(str(spec), k, c.name, c.group, c.x, c.value, c.expected, c.slack, c.ok) for c in checks]
    return TaskResult(rows, sum(not c.ok for c in checks))


def _fraction_text(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


_RUNNERS = {
    "f_eval": _f_eval,
    "simulate": _simulate,
    "exact": _exact,
    "depgraph": _depgraph,
    "verify_tables": _verify_tables,
    "verify_observations": _verify_observations,
    "family": _family,
}


def table_rows_report(results: list[TaskResult]) -> list[tuple]:
    """Merge per-group table statistics into one row per table row."""
    population: Counter = Counter()
    printed: Counter = Counter()
    violations: Counter = Counter()
    for r in results:
        if r.stats:
            population.update(r.stats["population"])
            printed.update(r.stats["printed"])
            violations.update(r.stats["violations"])
    out = []
    for row in relations.TABLE_ROWS:
        out.append(
            (
                row.row_id,
                _partition_text(row.printed_partition),
                _partition_text(row.partition),
                population[row.row_id],
                printed[row.row_id],
                violations[row.row_id],
            )
        )
    if violations[0]:
        out.append((0, "", "", 0, 0, violations[0]))
    return out


def merge_rows(kind: str, results: list[TaskResult]) -> list[tuple]:
    if kind == "verify_tables":
        return table_rows_report(results)
    return [row for r in results for row in r.rows]


def run_tasks(tasks: list[tuple], workers: int = 1) -> list[TaskResult]:
    """Run tasks on a process pool; results come back in task order."""
    if workers <= 1 or len(tasks) <= 1:
        return [run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(run_task, tasks))
