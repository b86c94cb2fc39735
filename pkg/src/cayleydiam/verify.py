"""Corpus-wide verification sweeps with per-check violation counts."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import relations
from .depgraph import (
    build_dep_graph,
    greedy_maximal_matching,
    matching_lower_bound,
    random_maximal_matching,
    verify_observations,
)
from .errors import VerificationError
from .groups import Group
from .sampler import _subset_bits, exact_far_probability, far_mask, independence_mask

log = logging.getLogger(__name__)

CHARACTERIZATION_MAX_ORDER = 12
KLEITMAN_MAX_ORDER = 16
KLEITMAN_PS = (0.1, 0.3, 0.5)

CHECK_NAMES = (
    "observations",
    "table_rows",
    "f_columns",
    "row_pairing",
    "selection",
    "matching",
    "characterization",
    "kleitman",
)


@dataclass
class CheckTally:
    checked: int = 0
    violations: int = 0
    witnesses: list = field(default_factory=list)

    def record(self, ok: bool, witness=None) -> None:
        self.checked += 1
        if not ok:
            self.violations += 1
            if len(self.witnesses) < 10:
                self.witnesses.append(witness)


@dataclass
class VerifySummary:
    tallies: dict[str, CheckTally]
    groups: list[str]

    @property
    def total_checks(self) -> int:
        return sum(t.checked for t in self.tallies.values())

    @property
    def total_violations(self) -> int:
        return sum(t.violations for t in self.tallies.values())

    @property
    def ok(self) -> bool:
        return self.total_violations == 0

    def rows(self) -> list[tuple[str, int, int]]:
        return [(name, t.checked, t.violations) for name, t in self.tallies.items()]


def _guarded(tally: CheckTally, fn, *args):
    try:
        result = fn(*args)
    except VerificationError as exc:
        tally.record(False, exc.witness if exc.witness is not None else str(exc))
        return None
    tally.record(True)
    return result


def check_characterization(G: Group, x: int) -> tuple[bool, int | None]:
    """Far subsets coincide with independent ones; returns (ok, first bad mask)."""
    bits = _subset_bits(G.order)
    diff = np.flatnonzero(far_mask(G, x, bits) != independence_mask(G, x, bits))
    return (diff.size == 0, int(diff[0]) if diff.size else None)


def verify_group(G: Group, tallies: dict[str, CheckTally], seed: int = 0, checks=CHECK_NAMES) -> None:
    for x in range(1, G.order):
        if "observations" in checks:
            rep = verify_observations(G, x)
            tallies["observations"].record(rep.ok, (G.name, x, rep.witnesses))
        need_analysis = {"table_rows", "f_columns", "row_pairing", "selection"} & set(checks)
        a = relations.analyze(G, x) if need_analysis else None
        if "table_rows" in checks:
            _guarded(tallies["table_rows"], relations.verify_table_rows, G, x, a)
        if "f_columns" in checks:
            _guarded(tallies["f_columns"], relations.verify_f_columns, G, x, a)
        if "row_pairing" in checks:
            _guarded(tallies["row_pairing"], relations.row_pairing_census, G, x, a)
        if "selection" in checks:
            _guarded(tallies["selection"], relations.selection_expectation_check, G, x, a)
        if "matching" in checks:
            dg = build_dep_graph(G, x)
            bound = matching_lower_bound(G.order)
            sizes = (greedy_maximal_matching(dg), random_maximal_matching(dg, seed + x))
            tallies["matching"].record(min(sizes) >= bound, (G.name, x, sizes, bound))
        if "characterization" in checks and G.order <= CHARACTERIZATION_MAX_ORDER:
            ok, mask = check_characterization(G, x)
            tallies["characterization"].record(ok, (G.name, x, mask))
        if "kleitman" in checks and G.order <= KLEITMAN_MAX_ORDER:
            for p in KLEITMAN_PS:
                r = exact_far_probability(G, x, p)
                tallies["kleitman"].record(r.ok, (G.name, x, p, r.exact, r.bound))


def verify_all(groups, seed: int = 0, checks=CHECK_NAMES) -> VerifySummary:
    """Run every structural check on every ``(G, x)``, x != 1, of ``groups``."""
    groups = list(groups)
    tallies = {name: CheckTally() for name in checks}
    if not groups:
        log.warning("verify_all called with an empty corpus; nothing was checked")
    for G in groups:
        verify_group(G, tallies, seed, checks)
    return VerifySummary(tallies, [G.name for G in groups])
