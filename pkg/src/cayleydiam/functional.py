"""The threshold functional and the trend-based threshold classifier.

For x != 1 in a group of order n, with e and l the edge and loop counts of
its dependency graph and s = 1 when x^2 = 1 (else 2):

    log g(x)   = -(e / n) * ln n
    log h(x)   = -s * sqrt(ln n / n) * l
    f(x; c)    = g(x)^c * h(x)^sqrt(c)
    f(c)       = sum over x != 1 of f(x; c)
    f~(c)      = sum over x != 1 of g(x)^c

Natural logarithms throughout.  Sums are taken in log space with an exactly
rounded ``math.fsum`` so results do not depend on summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import rng
from .depgraph import _check_x, degrees, dep_census, factorised_edge_count
from .errors import BracketError, CapacityError, DomainError
from .groups import Group, build_group

EXACT_CAP = 10**4
DEFAULT_X_SAMPLE = 4096
DEFAULT_Y_SAMPLE = 1 << 16


def _check_c(c: float) -> float:
    c = float(c)
    if not c > 0 or not math.isfinite(c):
        raise DomainError(f"c must be a positive real, got {c}")
    return c


def _square_factor(G: Group, x: int) -> int:
    return 1 if G.square(x) == 0 else 2


@dataclass(frozen=True)
class FunctionalTerm:
    x: int
    log_g: float
    log_h: float
    c: float

    @property
    def log_f(self) -> float:
        return self.c * self.log_g + math.sqrt(self.c) * self.log_h

    @property
    def value(self) -> float:
        return math.exp(self.log_f)


def _logs(n: int, edges: float, loops: float, s) -> tuple:
    ln = math.log(n)
    return -(edges / n) * ln, -s * math.sqrt(ln / n) * loops


def functional_term(G: Group, x: int, c: float) -> FunctionalTerm:
    x = _check_x(G, x)
    c = _check_c(c)
    loops, edges = dep_census(G, x)
    log_g, log_h = _logs(G.order, edges, loops, _square_factor(G, x))
    return FunctionalTerm(x, log_g, log_h, c)


def g_value(G: Group, x: int) -> float:
    x = _check_x(G, x)
    _, edges = dep_census(G, x)
    return math.exp(_logs(G.order, edges, 0, 1)[0])


def h_value(G: Group, x: int) -> float:
    x = _check_x(G, x)
    loops, _ = dep_census(G, x)
    return math.exp(_logs(G.order, 0, loops, _square_factor(G, x))[1])


def f_term(G: Group, x: int, c: float) -> float:
    return functional_term(G, x, c).value


# --------------------------------------------------------------------------
# profiles: the (weight, e/n, l, s) data that determines f at every c
# --------------------------------------------------------------------------


def _log_sum(terms: np.ndarray) -> float:
    if terms.size == 0:
        return -math.inf
    top = float(np.max(terms))
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(np.exp(terms - top).tolist()))


@dataclass
class Profile:
    """Per-x data of one group, over x-orbit representatives or sampled x.

    ``weight`` is the number of group elements each entry stands for.
    ``edge_var`` is the sampling variance of each ``edge_ratio`` (zero when
    exact); ``x_sampled`` marks Horvitz-Thompson sampling of x.
    """

    group: str
    order: int
    xs: np.ndarray
    weight: np.ndarray
    edge_ratio: np.ndarray
    loops: np.ndarray
    square_factor: np.ndarray
    mode: str = "exact"
    seed: int | None = None
    edge_var: np.ndarray | None = field(default=None, repr=False)
    x_sampled: bool = False

    def log_terms(self, c: float, tilde: bool = False) -> np.ndarray:
        c = _check_c(c)
        n = self.order
        ln = math.log(n)
        out = np.log(self.weight.astype(np.float64)) - c * self.edge_ratio * ln
        if not tilde:
            out = out - math.sqrt(c) * self.square_factor * math.sqrt(ln / n) * self.loops
        return out

    def log_f(self, c: float, tilde: bool = False) -> float:
        """Natural log of f(c) (or of f~(c))."""
        if self.order < 2:
            return -math.inf
        return _log_sum(self.log_terms(c, tilde))

    def se_log_f(self, c: float, tilde: bool = False) -> float:
        """Delta-method standard error of ``log_f`` from y and x sampling."""
        if self.order < 2 or self.xs.size == 0:
            return 0.0
        terms = self.log_terms(c, tilde)
        total = self.log_f(c, tilde)
        rel = np.exp(terms - total)  # share of each entry in f
        var = 0.0
        if self.edge_var is not None:
            sens = c * math.log(self.order)
            var += float(np.sum((rel * sens) ** 2 * self.edge_var))
        if self.x_sampled and self.xs.size > 1:
            k = self.xs.size
            per = rel * k  # each sampled x's estimate of f, relative to the mean
            var += float(np.var(per, ddof=1)) / k
        return math.sqrt(var)


def orbit_entries(G: Group) -> list[tuple[int, int]]:
    return [(rep, size) for rep, size in G.orbits() if rep != 0]


def exact_profile(G: Group, cap: int = EXACT_CAP, factorised: bool = False) -> Profile:
    """Profile from a full census of every dependency graph (one per x-orbit)."""
    if not factorised and G.order > cap:
        raise CapacityError(
            f"exact evaluation of {G.name} (order {G.order}) exceeds the cap {cap}; use f_total_estimate"
        )
    entries = orbit_entries(G)
    xs = np.array([r for r, _ in entries], dtype=np.int64)
    weight = np.array([s for _, s in entries], dtype=np.float64)
    edges, loops, sf = [], [], []
    for x in xs.tolist():
        if factorised:
            e = factorised_edge_count(G, x)
            lc = G.root_count(x) * _square_factor(G, x)
        else:
            lc, e = dep_census(G, x)
        edges.append(e / G.order)
        loops.append(lc)
        sf.append(_square_factor(G, x))
    return Profile(
        G.name,
        G.order,
        xs,
        weight,
        np.array(edges, dtype=np.float64),
        np.array(loops, dtype=np.float64),
        np.array(sf, dtype=np.float64),
        mode="factorised" if factorised else "exact",
    )


def estimated_profile(
    G: Group, x_sample: int = DEFAULT_X_SAMPLE, y_sample: int = DEFAULT_Y_SAMPLE, seed: int = 0
) -> Profile:
    """Profile with ``e/n`` estimated from ``y_sample`` uniform vertices per x.

    When the group has at most ``x_sample`` non-identity orbits every orbit
    is used with its exact size; otherwise ``x_sample`` elements are drawn
    uniformly from G minus the identity.  With ``y_sample >= n`` every vertex
    is visited and the estimate is exact.
    """
    if x_sample < 1 or y_sample < 1:
        raise DomainError("sample counts must be at least 1")
    n = G.order
    entries = orbit_entries(G)
    if len(entries) <= x_sample:
        xs = np.array([r for r, _ in entries], dtype=np.int64)
        weight = np.array([s for _, s in entries], dtype=np.float64)
        sampled = False
    else:
        xs = 1 + rng.integers(rng.derive(seed, 1), x_sample, n - 1)
        weight = np.full(x_sample, (n - 1) / x_sample)
        sampled = True
    ratios, var, loops, sf = [], [], [], []
    for i, x in enumerate(xs.tolist()):
        if y_sample >= n:
            _, e = dep_census(G, x)
            ratios.append(e / n)
            var.append(0.0)
        else:
            ys = rng.integers(rng.derive(seed, 2, i), y_sample, n)
            d = degrees(G, x, ys).astype(np.float64)
            ratios.append(float(d.mean()) / 2)
            var.append(float(d.var(ddof=1)) / (4 * y_sample) if y_sample > 1 else 0.0)
        s = _square_factor(G, x)
        loops.append(G.root_count(x) * s)
        sf.append(s)
    return Profile(
        G.name,
        n,
        xs,
        weight,
        np.array(ratios),
        np.array(loops, dtype=np.float64),
        np.array(sf, dtype=np.float64),
        mode="estimate",
        seed=seed,
        edge_var=np.array(var),
        x_sampled=sampled,
    )


# --------------------------------------------------------------------------
# totals
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionalTotal:
    value: float
    log10: float
    log_value: float
    se_log: float = 0.0
    mode: str = "exact"
    seed: int | None = None

    def __float__(self) -> float:
        return self.value


def _total(profile: Profile, c: float, tilde: bool = False) -> FunctionalTotal:
    lv = profile.log_f(c, tilde)
    return FunctionalTotal(
        math.exp(lv) if lv > -math.inf else 0.0,
        lv / math.log(10) if lv > -math.inf else -math.inf,
        lv,
        profile.se_log_f(c, tilde) if profile.mode == "estimate" else 0.0,
        profile.mode,
        profile.seed,
    )


def f_total(G: Group, c: float, mode: str = "exact", cap: int = EXACT_CAP) -> FunctionalTotal:
    """f(c) summed over every x != 1.

    ``mode="exact"`` enumerates every vertex and is limited to ``order <= cap``;
    ``mode="factorised"`` computes the same edge counts from the coordinate
    patterns of a direct product and has no order cap.
    """
    c = _check_c(c)
    if mode not in ("exact", "factorised"):
        raise DomainError(f"unknown f_total mode {mode!r}")
    return _total(exact_profile(G, cap, factorised=mode == "factorised"), c)


def f_total_estimate(
    G: Group,
    c: float,
    x_sample: int = DEFAULT_X_SAMPLE,
    y_sample: int = DEFAULT_Y_SAMPLE,
    seed: int = 0,
) -> FunctionalTotal:
    c = _check_c(c)
    return _total(estimated_profile(G, x_sample, y_sample, seed), c)


def f_tilde(G: Group, c: float, mode: str = "exact", cap: int = EXACT_CAP) -> float:
    """Sum of g(x)^c over x != 1 (loop factor dropped)."""
    c = _check_c(c)
    return _total(exact_profile(G, cap, factorised=mode == "factorised"), c, tilde=True).value


def naive_f_total(G: Group, c: float) -> float:
    """Direct product-form sum over every x, for cross-checking the log-space path."""
    c = _check_c(c)
    n = G.order
    total = 0.0
    for x in range(1, n):
        loops, edges = dep_census(G, x)
        g = n ** (-edges / n)
        h = math.exp(-_square_factor(G, x) * math.sqrt(math.log(n) / n) * loops)
        total += g**c * h ** math.sqrt(c)
    return total


# --------------------------------------------------------------------------
# trend classification and bracketing
# --------------------------------------------------------------------------

DIVERGING = "diverging"
VANISHING = "vanishing"
INCONCLUSIVE = "inconclusive"


def classify_trend(values: Sequence[float], level: float = 0.0, tail: int = 3) -> str:
    """Verdict on a sequence of log f values over increasing group order.

    Diverging: the last ``tail`` values strictly increase and the final one
    exceeds ``level``.  Vanishing: they strictly decrease and the final one is
    below ``-level``.  Anything else is inconclusive.
    """
    v = [float(t) for t in values][-tail:]
    if len(v) < tail or any(math.isnan(t) for t in v):
        return INCONCLUSIVE
    steps = [b - a for a, b in zip(v, v[1:])]
    if all(s > 0 for s in steps) and v[-1] > level:
        return DIVERGING
    if all(s < 0 for s in steps) and v[-1] < -level:
        return VANISHING
    return INCONCLUSIVE


@dataclass
class FamilyTrend:
    """A family of groups of increasing order, reduced to per-member profiles.

    Every evaluation of the trend at some c is recorded in ``records`` as
    ``(c, log f values, verdict)``; that list is the trend matrix.
    """

    family: str
    profiles: list[Profile]
    level: float = 0.0
    tail: int = 3
    tilde: bool = False
    records: list[tuple[float, list[float], str]] = field(default_factory=list)

    def __post_init__(self):
        orders = [p.order for p in self.profiles]
        if any(b <= a for a, b in zip(orders, orders[1:])):
            raise DomainError(f"family {self.family}: member orders must strictly increase, got {orders}")

    @property
    def orders(self) -> list[int]:
        return [p.order for p in self.profiles]

    def values(self, c: float) -> list[float]:
        return [p.log_f(c, self.tilde) for p in self.profiles]

    def verdict(self, c: float) -> str:
        vals = self.values(c)
        v = classify_trend(vals, self.level, self.tail)
        self.records.append((float(c), vals, v))
        return v

    def trend_matrix(self) -> tuple[list[float], np.ndarray, list[str]]:
        recs = sorted(self.records)
        return [r[0] for r in recs], np.array([r[1] for r in recs]), [r[2] for r in recs]


def build_family_trend(
    family: str,
    groups: Sequence,
    exact_cap: int = EXACT_CAP,
    x_sample: int = DEFAULT_X_SAMPLE,
    y_sample: int = DEFAULT_Y_SAMPLE,
    seed: int = 0,
    level: float = 0.0,
    tail: int = 3,
) -> FamilyTrend:
    """Profiles for each member: exact up to ``exact_cap``, sampled above it."""
    profiles = []
    for k, g in enumerate(groups):
        G = build_group(g)
        if G.order <= exact_cap:
            profiles.append(exact_profile(G, exact_cap))
        else:
            profiles.append(estimated_profile(G, x_sample, y_sample, rng.derive(seed, k)))
    return FamilyTrend(family, profiles, level, tail)


@dataclass
class Bracket:
    lo: float
    hi: float
    converged: bool
    inconclusive: list[float]
    trend: FamilyTrend = field(repr=False)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, c: float) -> bool:
        return self.lo <= c <= self.hi


def bracket_threshold(
    family: FamilyTrend, c_lo: float, c_hi: float, tol: float, max_probes: int = 200
) -> Bracket:
    """Shrink ``[a, b]`` with a diverging verdict at ``a`` and vanishing at ``b``.

    Inconclusive midpoints start a band that is narrowed from both sides;
    the returned bracket spans the band, so it is wider than ``tol`` (and
    ``converged`` is false) when the band itself is.
    """
    if not 0 < c_lo < c_hi:
        raise DomainError(f"need 0 < c_lo < c_hi, got {c_lo}, {c_hi}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    a, b = float(c_lo), float(c_hi)
    va, vb = family.verdict(a), family.verdict(b)
    if va != DIVERGING or vb != VANISHING:
        grid = np.linspace(a, b, 41).tolist()
        verdicts = [family.verdict(c) for c in grid]
        pairs = [
            (d, w)
            for i, d in enumerate(grid)
            if verdicts[i] == DIVERGING
            for j, w in enumerate(grid[i + 1 :], start=i + 1)
            if verdicts[j] == VANISHING
        ]
        if not pairs:
            raise BracketError(
                f"family {family.family}: no diverging point below a vanishing point on [{c_lo}, {c_hi}]",
                trend=family.trend_matrix(),
            )
        a, b = min(pairs, key=lambda p: (p[1] - p[0], p[0]))
    inconclusive: list[float] = []
    band: list[float] | None = None
    resolution = tol / 64
    probes = 0
    while b - a > tol and probes < max_probes:
        probes += 1
        if band is None:
            mid = (a + b) / 2
            v = family.verdict(mid)
            if v == DIVERGING:
                a = mid
            elif v == VANISHING:
                b = mid
            else:
                inconclusive.append(mid)
                band = [mid, mid]
            continue
        left_gap, right_gap = band[0] - a, b - band[1]
        if max(left_gap, right_gap) <= resolution:
            break
        if left_gap >= right_gap:
            mid = (a + band[0]) / 2
        else:
            mid = (band[1] + b) / 2
        v = family.verdict(mid)
        if v == DIVERGING:
            if mid > band[1]:
                band = None  # the band was a local wobble; resume plain bisection above it
            a = mid
        elif v == VANISHING:
            if mid < band[0]:
                band = None
            b = mid
        else:
            inconclusive.append(mid)
            band = [min(band[0], mid), max(band[1], mid)]
    return Bracket(a, b, b - a <= tol, sorted(inconclusive), family)
