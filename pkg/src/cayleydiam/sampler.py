"""Random Cayley graphs G(G, p) and their diameter-2 event.

Every element enters S independently with probability p.  Element ``i`` of
trial ``t`` is decided by word ``i`` of the stream ``derive(seed, t)``, so a
trial is reproducible in isolation and the same uniforms are reused at every
p (raising p only ever adds elements).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import rng
from .depgraph import _check_x, build_dep_graph, dep_census
from .errors import CapacityError, DomainError, NonMonotoneError
from .groups import Group, build_group

EXACT_MAX_ORDER = 20
Z_95 = 1.959963984540054


class DistanceClass(IntEnum):
    ZERO = 0
    ONE = 1
    TWO = 2
    FAR = 3

    def __str__(self) -> str:
        return ">2" if self is DistanceClass.FAR else str(int(self))


@dataclass(frozen=True)
class GeneratingSet:
    members: np.ndarray = field(repr=False)
    p: float
    seed: int

    @property
    def size(self) -> int:
        return int(np.count_nonzero(self.members))

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.members)


@dataclass(frozen=True)
class ConnectionSet:
    members: np.ndarray = field(repr=False)

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.members)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    return p


def sample_generating_set(G: Group, p: float, seed: int) -> GeneratingSet:
    p = _check_p(p)
    u = rng.uniforms(seed, G.order)
    return GeneratingSet(u < p, p, seed)


def generating_set_from(G: Group, elements) -> GeneratingSet:
    mask = np.zeros(G.order, dtype=bool)
    mask[np.asarray(list(elements), dtype=np.int64)] = True
    return GeneratingSet(mask, float("nan"), 0)


def connection_set(G: Group, S: GeneratingSet) -> ConnectionSet:
    """``(S u S^-1) \\ {1}``."""
    mask = S.members.copy()
    mask[G.inv(np.flatnonzero(S.members))] = True
    mask[0] = False
    return ConnectionSet(mask)


def within_two(G: Group, T: ConnectionSet) -> np.ndarray:
    """Mask of elements at distance at most 2 from the identity."""
    t = T.elements()
    covered = T.members.copy()
    covered[0] = True
    if t.size:
        covered[G.mul(t[:, None], t[None, :]).ravel()] = True
    return covered


def distance_class(G: Group, T: ConnectionSet, x: int) -> DistanceClass:
    x = int(x)
    if x == 0:
        return DistanceClass.ZERO
    if T.members[x]:
        return DistanceClass.ONE
    t = T.elements()
    if t.size and np.any(T.members[G.mul(G.inv(t), x)]):
        # x = t u with u = t^-1 x in T
        return DistanceClass.TWO
    return DistanceClass.FAR


def diameter_at_most_2(G: Group, S: GeneratingSet) -> bool:
    return bool(within_two(G, connection_set(G, S)).all())


def bfs_diameter_at_most_2(G: Group, S: GeneratingSet) -> bool:
    """Breadth-first search on the full Cayley graph (g ~ tg for t in T)."""
    T = connection_set(G, S).elements()
    n = G.order
    if n == 1:
        return True
    if T.size == 0:
        return False
    # the graph is vertex-transitive, so the eccentricity of any vertex is the diameter
    for source in (0, n - 1):
        dist = np.full(n, -1)
        dist[source] = 0
        frontier = np.array([source])
        level = 0
        while frontier.size and level < 2:
            level += 1
            nxt = np.unique(G.mul(T[:, None], frontier[None, :]).ravel())
            nxt = nxt[dist[nxt] < 0]
            dist[nxt] = level
            frontier = nxt
        if (dist < 0).any():
            return False
    return True


# --------------------------------------------------------------------------
# Monte Carlo
# --------------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, z: float = Z_95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ph = successes / trials
    denom = 1 + z * z / trials
    centre = (ph + z * z / (2 * trials)) / denom
    half = z * math.sqrt(ph * (1 - ph) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    successes: int
    p: float
    seed: int

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def wilson_ci(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.trials)


def _run_trials(descriptor, p: float, seed: int, start: int, stop: int) -> list[bool]:
    G = build_group(descriptor)
    out = []
    for t in range(start, stop):
        S = GeneratingSet(rng.uniforms(rng.derive(seed, t), G.order) < p, p, seed)
        out.append(diameter_at_most_2(G, S))
    return out


def trial_outcomes(G: Group, p: float, trials: int, seed: int, workers: int = 1) -> list[bool]:
    """Per-trial diameter-2 outcomes, identical for any worker count."""
    p = _check_p(p)
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if workers <= 1 or trials < 2 * workers:
        return _run_trials(G.descriptor, p, seed, 0, trials)
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(
            _run_trials,
            [G.descriptor] * workers,
            [p] * workers,
            [seed] * workers,
            bounds[:-1].tolist(),
            bounds[1:].tolist(),
        )
        return [r for part in parts for r in part]


def monte_carlo_diam2(G: Group, p: float, trials: int, seed: int, workers: int = 1) -> TrialSummary:
    outcomes = trial_outcomes(G, p, trials, seed, workers)
    return TrialSummary(trials, sum(outcomes), float(p), seed)


def p_from_c(n: int, c: float) -> float:
    return min(1.0, math.sqrt(c * math.log(n) / n))


def c_from_p(n: int, p: float) -> float:
    return p * p * n / math.log(n)


@dataclass
class ThresholdEstimate:
    c_hat: float
    c_bracket: tuple[float, float]
    probes: list[tuple[float, TrialSummary]]

    @property
    def p_bracket(self) -> tuple[float, float]:
        return self.probes[0][1].p, self.probes[-1][1].p


def empirical_threshold(
    G: Group,
    trials_per_probe: int,
    seed: int,
    c_lo: float = 0.05,
    c_hi: float = 8.0,
    tol: float = 0.05,
    max_probes: int = 30,
    workers: int = 1,
) -> ThresholdEstimate:
    """Stochastic bisection in c = p^2 n / ln n for success probability 1/2.

    A probe whose 95% Wilson interval lies above 1/2 moves the upper end,
    below 1/2 the lower end; a probe whose interval contains 1/2 ends the
    search at that point.  Probes at smaller c whose interval lies entirely
    above that of a probe at larger c raise :class:`NonMonotoneError`.
    """
    n = G.order
    if n < 16:
        raise DomainError("empirical_threshold needs a group of order at least 16")
    probes: list[tuple[float, TrialSummary]] = []

    def probe(c: float) -> TrialSummary:
        s = monte_carlo_diam2(G, p_from_c(n, c), trials_per_probe, seed, workers)
        probes.append((c, s))
        ordered = sorted(probes, key=lambda q: q[0])
        for i, (ci, si) in enumerate(ordered):
            for cj, sj in ordered[i + 1 :]:
                if si.wilson_ci[0] > sj.wilson_ci[1]:
                    raise NonMonotoneError(
                        f"success rate at c={ci:.4g} exceeds that at c={cj:.4g} beyond noise",
                        probes=ordered,
                    )
        return s

    lo, hi = float(c_lo), float(c_hi)
    s_lo, s_hi = probe(lo), probe(hi)
    if s_lo.wilson_ci[0] > 0.5 or s_hi.wilson_ci[1] < 0.5:
        raise DomainError(f"success probability 1/2 is not crossed on c in [{lo}, {hi}]")
    c_hat = None
    while hi - lo > tol and len(probes) < max_probes:
        mid = (lo + hi) / 2
        s = probe(mid)
        a, b = s.wilson_ci
        if a > 0.5:
            hi = mid
        elif b < 0.5:
            lo = mid
        else:
            c_hat = mid
            break
    if c_hat is None:
        c_hat = (lo + hi) / 2
    probes.sort(key=lambda q: q[0])
    return ThresholdEstimate(c_hat, (lo, hi), probes)


# --------------------------------------------------------------------------
# exact probabilities on tiny groups
# --------------------------------------------------------------------------


def _subset_bits(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[None, :] >> np.arange(n, dtype=np.int64)[:, None]) & 1).astype(bool)


def far_mask(G: Group, x: int, bits: np.ndarray | None = None) -> np.ndarray:
    """For every subset S (bitmask index), whether x is at distance > 2."""
    n = G.order
    if bits is None:
        bits = _subset_bits(n)
    inv = G.inv(G.elements())
    in_t = bits | bits[inv]
    in_t[0] = False
    near = in_t[x].copy()
    for g in range(1, n):
        near |= in_t[g] & in_t[G.mul(inv[g], x)]
    return ~near


def independence_mask(G: Group, x: int, bits: np.ndarray | None = None) -> np.ndarray:
    """Subsets with x, x^-1 not in S, no looped vertex in S and no edge inside S."""
    n = G.order
    if bits is None:
        bits = _subset_bits(n)
    dg = build_dep_graph(G, x)
    bad = bits[x] | bits[G.inv(x)]
    for y in dg.loops.tolist():
        bad |= bits[y]
    for g, h in dg.edges.tolist():
        bad |= bits[g] & bits[h]
    return ~bad


@dataclass(frozen=True)
class FarProbability:
    x: int
    p: float
    exact: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.exact >= self.bound * (1 - 1e-12) - 1e-300


def kleitman_bound(G: Group, x: int, p: float) -> float:
    """(1-p)^s (1-p)^l (1-p^2)^e with s = 1 if x^2 = 1 else 2."""
    loops, edges = dep_census(G, x)
    s = 1 if G.square(x) == 0 else 2
    return (1 - p) ** (s + loops) * (1 - p * p) ** edges


def exact_far_probability(G: Group, x: int, p: float) -> FarProbability:
    """Pr(x is at distance > 2) by summing over all 2^n subsets."""
    x = _check_x(G, x)
    p = _check_p(p)
    n = G.order
    if n > EXACT_MAX_ORDER:
        raise CapacityError(f"exhaustive enumeration needs n <= {EXACT_MAX_ORDER}, got {n}")
    far = far_mask(G, x)
    sizes = np.bitwise_count(np.arange(1 << n, dtype=np.uint64)) if hasattr(np, "bitwise_count") else _popcount(n)
    per_size = np.bincount(sizes[far].astype(np.int64), minlength=n + 1)
    exact = math.fsum(int(k) * p**s * (1 - p) ** (n - s) for s, k in enumerate(per_size.tolist()) if k)
    return FarProbability(x, p, exact, kleitman_bound(G, x, p))


def _popcount(n: int) -> np.ndarray:
    return _subset_bits(n).sum(axis=0)
