"""The dependency graph of a non-identity element x.

For each vertex y the candidate neighbours are the eight expressions

    xy, xy^-1, x^-1y, x^-1y^-1, yx, y^-1x, yx^-1, y^-1x^-1

(in this position order, which the relation tables rely on).  A vertex has a
loop when y^2 is x or x^-1; loops are kept apart from the non-loop edges.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .groups import Group

POSITIONS = ("xy", "xy^-1", "x^-1y", "x^-1y^-1", "yx", "y^-1x", "yx^-1", "y^-1x^-1")
CHUNK = 1 << 18


def _check_x(G: Group, x: int) -> int:
    x = int(x)
    if not 0 <= x < G.order:
        raise DomainError(f"{x} is not an element index of {G.name}")
    if x == 0:
        raise DomainError("the dependency graph is defined for x != identity only")
    return x


def expression_values(G: Group, x: int, y) -> np.ndarray:
    """Stack of the eight neighbour expressions, shape ``(8,) + shape(y)``."""
    y = np.asarray(y, dtype=np.int64)
    xi = G.inv(x)
    yi = G.inv(y)
    return np.stack(
        [
            G.mul(x, y),
            G.mul(x, yi),
            G.mul(xi, y),
            G.mul(xi, yi),
            G.mul(y, x),
            G.mul(yi, x),
            G.mul(y, xi),
            G.mul(yi, xi),
        ]
    )


def neighbor_set(G: Group, x: int, y: int) -> set[int]:
    """Distinct values of the eight expressions at ``y`` (may include y itself)."""
    x = _check_x(G, x)
    return set(expression_values(G, x, int(y)).tolist())


def loop_mask(G: Group, x: int, y=None) -> np.ndarray:
    y = G.elements() if y is None else np.asarray(y, dtype=np.int64)
    sq = G.mul(y, y)
    return (sq == x) | (sq == G.inv(x))


def degrees(G: Group, x: int, y) -> np.ndarray:
    """Non-loop degree of each vertex in ``y``."""
    vals = np.sort(expression_values(G, x, y), axis=0)
    distinct = 1 + np.count_nonzero(np.diff(vals, axis=0), axis=0)
    has_self = np.any(vals == np.asarray(y)[None], axis=0)
    return distinct - has_self


def dep_census(G: Group, x: int) -> tuple[int, int]:
    """``(loop_count, edge_count)`` of the dependency graph, without storing edges."""
    x = _check_x(G, x)
    loops = G.root_count(x)
    if G.square(x) != 0:
        loops *= 2
    total = 0
    for start in range(0, G.order, CHUNK):
        ys = np.arange(start, min(G.order, start + CHUNK), dtype=np.int64)
        total += int(degrees(G, x, ys).sum())
    return loops, total // 2


@dataclass
class DepGraph:
    """Loops and non-loop edges of the dependency graph of ``x``.

    ``edges`` is an ``(e, 2)`` array of pairs ``g < h`` in lexicographic order.
    """

    group: Group = field(repr=False)
    x: int
    loops: np.ndarray
    edges: np.ndarray
    degree: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def loop_count(self) -> int:
        return int(self.loops.size)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.degree.size else 0

    def edge_set(self) -> set[frozenset]:
        return {frozenset((int(g), int(h))) for g, h in self.edges}

    def neighbors(self, y: int) -> np.ndarray:
        e = self.edges
        return np.sort(np.concatenate([e[e[:, 0] == y, 1], e[e[:, 1] == y, 0]]))


def build_dep_graph(G: Group, x: int) -> DepGraph:
    x = _check_x(G, x)
    ys = G.elements()
    vals = expression_values(G, x, ys)
    srt = np.sort(vals, axis=0)
    first = np.ones_like(srt, dtype=bool)
    first[1:] = srt[1:] != srt[:-1]
    keep = first & (srt != ys[None])
    degree = keep.sum(axis=0)
    g = np.broadcast_to(ys[None], srt.shape)[keep]
    h = srt[keep]
    lo, hi = np.minimum(g, h), np.maximum(g, h)
    codes = np.unique(lo * G.order + hi)
    edges = np.stack([codes // G.order, codes % G.order], axis=1)
    # a loop is a vertex appearing among its own eight expressions
    loops = np.flatnonzero(np.any(vals == ys[None], axis=0))
    return DepGraph(G, x, loops, edges, degree)


# --------------------------------------------------------------------------
# observations
# --------------------------------------------------------------------------


@dataclass
class ObservationReport:
    """Outcome of the four structural observations for one ``(G, x)``.

    ``witnesses`` maps the name of each failed check to a counterexample.
    """

    group: str
    x: int
    max_degree_ok: bool
    no_isolated_ok: bool
    loop_census_ok: bool
    pair_multiplicity_ok: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.max_degree_ok and self.no_isolated_ok and self.loop_census_ok and self.pair_multiplicity_ok


_pair_multiplicity_cache: dict[str, tuple[int, tuple | None]] = {}


def max_pair_multiplicity(G: Group) -> tuple[int, tuple | None]:
    """Largest number of x for which one unordered pair {g, h} is an edge.

    Counted by brute force over every dependency graph of ``G``.  Returns the
    maximum and a witness ``(g, h)`` attaining it.
    """
    if G.name in _pair_multiplicity_cache:
        return _pair_multiplicity_cache[G.name]
    n = G.order
    if n > 8192:
        raise DomainError(f"pair multiplicity census needs n^2 counters; {G.name} is too large")
    counts = np.zeros(n * n, dtype=np.int64)
    ys = G.elements()
    pending: list[np.ndarray] = []
    size = 0
    for x in range(1, n + 1):
        if x < n:
            srt = np.sort(expression_values(G, x, ys), axis=0)
            first = np.ones_like(srt, dtype=bool)
            first[1:] = srt[1:] != srt[:-1]
            keep = first & (srt != ys[None])
            g = np.broadcast_to(ys[None], srt.shape)[keep]
            h = srt[keep]
            # each unordered edge is seen from both endpoints; count it from g < h
            sel = g < h
            pending.append(g[sel] * n + h[sel])
            size += pending[-1].size
        if pending and (size > 1 << 22 or x == n):
            counts += np.bincount(np.concatenate(pending), minlength=n * n)
            pending, size = [], 0
    best = int(counts.max()) if n > 1 else 0
    code = int(counts.argmax())
    result = (best, (code // n, code % n) if best else None)
    _pair_multiplicity_cache[G.name] = result
    return result


def verify_observations(G: Group, x: int) -> ObservationReport:
    x = _check_x(G, x)
    dg = build_dep_graph(G, x)
    wit: dict = {}
    over = np.flatnonzero(dg.degree > 8)
    if over.size:
        wit["max_degree"] = (int(over[0]), int(dg.degree[over[0]]))
    isolated = np.flatnonzero(dg.degree == 0)
    if isolated.size:
        wit["no_isolated"] = int(isolated[0])
    sq = G.squares()
    roots = np.flatnonzero((sq == x) | (sq == G.inv(x)))
    if not np.array_equal(roots, dg.loops):
        wit["loop_census"] = (dg.loops.tolist(), roots.tolist())
    best, pair = max_pair_multiplicity(G)
    if best > 8:
        wit["pair_multiplicity"] = (pair, best)
    return ObservationReport(
        G.name,
        x,
        "max_degree" not in wit,
        "no_isolated" not in wit,
        "loop_census" not in wit,
        "pair_multiplicity" not in wit,
        wit,
    )


# --------------------------------------------------------------------------
# matchings
# --------------------------------------------------------------------------


def _matching(edges: np.ndarray, order: np.ndarray, n: int) -> int:
    used = np.zeros(n, dtype=bool)
    size = 0
    for i in order:
        g, h = edges[i]
        if not used[g] and not used[h]:
            used[g] = used[h] = True
            size += 1
    return size


def greedy_maximal_matching(dg: DepGraph) -> int:
    """Size of the maximal matching built greedily over edges in sorted order."""
    return _matching(dg.edges, np.arange(dg.edge_count), dg.order)


def random_maximal_matching(dg: DepGraph, seed: int) -> int:
    """Size of a maximal matching built over a seeded random edge order."""
    perm = np.random.default_rng(seed).permutation(dg.edge_count)
    return _matching(dg.edges, perm, dg.order)


def matching_lower_bound(n: int) -> int:
    return -(-n // 8)


# --------------------------------------------------------------------------
# factorised edge census for direct products
# --------------------------------------------------------------------------
#
# Two of the nine items (eight expressions and y itself) are equal in a
# direct product exactly when they are equal in both factors, so the
# equality pattern of a product element is the bitwise AND of the patterns
# of its coordinates.  The non-loop degree is the number of classes of the
# pattern minus one (the class of y).

_ITEM_PAIRS = [(i, j) for j in range(9) for i in range(j)]
_ITEM_BIT = {pair: np.int64(1) << np.int64(b) for b, pair in enumerate(_ITEM_PAIRS)}
_EARLIER = [sum(int(_ITEM_BIT[(i, j)]) for i in range(j)) for j in range(9)]
ENUMERATION_LIMIT = 1 << 25


def signature_codes(G: Group, x: int, y) -> np.ndarray:
    """36-bit equality pattern of the eight expressions and ``y``."""
    y = np.asarray(y, dtype=np.int64)
    items = np.concatenate([expression_values(G, x, y), y[None]])
    code = np.zeros(y.shape, dtype=np.int64)
    for (i, j), bit in _ITEM_BIT.items():
        code |= np.where(items[i] == items[j], bit, np.int64(0))
    return code


def class_count(code: np.ndarray) -> np.ndarray:
    code = np.asarray(code, dtype=np.int64)
    return sum(((code & np.int64(m)) == 0).astype(np.int64) for m in _EARLIER)


@functools.lru_cache(maxsize=512)
def signature_histogram(G: Group, x: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct patterns over all y and how many y realize each (cached)."""
    from .groups import Elem2Group, ProductGroup, build_group

    if isinstance(G, ProductGroup):
        a, b = G.split(int(x))
        ca, na = signature_histogram(G.left, int(a))
        cb, nb = signature_histogram(G.right, int(b))
        codes = (ca[:, None] & cb[None, :]).ravel()
        counts = (na[:, None] * nb[None, :]).ravel()
        uniq, inv = np.unique(codes, return_inverse=True)
        if counts.dtype != object and G.order < 2**53:
            return uniq, np.rint(np.bincount(inv.ravel(), weights=counts)).astype(np.int64)
        return uniq, _exact_sum(inv, counts, uniq.size)
    if isinstance(G, Elem2Group) and G.k > 2:
        small = build_group("elem2:2")
        if x == 0:
            ys, weights = np.array([0]), np.array([G.order], dtype=object)
            codes = signature_codes(small, 0, ys)
        else:
            ys, weights = np.array([0, 1, 2]), np.array([1, 1, G.order - 2], dtype=object)
            codes = signature_codes(small, 1, ys)
        uniq, inv = np.unique(codes, return_inverse=True)
        return uniq, _exact_sum(inv, weights, uniq.size)
    if G.order > ENUMERATION_LIMIT:
        raise DomainError(f"signature census would enumerate {G.order} elements of {G.name}")
    parts = []
    for start in range(0, G.order, CHUNK):
        ys = np.arange(start, min(G.order, start + CHUNK), dtype=np.int64)
        parts.append(signature_codes(G, x, ys))
    uniq, counts = np.unique(np.concatenate(parts), return_counts=True)
    return uniq, counts.astype(np.int64)


def _exact_sum(inv: np.ndarray, counts, size: int) -> np.ndarray:
    # Python integers: counts of huge products would lose precision in float64
    out = [0] * size
    for i, c in zip(inv.ravel().tolist(), list(counts)):
        out[i] += int(c)
    return np.array(out, dtype=object) if max(out) >= 2**62 else np.array(out, dtype=np.int64)


def factorised_edge_count(G: Group, x: int) -> int:
    """Exact ``e`` from the pattern histogram; cost is independent of the product's order."""
    x = _check_x(G, x)
    codes, counts = signature_histogram(G, int(x))
    blocks = class_count(codes) - 1
    return sum(int(c) * int(b) for c, b in zip(counts.tolist(), blocks.tolist())) // 2
