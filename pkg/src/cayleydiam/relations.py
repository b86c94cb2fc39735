"""Relations R1-R9 between x and y, the 24-row case table, F-sets and R(x).

Positions 1..8 refer to the neighbour expressions in the order used by
:mod:`cayleydiam.depgraph`.  Each relation is equivalent to equality of any
one of its position pairs, so the rows of the case table are exactly the
relation sets closed under transitivity of those equalities.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .depgraph import _check_x, expression_values
from .errors import StructureViolationError, TableCompletenessError, VerificationError
from .groups import Group

RELATION_NAMES = {
    1: "x^2=1",
    2: "y^2=1",
    3: "xy=yx",
    4: "(xy)^2=x^2",
    5: "(xy)^2=y^2",
    6: "(xy)^2=1",
    7: "(xy^-1)^2=1",
    8: "x^2=y^2",
    9: "x^2=y^-2",
}

# position pairs forced equal by each relation
RELATION_PAIRS = {
    1: ((1, 3), (2, 4), (5, 7), (6, 8)),
    2: ((1, 2), (3, 4), (5, 6), (7, 8)),
    3: ((1, 5), (2, 6), (3, 7), (4, 8)),
    4: ((1, 6), (2, 5), (3, 8), (4, 7)),
    5: ((1, 7), (2, 8), (3, 5), (4, 6)),
    6: ((1, 8), (4, 5)),
    7: ((2, 7), (3, 6)),
    8: ((2, 3), (6, 7)),
    9: ((1, 4), (5, 8)),
}

# candidates z with F_z = F_y forced by a single relation, and the element
# equality it forces among the candidates; "*" marks a size-one class
RELATION_F_COLUMNS = {
    1: ("BE", "B=E"),
    2: ("*", "B=C"),
    3: ("CD", "C=D"),
    4: ("BD", "B=D"),
    5: ("AF", "A=F"),
    6: ("", ""),
    7: ("*", "D=E"),
    8: ("CE", "C=E"),
    9: ("", ""),
}

CANDIDATES = "ABCDEF"

# row id, printed relations, partition, stars, last column
_TABLE_ROWS = (
    (1, (1, 2, 3), "12345678", 2, "BCDE"),
    (2, (1, 2), "1234|5678", 1, "BCE"),
    (3, (1, 3), "1357|2468", 0, "AF|BE|CD"),
    (4, (1, 4), "1368|2457", 1, "BDE"),
    (5, (1,), "13|24|56|78", 0, "BE"),
    (6, (2, 3), "1256|3478", 1, "BCD"),
    (7, (2, 5), "1278|3456", 2, ""),
    (8, (2,), "12|34|56|78", 1, ""),
    (9, (3, 6, 7), "1458|2367", 1, "CDE"),
    (10, (3, 6), "1458|26|37", 0, "CD"),
    (11, (3, 7), "15|48|2367", 1, "CDE"),
    (12, (3,), "15|26|37|48", 0, "CD"),
    (13, (4, 5), "1467|2358", 0, "AF|BD|CE"),
    (14, (4,), "16|25|38|47", 0, "BD"),
    (15, (5,), "17|28|35|46", 0, "AF"),
    (16, (6, 7), "18|27|36|45", 1, ""),
    (17, (6, 8), "18|23|45|67", 0, "CE"),
    (18, (6,), "18|45|2|3|6|7", 0, ""),
    (19, (7, 9), "14|27|36|58", 1, ""),
    (20, (7,), "1|4|5|8|27|36", 1, ""),
    (21, (8, 9), "14|23|58|67", 0, "CE"),
    (22, (8,), "1|4|5|8|23|67", 0, "CE"),
    (23, (9,), "14|58|2|3|6|7", 0, ""),
    (24, (), "1|2|3|4|5|6|7|8", 0, ""),
)

# rows paired by y -> y^-1 whose selection weights differ from their edge share
HIGHLIGHTED_PAIRS = ((10, 11), (18, 20), (22, 23))


def _parse_partition(text: str) -> tuple[tuple[int, ...], ...]:
    blocks = [tuple(sorted(int(ch) for ch in block)) for block in text.split("|")]
    return tuple(sorted(blocks))


def _union_find_blocks(pairs) -> tuple[tuple[int, ...], ...]:
    parent = list(range(9))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        parent[find(a)] = find(b)
    blocks: dict[int, list[int]] = {}
    for p in range(1, 9):
        blocks.setdefault(find(p), []).append(p)
    return tuple(sorted(tuple(b) for b in blocks.values()))


def partition_of(relations) -> tuple[tuple[int, ...], ...]:
    """Partition of positions 1..8 forced by a set of relations."""
    return _union_find_blocks(p for r in relations for p in RELATION_PAIRS[r])


def closure(relations) -> frozenset[int]:
    """Smallest relation set containing ``relations`` that is closed under deduction."""
    active = set(relations)
    while True:
        blocks = partition_of(active)
        where = {p: i for i, b in enumerate(blocks) for p in b}
        implied = {r for r, pairs in RELATION_PAIRS.items() if any(where[a] == where[b] for a, b in pairs)}
        if implied <= active:
            return frozenset(active)
        active |= implied


def closed_relation_sets() -> list[frozenset[int]]:
    """Every subset of R1..R9 that equals its own closure."""
    out = []
    for bits in range(512):
        s = frozenset(r for r in range(1, 10) if bits >> (r - 1) & 1)
        if closure(s) == s:
            out.append(s)
    return out


@dataclass(frozen=True)
class TableRow:
    """One row of the case table.

    ``printed_partition`` is the partition text as tabulated; ``partition``
    is the one forced by the position pairs of ``relations``.  The two agree
    on every row except 5, whose text uses the other listing of positions 6
    and 7 (see :func:`printed_partition_mismatches`).
    """

    row_id: int
    printed_relations: tuple[int, ...]
    relations: frozenset[int]
    printed_partition: tuple[tuple[int, ...], ...]
    star_count: int
    f_blocks: tuple[str, ...]

    @property
    def partition(self) -> tuple[tuple[int, ...], ...]:
        return partition_of(self.relations)

    @property
    def f_candidates(self) -> str:
        return "".join(sorted("".join(self.f_blocks)))

    @property
    def neighbor_count(self) -> int:
        return len(self.partition)

    @property
    def component_size(self) -> int:
        """Size of the R(x) component predicted for an eligible y of this row."""
        return 1 + len(self.f_blocks)

    @property
    def code(self) -> int:
        return relation_code(self.relations)


def relation_code(relations) -> int:
    return sum(1 << (r - 1) for r in relations)


TABLE_ROWS: tuple[TableRow, ...] = tuple(
    TableRow(
        rid,
        printed,
        closure(printed),
        _parse_partition(part),
        stars,
        tuple(last.split("|")) if last else (),
    )
    for rid, printed, part, stars, last in _TABLE_ROWS
)
ROW_BY_ID = {row.row_id: row for row in TABLE_ROWS}


def printed_partition_mismatches() -> list[tuple[int, tuple, tuple]]:
    """Rows whose tabulated partition differs from the one their relations force."""
    return [
        (row.row_id, row.printed_partition, row.partition)
        for row in TABLE_ROWS
        if row.printed_partition != row.partition
    ]

# relation code -> row id (0 when no row has that closed set)
_ROW_OF_CODE = np.zeros(512, dtype=np.int64)
for _row in TABLE_ROWS:
    _ROW_OF_CODE[_row.code] = _row.row_id

_PAIRS = list(itertools.combinations(range(8), 2))
_PAIR_BIT = {pair: 1 << i for i, pair in enumerate(_PAIRS)}


def _partition_code(partition) -> int:
    code = 0
    for block in partition:
        for a, b in itertools.combinations(block, 2):
            code |= _PAIR_BIT[(a - 1, b - 1)]
    return code


_PARTITION_CODE_OF_ROW = np.zeros(25, dtype=np.int64)
for _row in TABLE_ROWS:
    _PARTITION_CODE_OF_ROW[_row.row_id] = _partition_code(_row.partition)
_PRINTED_CODE_OF_ROW = np.zeros(25, dtype=np.int64)
for _row in TABLE_ROWS:
    _PRINTED_CODE_OF_ROW[_row.row_id] = _partition_code(_row.printed_partition)

_CANDIDATE_PAIRS = list(itertools.combinations(range(6), 2))


def _f_codes(row: TableRow) -> tuple[int, int]:
    listed = sum(1 << CANDIDATES.index(c) for c in row.f_candidates)
    equal = 0
    for block in row.f_blocks:
        for a, b in itertools.combinations(sorted(CANDIDATES.index(c) for c in block), 2):
            equal |= 1 << _CANDIDATE_PAIRS.index((a, b))
    return listed, equal


_F_LISTED_OF_ROW = np.zeros(25, dtype=np.int64)
_F_EQUAL_OF_ROW = np.zeros(25, dtype=np.int64)
for _row in TABLE_ROWS:
    _F_LISTED_OF_ROW[_row.row_id], _F_EQUAL_OF_ROW[_row.row_id] = _f_codes(_row)

# y -> y^-1 swaps positions 1-2, 3-4, 5-6, 7-8
_POSITION_INVERSION = {1: 2, 2: 1, 3: 4, 4: 3, 5: 6, 6: 5, 7: 8, 8: 7}


def _relation_inversion() -> dict[int, int]:
    lookup = {frozenset(pairs): r for r, pairs in RELATION_PAIRS.items()}
    out = {}
    for r, pairs in RELATION_PAIRS.items():
        image = frozenset(tuple(sorted((_POSITION_INVERSION[a], _POSITION_INVERSION[b]))) for a, b in pairs)
        out[r] = lookup[image]
    return out


RELATION_INVERSION = _relation_inversion()


def _row_inversion() -> dict[int, int]:
    by_set = {row.relations: row.row_id for row in TABLE_ROWS}
    return {
        row.row_id: by_set[frozenset(RELATION_INVERSION[r] for r in row.relations)]
        for row in TABLE_ROWS
    }


ROW_INVERSION = _row_inversion()


# --------------------------------------------------------------------------
# per-element evaluation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationProfile:
    bits: tuple[bool, ...]

    @property
    def relations(self) -> frozenset[int]:
        return frozenset(i + 1 for i, b in enumerate(self.bits) if b)

    def __str__(self) -> str:
        return ",".join(f"R{r}" for r in sorted(self.relations)) or "-"


def relation_bits(G: Group, x: int, y) -> np.ndarray:
    """Boolean array of shape ``(9,) + shape(y)``; row ``i`` is relation R(i+1)."""
    y = np.asarray(y, dtype=np.int64)
    x2 = G.square(x)
    y2 = G.mul(y, y)
    xy = G.mul(x, y)
    xy2 = G.mul(xy, xy)
    xyi = G.mul(x, G.inv(y))
    return np.stack(
        [
            np.broadcast_to(x2 == 0, y.shape),
            y2 == 0,
            xy == G.mul(y, x),
            xy2 == x2,
            xy2 == y2,
            xy2 == 0,
            G.mul(xyi, xyi) == 0,
            y2 == x2,
            G.inv(y2) == x2,
        ]
    )


def relation_vector(G: Group, x: int, y: int) -> RelationProfile:
    x = _check_x(G, x)
    return RelationProfile(tuple(bool(b) for b in relation_bits(G, x, int(y))))


def expression_partition(G: Group, x: int, y: int) -> tuple[tuple[int, ...], ...]:
    """Positions 1..8 grouped by equal expression value."""
    x = _check_x(G, x)
    vals = expression_values(G, x, int(y)).tolist()
    blocks: dict[int, list[int]] = {}
    for pos, v in enumerate(vals, start=1):
        blocks.setdefault(v, []).append(pos)
    return tuple(sorted(tuple(b) for b in blocks.values()))


def _partition_codes(vals: np.ndarray) -> np.ndarray:
    code = np.zeros(vals.shape[1:], dtype=np.int64)
    for (a, b), bit in _PAIR_BIT.items():
        code |= np.where(vals[a] == vals[b], bit, 0)
    return code


def classify_row(G: Group, x: int, y: int) -> TableRow:
    x = _check_x(G, x)
    prof = relation_vector(G, x, y)
    rid = int(_ROW_OF_CODE[relation_code(prof.relations)])
    if rid == 0:
        raise TableCompletenessError(
            f"relations {prof} of (x, y) = ({x}, {y}) in {G.name} match no table row",
            witness=(G.name, x, int(y)),
        )
    row = ROW_BY_ID[rid]
    part = expression_partition(G, x, y)
    if part != row.partition:
        raise TableCompletenessError(
            f"row {rid} predicts partition {row.partition} but (x, y) = ({x}, {y}) "
            f"in {G.name} gives {part}",
            witness=(G.name, x, int(y)),
        )
    return row


# --------------------------------------------------------------------------
# F-sets
# --------------------------------------------------------------------------


def _class_rep(G: Group, z):
    return np.minimum(z, G.inv(z))


@dataclass(frozen=True)
class FSet:
    classes: tuple[frozenset[int], ...]

    @property
    def class_count(self) -> int:
        return len(self.classes)

    @property
    def t(self) -> int:
        """Number of classes of size two."""
        return sum(1 for c in self.classes if len(c) == 2)


def f_set(G: Group, x: int, y: int) -> FSet:
    """``{[y], [xy^-1]}`` where ``[z] = {z, z^-1}``."""
    x = _check_x(G, x)
    y = int(y)
    w = G.mul(x, G.inv(y))
    classes = {frozenset((y, G.inv(y))), frozenset((w, G.inv(w)))}
    return FSet(tuple(sorted(classes, key=min)))


def f_key(G: Group, x: int, y) -> np.ndarray:
    """Integer key identifying ``F_y``; equal keys mean equal F-sets."""
    y = np.asarray(y, dtype=np.int64)
    a = _class_rep(G, y)
    b = _class_rep(G, G.mul(x, G.inv(y)))
    return np.minimum(a, b) * G.order + np.maximum(a, b)


def f_size_profile(G: Group, x: int, y) -> tuple[np.ndarray, np.ndarray]:
    """Per-y class count (1 or 2) and number ``t`` of size-two classes."""
    y = np.asarray(y, dtype=np.int64)
    a = _class_rep(G, y)
    w = G.mul(x, G.inv(y))
    b = _class_rep(G, w)
    two_a = y != G.inv(y)
    two_b = w != G.inv(w)
    count = np.where(a == b, 1, 2)
    t = np.where(a == b, two_a.astype(np.int64), two_a.astype(np.int64) + two_b)
    return count, t


def candidate_values(G: Group, x: int, y) -> np.ndarray:
    """The six candidates A..F: y^-1, yx, y^-1x, xy^-1, yx^-1, xy^-1x."""
    y = np.asarray(y, dtype=np.int64)
    yi = G.inv(y)
    xi = G.inv(x)
    xyi = G.mul(x, yi)
    return np.stack([yi, G.mul(y, x), G.mul(yi, x), xyi, G.mul(y, xi), G.mul(xyi, x)])


def eligible_mask(G: Group, x: int) -> np.ndarray:
    """y with y != 1, x, x^-1 and y^2, y^-2 != x."""
    y = G.elements()
    sq = G.squares()
    xi = G.inv(x)
    return (y != 0) & (y != x) & (y != xi) & (sq != x) & (sq != xi)


# --------------------------------------------------------------------------
# whole-x analysis
# --------------------------------------------------------------------------


@dataclass
class XAnalysis:
    """Vectorised relation data for every y at a fixed x."""

    group: Group = field(repr=False)
    x: int
    rows: np.ndarray
    partition_ok: np.ndarray
    printed_ok: np.ndarray
    eligible: np.ndarray
    degree: np.ndarray
    fkey: np.ndarray
    t: np.ndarray
    class_count: np.ndarray


def analyze(G: Group, x: int) -> XAnalysis:
    x = _check_x(G, x)
    ys = G.elements()
    bits = relation_bits(G, x, ys)
    code = np.zeros(G.order, dtype=np.int64)
    for i in range(9):
        code |= bits[i].astype(np.int64) << i
    rows = _ROW_OF_CODE[code]
    vals = expression_values(G, x, ys)
    pcode = _partition_codes(vals)
    partition_ok = pcode == _PARTITION_CODE_OF_ROW[rows]
    printed_ok = pcode == _PRINTED_CODE_OF_ROW[rows]
    srt = np.sort(vals, axis=0)
    distinct = 1 + np.count_nonzero(np.diff(srt, axis=0), axis=0)
    degree = distinct - np.any(vals == ys[None], axis=0)
    count, t = f_size_profile(G, x, ys)
    return XAnalysis(G, x, rows, partition_ok, printed_ok, eligible_mask(G, x), degree, f_key(G, x, ys), t, count)


def verify_table_rows(G: Group, x: int, analysis: XAnalysis | None = None) -> Counter:
    """Classify every y at ``x``; returns the row population of eligible y.

    Raises :class:`TableCompletenessError` on the first unmatched relation
    vector or partition mismatch (any y, eligible or not).
    """
    a = analysis if analysis is not None else analyze(G, x)
    bad = np.flatnonzero(a.rows == 0)
    if bad.size:
        classify_row(G, x, int(bad[0]))
    bad = np.flatnonzero(~a.partition_ok)
    if bad.size:
        classify_row(G, x, int(bad[0]))
    return Counter(a.rows[a.eligible].tolist())


def verify_f_columns(G: Group, x: int, analysis: XAnalysis | None = None) -> None:
    """Check stars and last-column data of each eligible y against its row.

    For every eligible y: the class count of ``F_y`` is 2, the star count is
    ``2 - t``, the candidates ``z != y`` among A..F with ``F_z = F_y`` are
    exactly those listed, and their element equalities are the listed blocks.
    """
    a = analysis if analysis is not None else analyze(G, x)
    ys = np.flatnonzero(a.eligible)
    if ys.size == 0:
        return
    rows = a.rows[ys]
    stars = np.array([ROW_BY_ID[r].star_count for r in range(1, 25)])[rows - 1]
    bad = np.flatnonzero((a.class_count[ys] != 2) | (stars != 2 - a.t[ys]))
    if bad.size:
        y = int(ys[bad[0]])
        raise VerificationError(
            f"F-set of y={y} at x={x} in {G.name}: class count {a.class_count[y]}, "
            f"t={a.t[y]}, row {a.rows[y]} has {ROW_BY_ID[int(a.rows[y])].star_count} stars",
            witness=(G.name, x, y),
        )
    cand = candidate_values(G, x, ys)
    same = (f_key(G, x, cand) == a.fkey[ys][None]) & (cand != ys[None])
    listed = np.zeros(ys.size, dtype=np.int64)
    equal = np.zeros(ys.size, dtype=np.int64)
    for i in range(6):
        listed |= same[i].astype(np.int64) << i
    for bit, (i, j) in enumerate(_CANDIDATE_PAIRS):
        equal |= (same[i] & same[j] & (cand[i] == cand[j])).astype(np.int64) << bit
    bad = np.flatnonzero((listed != _F_LISTED_OF_ROW[rows]) | (equal != _F_EQUAL_OF_ROW[rows]))
    if bad.size:
        j = int(bad[0])
        y = int(ys[j])
        row = ROW_BY_ID[int(rows[j])]
        blocks: dict[int, str] = {}
        for i in range(6):
            if same[i, j]:
                blocks[int(cand[i, j])] = blocks.get(int(cand[i, j]), "") + CANDIDATES[i]
        got = "|".join(sorted(blocks.values())) or "-"
        raise VerificationError(
            f"row {row.row_id} lists F-equal candidates {'|'.join(row.f_blocks) or '-'} "
            f"but y={y} at x={x} in {G.name} gives {got}",
            witness=(G.name, x, y),
        )


# --------------------------------------------------------------------------
# R(x) graph and selection accounting
# --------------------------------------------------------------------------


@dataclass
class SelectionPlan:
    """R(x) split into components, with the selection weight ``2^t`` of each vertex.

    ``members`` lists eligible y grouped by component; ``starts`` holds the
    offset of each component within it.
    """

    x: int
    roots: frozenset[int]
    j_size: int
    members: np.ndarray = field(repr=False)
    starts: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(np.append(self.starts, self.members.size))

    @property
    def components(self) -> list[tuple[int, ...]]:
        parts = np.split(self.members, self.starts[1:]) if self.members.size else []
        return sorted(tuple(sorted(p.tolist())) for p in parts)

    @property
    def expected_score(self) -> float:
        """Expected weight when one member of every component is picked uniformly."""
        if not self.members.size:
            return 0.0
        sums = np.add.reduceat(self.weights, self.starts)
        return float(np.sum(sums / self.sizes))

    def size_histogram(self) -> Counter:
        return Counter(self.sizes.tolist())


def build_R_graph(G: Group, x: int, analysis: XAnalysis | None = None) -> SelectionPlan:
    """Components of the graph on eligible y joining y and z when F_y = F_z.

    F-set equality is an equivalence relation, so every component is a clique
    by construction; component sizes other than 1, 2 or 4 are rejected.
    """
    a = analysis if analysis is not None else analyze(G, x)
    ys = np.flatnonzero(a.eligible)
    keys = a.fkey[ys]
    order = np.argsort(keys, kind="stable")
    ys, keys = ys[order], keys[order]
    starts = np.flatnonzero(np.r_[True, np.diff(keys) != 0]) if ys.size else np.zeros(0, dtype=np.int64)
    roots = frozenset(np.flatnonzero(G.squares() == x).tolist())
    j_size = len(roots) if G.square(x) != 0 else len(roots) // 2
    plan = SelectionPlan(x, roots, j_size, ys, starts, (1 << a.t[ys]).astype(np.float64))
    sizes = plan.sizes
    bad = np.flatnonzero((sizes != 1) & (sizes != 2) & (sizes != 4))
    if bad.size:
        i = int(bad[0])
        comp = tuple(ys[starts[i] : starts[i] + sizes[i]].tolist())
        raise StructureViolationError(
            f"R(x) component of size {len(comp)} at x={x} in {G.name}: {comp}",
            witness=(G.name, x, comp),
        )
    return plan


@dataclass
class SelectionCheck:
    x: int
    expected_score: float
    edge_count: int
    ineligible_half_degree: float
    component_sizes: Counter

    @property
    def slack_bound(self) -> float:
        return self.edge_count - self.ineligible_half_degree

    @property
    def ok(self) -> bool:
        return self.expected_score >= self.slack_bound - 1e-9


def selection_expectation_check(G: Group, x: int, analysis: XAnalysis | None = None) -> SelectionCheck:
    a = analysis if analysis is not None else analyze(G, x)
    plan = build_R_graph(G, x, a)
    e = int(a.degree.sum()) // 2
    half = float(a.degree[~a.eligible].sum()) / 2
    check = SelectionCheck(x, plan.expected_score, e, half, plan.size_histogram())
    if not check.ok:
        raise VerificationError(
            f"selection score {check.expected_score} < {e} - {half} at x={x} in {G.name}",
            witness=(G.name, x),
        )
    return check


def row_pairing_census(G: Group, x: int, analysis: XAnalysis | None = None) -> dict[int, int]:
    """Population of eligible y per row, checked against the y -> y^-1 pairing."""
    a = analysis if analysis is not None else analyze(G, x)
    ys = np.flatnonzero(a.eligible)
    rows = a.rows[ys]
    inv_rows = a.rows[G.inv(ys)]
    image = np.array([0] + [ROW_INVERSION[r] for r in range(1, 25)])[rows]
    bad = np.flatnonzero(inv_rows != image)
    if bad.size:
        y = int(ys[bad[0]])
        raise VerificationError(
            f"y={y} lies in row {a.rows[y]} but y^-1 lies in row {a.rows[G.inv(y)]} "
            f"(expected {ROW_INVERSION[int(a.rows[y])]}) at x={x} in {G.name}",
            witness=(G.name, x, y),
        )
    counts = {r: 0 for r in range(1, 25)}
    for r, c in Counter(rows.tolist()).items():
        counts[r] = c
    for r, s in ROW_INVERSION.items():
        if counts[r] != counts[s]:
            raise VerificationError(
                f"rows {r} and {s} have {counts[r]} and {counts[s]} members at x={x} in {G.name}",
                witness=(G.name, x),
            )
    return counts


# --------------------------------------------------------------------------
# closure oracle
# --------------------------------------------------------------------------


def observed_relation_sets(groups) -> Counter:
    """Every relation set realized by some ``(x, y)``, x != 1, over ``groups``."""
    seen: Counter = Counter()
    for G in groups:
        ys = G.elements()
        for x in range(1, G.order):
            bits = relation_bits(G, x, ys)
            code = np.zeros(G.order, dtype=np.int64)
            for i in range(9):
                code |= bits[i].astype(np.int64) << i
            for c, k in zip(*np.unique(code, return_counts=True)):
                seen[frozenset(r for r in range(1, 10) if int(c) >> (r - 1) & 1)] += int(k)
    return seen


def canonical_closures(groups=None) -> list[frozenset[int]]:
    """The relation sets of the 24 table rows, certified by observation.

    Relation vectors are collected from every ``(x, y)`` of the witness
    groups.  Raises :class:`TableCompletenessError` if a vector outside the
    table is seen or a row is never realized.
    """
    if groups is None:
        from .corpus import closure_witness_groups

        groups = closure_witness_groups()
    seen = observed_relation_sets(groups)
    table = {row.relations for row in TABLE_ROWS}
    extra = [s for s in seen if s not in table]
    if extra:
        raise TableCompletenessError(f"observed relation set {sorted(extra[0])} matches no row", witness=extra[0])
    missing = [row.row_id for row in TABLE_ROWS if row.relations not in seen]
    if missing:
        raise TableCompletenessError(f"rows {missing} are not realized by the witness groups", witness=missing)
    if len(seen) != 24 or sorted(map(sorted, seen)) != sorted(map(sorted, closed_relation_sets())):
        raise TableCompletenessError("observed relation sets differ from the closed sets")
    return [row.relations for row in TABLE_ROWS]
