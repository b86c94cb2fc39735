"""Finite groups on dense indices.

Every group stores its elements as the integers ``0 .. n-1`` with ``0`` the
identity.  Multiplication and inversion accept Python ints or numpy integer
arrays (broadcasting like ufuncs) and are computed from the structure of the
group.  Small groups additionally cache their full Cayley table.

Supported descriptors::

    cyclic:5          C_5
    dihedral:4        D_8 (order 2m, srs = r^-1)
    symmetric:4       S_4, composition (fg)(i) = f(g(i))
    elem2:3           (C_2)^3
    product(A,B)      direct product, index = a + |A| * b
    table:<path>      explicit Cayley table read from a JSON file
"""

from __future__ import annotations

import functools
import itertools
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import CapacityError, DescriptorError, GroupValidationError

SYMMETRIC_MAX_DEGREE = 8
TABLE_CACHE_MAX = 2048
MAX_ORDER = 2**62
EXHAUSTIVE_ASSOCIATIVITY_MAX = 64


# --------------------------------------------------------------------------
# descriptors
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Cyclic:
    m: int

    def __str__(self) -> str:
        return f"cyclic:{self.m}"


@dataclass(frozen=True)
class Dihedral:
    """Dihedral group with ``m`` rotations, of order ``2m``."""

    m: int

    def __str__(self) -> str:
        return f"dihedral:{self.m}"


@dataclass(frozen=True)
class Symmetric:
    n: int

    def __str__(self) -> str:
        return f"symmetric:{self.n}"


@dataclass(frozen=True)
class Elem2:
    k: int

    def __str__(self) -> str:
        return f"elem2:{self.k}"


@dataclass(frozen=True)
class Product:
    left: "Descriptor"
    right: "Descriptor"

    def __str__(self) -> str:
        return f"product({self.left},{self.right})"


@dataclass(frozen=True)
class Table:
    rows: tuple
    label: str = ""

    def __str__(self) -> str:
        return self.label or f"table:{len(self.rows)}"


Descriptor = Union[Cyclic, Dihedral, Symmetric, Elem2, Product, Table]

_ATOM = re.compile(r"\s*([a-z0-9_]+)\s*:\s*([^,()\s]+)\s*")


def parse_descriptor(text: str) -> Descriptor:
    """Parse the canonical text form, e.g. ``product(elem2:3,dihedral:2)``."""
    desc, rest = _parse(text.strip(), text)
    if rest.strip():
        raise DescriptorError(f"trailing characters in descriptor {text!r}: {rest!r}")
    return desc


def _parse(s: str, whole: str):
    s = s.lstrip()
    if s.startswith("product"):
        body = s[len("product"):].lstrip()
        if not body.startswith("("):
            raise DescriptorError(f"expected '(' after product in {whole!r}")
        left, rest = _parse(body[1:], whole)
        rest = rest.lstrip()
        if not rest.startswith(","):
            raise DescriptorError(f"expected ',' in product of {whole!r}")
        right, rest = _parse(rest[1:], whole)
        rest = rest.lstrip()
        if not rest.startswith(")"):
            raise DescriptorError(f"expected ')' closing product in {whole!r}")
        return Product(left, right), rest[1:]
    m = _ATOM.match(s)
    if not m:
        raise DescriptorError(f"cannot parse group descriptor {whole!r}")
    name, arg = m.group(1), m.group(2)
    rest = s[m.end():]
    if name == "table":
        return load_table(arg), rest
    if name == "metacyclic":
        parts = arg.split(".")
        if len(parts) != 3 or not all(p.isdigit() for p in parts):
            raise DescriptorError(f"metacyclic needs m.k.r in {whole!r}")
        return metacyclic_table(*map(int, parts)), rest
    try:
        value = int(arg)
    except ValueError:
        raise DescriptorError(f"non-integer parameter {arg!r} in {whole!r}") from None
    if name == "dicyclic":
        return dicyclic_table(value), rest
    kinds = {"cyclic": Cyclic, "dihedral": Dihedral, "symmetric": Symmetric, "elem2": Elem2}
    if name not in kinds:
        raise DescriptorError(f"unknown group family {name!r} in {whole!r}")
    return kinds[name](value), rest


def load_table(path: str) -> Table:
    with open(path) as fh:
        rows = json.load(fh)
    if isinstance(rows, dict):
        rows = rows.get("rows")
    if not isinstance(rows, list):
        raise DescriptorError(f"{path}: expected a JSON list of rows")
    return Table(tuple(tuple(int(v) for v in row) for row in rows), label=f"table:{path}")


def descriptor_order(desc: Descriptor) -> int:
    """Order of the described group, without building it."""
    if isinstance(desc, Cyclic):
        return desc.m
    if isinstance(desc, Dihedral):
        return 2 * desc.m
    if isinstance(desc, Symmetric):
        return math.factorial(desc.n)
    if isinstance(desc, Elem2):
        return 2**desc.k
    if isinstance(desc, Product):
        return descriptor_order(desc.left) * descriptor_order(desc.right)
    if isinstance(desc, Table):
        return len(desc.rows)
    raise DescriptorError(f"not a group descriptor: {desc!r}")


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _divisors(m: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= m:
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
        d += 1
    return small + large[::-1]


def _totient(m: int) -> int:
    result, p, rest = m, 2, m
    while p * p <= rest:
        if rest % p == 0:
            while rest % p == 0:
                rest //= p
            result -= result // p
        p += 1
    if rest > 1:
        result -= result // rest
    return result


def _partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for part in range(min(n, largest), 0, -1):
        for rest in _partitions(n - part, part):
            yield (part,) + rest


# --------------------------------------------------------------------------
# groups
# --------------------------------------------------------------------------


class Group:
    """A finite group with elements ``0 .. order-1`` and identity ``0``.

    Subclasses implement ``_mul`` and ``_inv`` on int64 arrays.  Instances
    are immutable and safe to share between threads and processes.
    """

    descriptor: Descriptor
    order: int
    identity = 0
    _cache_table = False

    def __init__(self, descriptor: Descriptor, order: int):
        if order > MAX_ORDER:
            raise CapacityError(f"group order {order} exceeds the index capacity 2^62")
        self.descriptor = descriptor
        self.order = order
        self._table = None
        self._inverse = None
        self._squares = None

    def __repr__(self) -> str:
        return f"<Group {self.name} order={self.order}>"

    def __reduce__(self):
        return (build_group, (self.descriptor,))

    @property
    def name(self) -> str:
        return str(self.descriptor)

    # -- arithmetic --------------------------------------------------------

    def mul(self, a, b):
        scalar = np.ndim(a) == 0 and np.ndim(b) == 0
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        table = self._cayley_table()
        if table is not None:
            out = table[a, b].astype(np.int64)
        else:
            a, b = np.broadcast_arrays(a, b)
            out = self._mul(a.ravel(), b.ravel()).reshape(a.shape)
        return int(out) if scalar else out

    def inv(self, a):
        scalar = np.ndim(a) == 0
        a = np.asarray(a, dtype=np.int64)
        if self._inverse is not None:
            out = self._inverse[a]
        else:
            out = self._inv(a.ravel()).reshape(a.shape)
        return int(out) if scalar else out

    def square(self, a):
        return self.mul(a, a)

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def _cayley_table(self):
        if self._table is None and self._cache_table and self.order <= TABLE_CACHE_MAX:
            idx = np.arange(self.order, dtype=np.int64)
            a, b = np.meshgrid(idx, idx, indexing="ij")
            dtype = np.int16 if self.order < 2**15 else np.int32
            self._table = self._mul(a.ravel(), b.ravel()).reshape(a.shape).astype(dtype)
            self._inverse = self._inv(idx)
        return self._table

    def cayley_table(self) -> np.ndarray:
        """Full multiplication table; only for groups small enough to hold one."""
        if self.order > 2**13:
            raise CapacityError(f"refusing to materialize a {self.order}^2 Cayley table")
        idx = self.elements()
        return self.mul(idx[:, None], idx[None, :])

    # -- structure ----------------------------------------------------------

    def squares(self) -> np.ndarray:
        """``squares()[i]`` is the index of ``i*i``."""
        if self._squares is None:
            if self.order > 2**26:
                raise CapacityError(f"square census of a group of order {self.order}")
            idx = self.elements()
            self._squares = self.mul(idx, idx)
        return self._squares

    def root_count(self, x: int) -> int:
        """Number of ``y`` with ``y*y == x``."""
        return int(np.count_nonzero(self.squares() == x))

    def involution_count(self) -> int:
        """Elements with ``x*x == 1``, identity included."""
        return self.root_count(0)

    def centralizer_size(self, x: int) -> int:
        idx = self.elements()
        return int(np.count_nonzero(self.mul(x, idx) == self.mul(idx, x)))

    def orbits(self) -> list[tuple[int, int]]:
        """Orbit representatives and sizes under a known group of automorphisms.

        The default is the trivial partition into singletons.  Orbits always
        cover every element exactly once; the identity is its own orbit.
        """
        return [(i, 1) for i in range(self.order)]

    # -- codec --------------------------------------------------------------

    def encode(self, value) -> int:
        return int(value)

    def decode(self, index: int):
        return int(index)

    # -- to override -------------------------------------------------------

    def _mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inv(self, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class CyclicGroup(Group):
    def __init__(self, desc: Cyclic):
        if desc.m < 1:
            raise DescriptorError(f"cyclic order must be positive, got {desc.m}")
        super().__init__(desc, desc.m)
        self.m = desc.m

    def _mul(self, a, b):
        return (a + b) % self.m

    def _inv(self, a):
        return (-a) % self.m

    def root_count(self, x):
        g = math.gcd(2, self.m)
        return g if x % g == 0 else 0

    def orbits(self):
        # Aut(C_m) acts by units; orbit of x is determined by gcd(x, m)
        return [(d % self.m, _totient(self.m // d)) for d in reversed(_divisors(self.m))]

    def encode(self, value):
        return int(value) % self.m


class DihedralGroup(Group):
    """``r^k s^f`` is stored as ``k + m*f``."""

    def __init__(self, desc: Dihedral):
        if desc.m < 1:
            raise DescriptorError(f"dihedral parameter must be positive, got {desc.m}")
        super().__init__(desc, 2 * desc.m)
        self.m = desc.m

    def _mul(self, a, b):
        m = self.m
        k1, f1 = a % m, a // m
        k2, f2 = b % m, b // m
        k = (k1 + np.where(f1 == 1, -k2, k2)) % m
        return k + m * (f1 ^ f2)

    def _inv(self, a):
        m = self.m
        k, f = a % m, a // m
        return np.where(f == 1, a, (-k) % m)

    def root_count(self, x):
        m = self.m
        if x >= m:
            return 0
        g = math.gcd(2, m)
        count = g if x % g == 0 else 0
        return count + (m if x == 0 else 0)

    def orbits(self):
        # r -> r^u, s -> r^v s: rotations by gcd class, all reflections together
        m = self.m
        rot = [(d % m, _totient(m // d)) for d in reversed(_divisors(m))]
        return rot + [(m, m)]

    def encode(self, value):
        k, f = value
        return int(k) % self.m + self.m * int(f)

    def decode(self, index):
        return (int(index) % self.m, int(index) // self.m)

    def rotation(self, k: int) -> int:
        return k % self.m

    def reflection(self, k: int = 0) -> int:
        return k % self.m + self.m


class SymmetricGroup(Group):
    """Permutations of ``0..n-1`` in lexicographic order of their image tuples."""

    _cache_table = True

    def __init__(self, desc: Symmetric):
        if desc.n < 1:
            raise DescriptorError(f"symmetric degree must be positive, got {desc.n}")
        if desc.n > SYMMETRIC_MAX_DEGREE:
            raise CapacityError(
                f"symmetric:{desc.n} has {math.factorial(desc.n)} elements; "
                f"degree is capped at {SYMMETRIC_MAX_DEGREE}"
            )
        super().__init__(desc, math.factorial(desc.n))
        n = self.n = desc.n
        self.perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
        self._weights = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
        self._codes = self.perms @ self._weights
        self._inverse = self._rank(np.argsort(self.perms, axis=1))

    def _rank(self, perms: np.ndarray) -> np.ndarray:
        return np.searchsorted(self._codes, perms @ self._weights)

    def _mul(self, a, b):
        # (fg)(i) = f(g(i))
        composed = np.take_along_axis(self.perms[a], self.perms[b], axis=1)
        return self._rank(composed)

    def _inv(self, a):
        return self._inverse[a]

    def orbits(self):
        # conjugacy classes, one per cycle type
        out = []
        n = self.n
        for shape in _partitions(n):
            image = list(range(n))
            start = 0
            for length in shape:
                for i in range(length):
                    image[start + i] = start + (i + 1) % length
                start += length
            z = 1
            for length, mult in _multiplicities(shape):
                z *= length**mult * math.factorial(mult)
            out.append((self.encode(image), math.factorial(n) // z))
        out.sort()
        return out

    def encode(self, value):
        perm = np.asarray(value, dtype=np.int64).reshape(1, -1)
        if perm.shape[1] != self.n or sorted(perm[0].tolist()) != list(range(self.n)):
            raise DescriptorError(f"{value!r} is not a permutation of 0..{self.n - 1}")
        return int(self._rank(perm)[0])

    def decode(self, index):
        return tuple(int(v) for v in self.perms[index])

    def transposition(self, i: int, j: int) -> int:
        image = list(range(self.n))
        image[i], image[j] = image[j], image[i]
        return self.encode(image)

    def cycle(self, *points: int) -> int:
        image = list(range(self.n))
        for a, b in zip(points, points[1:] + points[:1]):
            image[a] = b
        return self.encode(image)


def _multiplicities(shape):
    counts: dict[int, int] = {}
    for part in shape:
        counts[part] = counts.get(part, 0) + 1
    return counts.items()


class Elem2Group(Group):
    def __init__(self, desc: Elem2):
        if desc.k < 0:
            raise DescriptorError(f"elem2 rank must be nonnegative, got {desc.k}")
        super().__init__(desc, 2**desc.k)
        self.k = desc.k

    def _mul(self, a, b):
        return a ^ b

    def _inv(self, a):
        return a

    def root_count(self, x):
        return self.order if x == 0 else 0

    def orbits(self):
        if self.order == 1:
            return [(0, 1)]
        return [(0, 1), (1, self.order - 1)]

    def encode(self, value):
        return sum(int(bit) << i for i, bit in enumerate(value))

    def decode(self, index):
        return tuple((int(index) >> i) & 1 for i in range(self.k))


class ProductGroup(Group):
    """``(a, b)`` is stored as ``a + |A|*b``."""

    def __init__(self, desc: Product):
        self.left = build_group(desc.left)
        self.right = build_group(desc.right)
        super().__init__(desc, self.left.order * self.right.order)
        self._cache_table = self.left._cache_table or self.right._cache_table

    def split(self, a):
        n = self.left.order
        return a % n, a // n

    def join(self, a, b):
        return a + self.left.order * b

    def _mul(self, a, b):
        a1, a2 = self.split(a)
        b1, b2 = self.split(b)
        return self.join(self.left.mul(a1, b1), self.right.mul(a2, b2))

    def _inv(self, a):
        a1, a2 = self.split(a)
        return self.join(self.left.inv(a1), self.right.inv(a2))

    def root_count(self, x):
        a, b = self.split(int(x))
        return self.left.root_count(a) * self.right.root_count(b)

    def involution_count(self):
        return self.left.involution_count() * self.right.involution_count()

    def centralizer_size(self, x):
        a, b = self.split(int(x))
        return self.left.centralizer_size(a) * self.right.centralizer_size(b)

    def orbits(self):
        return [
            (self.join(ra, rb), sa * sb)
            for rb, sb in self.right.orbits()
            for ra, sa in self.left.orbits()
        ]

    def encode(self, value):
        a, b = value
        return self.join(self.left.encode(a), self.right.encode(b))

    def decode(self, index):
        a, b = self.split(int(index))
        return (self.left.decode(a), self.right.decode(b))


class TableGroup(Group):
    def __init__(self, desc: Table):
        rows = desc.rows
        n = len(rows)
        if n == 0:
            raise GroupValidationError("Cayley table is empty")
        table = _validate_table(rows)
        super().__init__(desc, n)
        dtype = np.int16 if n < 2**15 else np.int32
        self._table = table.astype(dtype)
        self._inverse = np.argmin(table, axis=1).astype(np.int64)

    def _mul(self, a, b):
        return self._table[a, b].astype(np.int64)

    def _inv(self, a):
        return self._inverse[a]


def _validate_table(rows: Sequence[Sequence[int]]) -> np.ndarray:
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise GroupValidationError(f"Cayley table is not square ({n} rows)")
    t = np.asarray(rows, dtype=np.int64)
    if t.min() < 0 or t.max() >= n:
        raise GroupValidationError(f"Cayley table entries must lie in 0..{n - 1}")
    idx = np.arange(n)
    bad = np.flatnonzero((t[0] != idx) | (t[:, 0] != idx))
    if bad.size:
        i = int(bad[0])
        raise GroupValidationError(
            f"index 0 is not a two-sided identity: 0*{i} = {t[0, i]}, {i}*0 = {t[i, 0]}"
        )
    for axis, what in ((1, "row"), (0, "column")):
        ok = np.all(np.sort(t, axis=axis) == (idx[None, :] if axis == 1 else idx[:, None]), axis=axis)
        if not ok.all():
            i = int(np.flatnonzero(~ok)[0])
            raise GroupValidationError(f"{what} {i} of the Cayley table is not a permutation")
    witness = _associativity_witness(t)
    if witness is not None:
        a, b, c = witness
        raise GroupValidationError(
            f"associativity fails at (a, b, c) = ({a}, {b}, {c}): "
            f"(ab)c = {t[t[a, b], c]} but a(bc) = {t[a, t[b, c]]}"
        )
    return t


def _associativity_witness(t: np.ndarray):
    n = t.shape[0]
    if n <= EXHAUSTIVE_ASSOCIATIVITY_MAX:
        lhs = t[t, :]  # (ab)c indexed [a, b, c]
        rhs = t[:, t]  # a(bc) indexed [a, b, c]
        bad = np.argwhere(lhs != rhs)
        return tuple(int(v) for v in bad[0]) if bad.size else None
    # Light's test over a generating set: elements a with (xa)y = x(ay) for all
    # x, y are closed under multiplication, so checking generators suffices.
    reached = np.zeros(n, dtype=bool)
    reached[0] = True
    gens: list[int] = []
    while not reached.all():
        g = int(np.flatnonzero(~reached)[0])
        gens.append(g)
        frontier = np.flatnonzero(reached)
        while frontier.size:
            nxt = np.unique(t[frontier][:, gens].ravel())
            nxt = nxt[~reached[nxt]]
            reached[nxt] = True
            frontier = nxt
    for a in gens:
        lhs = t[t[:, a], :]  # (xa)y indexed [x, y]
        rhs = t[:, t[a, :]]  # x(ay)
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            x, y = (int(v) for v in bad[0])
            return (x, a, y)
    return None


@functools.lru_cache(maxsize=256)
def _build_cached(desc: Descriptor) -> Group:
    if isinstance(desc, Cyclic):
        return CyclicGroup(desc)
    if isinstance(desc, Dihedral):
        return DihedralGroup(desc)
    if isinstance(desc, Symmetric):
        return SymmetricGroup(desc)
    if isinstance(desc, Elem2):
        return Elem2Group(desc)
    if isinstance(desc, Product):
        return ProductGroup(desc)
    if isinstance(desc, Table):
        return TableGroup(desc)
    raise DescriptorError(f"not a group descriptor: {desc!r}")


def build_group(desc: Descriptor | str) -> Group:
    """Build (or fetch from cache) the group for a descriptor or its text form."""
    if isinstance(desc, str):
        desc = parse_descriptor(desc)
    if isinstance(desc, Group):
        return desc
    if descriptor_order(desc) > MAX_ORDER:
        raise CapacityError(f"{desc} has order {descriptor_order(desc)}, above 2^62")
    return _build_cached(desc)


# --------------------------------------------------------------------------
# free functions mirroring the operation list
# --------------------------------------------------------------------------


def multiply(G: Group, a, b):
    return G.mul(a, b)


def inverse(G: Group, a):
    return G.inv(a)


def square_roots(G: Group, x: int) -> set[int]:
    """All ``y`` with ``y*y == x``."""
    return set(np.flatnonzero(G.squares() == x).tolist())


def involution_count(G: Group) -> int:
    """Number of ``x`` with ``x*x == 1``; the identity is counted."""
    return G.involution_count()


def involution_proportion(G: Group) -> Fraction:
    return Fraction(G.involution_count(), G.order)


def loop_count(G: Group, x: int) -> int:
    """``|{y : y^2 in {x, x^-1}}|``, the number of looped vertices of Gamma_x."""
    roots = G.root_count(x)
    return roots if G.square(x) == 0 else 2 * roots


def dicyclic_table(m: int) -> Table:
    """Dicyclic group of order 4m (m=2 gives the quaternion group Q_8).

    ``a^k x^j`` is stored as ``k + 2m*j`` with ``a`` of order 2m,
    ``x^2 = a^m`` and ``x a x^-1 = a^-1``.
    """
    if m < 1:
        raise DescriptorError("dicyclic parameter must be positive")
    n2 = 2 * m
    rows = []
    for left in range(2 * n2):
        k, j = left % n2, left // n2
        row = []
        for right in range(2 * n2):
            l, i = right % n2, right // n2
            if j == 0:
                row.append((k + l) % n2 + n2 * i)
            elif i == 0:
                row.append((k - l) % n2 + n2)
            else:
                row.append((k - l + m) % n2)
        rows.append(tuple(row))
    return Table(tuple(rows), label=f"dicyclic:{m}")


def metacyclic_table(m: int, k: int, r: int) -> Table:
    """Split metacyclic group C_m x| C_k with ``b a b^-1 = a^r``, order ``m*k``.

    ``a^i b^j`` is stored as ``i + m*j``.  ``(8, 2, 5)`` (text form ``metacyclic:8.2.5``) is the modular group
    of order 16 and ``(8, 2, 3)`` the semidihedral group.
    """
    if m < 1 or k < 1 or pow(r, k, m) != 1 % m or math.gcd(r, m) != 1:
        raise DescriptorError(f"r={r} does not define an action of C_{k} on C_{m}")
    powers = [pow(r, j, m) for j in range(k)]
    rows = []
    for left in range(m * k):
        i, j = left % m, left // m
        rows.append(
            tuple((i + powers[j] * (right % m)) % m + m * ((j + right // m) % k) for right in range(m * k))
        )
    return Table(tuple(rows), label=f"metacyclic:{m}.{k}.{r}")
