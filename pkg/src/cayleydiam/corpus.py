"""Standard group collections used by the verification sweeps."""

from __future__ import annotations

from .groups import (
    Cyclic,
    Dihedral,
    Elem2,
    Group,
    Product,
    Symmetric,
    build_group,
    dicyclic_table,
    metacyclic_table,
    parse_descriptor,
)

_PRODUCTS = (
    "product(cyclic:2,cyclic:2)",
    "product(cyclic:2,cyclic:4)",
    "product(cyclic:4,cyclic:4)",
    "product(elem2:2,cyclic:5)",
    "product(elem2:3,dihedral:2)",
    "product(elem2:3,dihedral:4)",
    "product(cyclic:3,dihedral:4)",
    "product(dihedral:3,dihedral:4)",
    "product(symmetric:3,cyclic:5)",
    "product(symmetric:3,symmetric:3)",
    "product(symmetric:4,cyclic:3)",
    "product(cyclic:16,cyclic:16)",
    "product(symmetric:4,dihedral:6)",
    "product(elem2:4,dihedral:16)",
    "product(cyclic:32,dihedral:8)",
    "product(symmetric:4,symmetric:4)",
    "product(symmetric:5,cyclic:6)",
    "product(symmetric:5,elem2:3)",
    "product(elem2:6,dihedral:8)",
    "product(symmetric:5,dihedral:6)",
    "product(product(elem2:3,symmetric:4),cyclic:5)",
    "product(elem2:6,cyclic:32)",
)


def default_corpus(max_order: int | None = None) -> list[Group]:
    """Cyclic m <= 32, dihedral m <= 16, symmetric n <= 5, elem2 k <= 6, and products."""
    descs = (
        [Cyclic(m) for m in range(1, 33)]
        + [Dihedral(m) for m in range(1, 17)]
        + [Symmetric(n) for n in range(1, 6)]
        + [Elem2(k) for k in range(0, 7)]
        + [parse_descriptor(p) for p in _PRODUCTS]
    )
    groups = [build_group(d) for d in descs]
    if max_order is not None:
        groups = [G for G in groups if G.order <= max_order]
    return groups


def extra_corpus() -> list[Group]:
    """Dicyclic and metacyclic groups given by explicit Cayley tables."""
    return (
        [build_group(dicyclic_table(m)) for m in (2, 3, 4, 5)]
        + [build_group(metacyclic_table(*args)) for args in ((8, 2, 5), (8, 2, 3), (7, 3, 2), (9, 3, 4))]
        + [build_group(Product(dicyclic_table(2), Cyclic(2)))]
    )


def closure_witness_groups() -> list[Group]:
    """Groups whose (x, y) pairs realize every row of the case table."""
    return default_corpus(max_order=200) + extra_corpus()


def small_corpus(max_order: int) -> list[Group]:
    """All corpus groups of order at most ``max_order`` (including extras), n >= 2."""
    return [G for G in default_corpus(max_order) + extra_corpus() if 2 <= G.order <= max_order]
