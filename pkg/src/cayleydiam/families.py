"""Group families with prescribed diameter-2 thresholds, and the admissible set.

    thm2:c  (1/4 <= c < 1/2)  S_k x C_m,        m = floor(k!^(2c/(1-2c)))
    thm3:c  (1/2 <= c < 1)    (C_2)^k x C_m,    m = floor(2^((1-c)k/c))
    thm4:c  (1 <= c < 4/3)    (C_2)^k x D_2m,   m = floor(2^((4-3c)k/(3c)))
    thm5:n  (n >= 1)          (C_2)^k x D_4n,   threshold 4n/(3n-1)

``c`` is parsed as an exact rational ("0.3" means 3/10) so the floors are
computed without rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .depgraph import dep_census
from .errors import CapacityError, DescriptorError, DomainError
from .groups import (
    MAX_ORDER,
    Cyclic,
    Descriptor,
    Dihedral,
    Elem2,
    Group,
    Product,
    Symmetric,
    SYMMETRIC_MAX_DEGREE,
    build_group,
    descriptor_order,
)

INTERVALS = {
    "thm2": (Fraction(1, 4), Fraction(1, 2)),
    "thm3": (Fraction(1, 2), Fraction(1)),
    "thm4": (Fraction(1), Fraction(4, 3)),
}


@dataclass(frozen=True)
class FamilySpec:
    variant: str
    param: Fraction

    def __post_init__(self):
        if self.variant in INTERVALS:
            lo, hi = INTERVALS[self.variant]
            if not lo <= self.param < hi:
                raise DomainError(f"{self.variant} needs c in [{lo}, {hi}), got {self.param}")
        elif self.variant == "thm5":
            if self.param.denominator != 1 or self.param < 1:
                raise DomainError(f"thm5 needs a positive integer n, got {self.param}")
        else:
            raise DescriptorError(f"unknown family {self.variant!r}")

    def __str__(self) -> str:
        p = self.param
        return f"{self.variant}:{p.numerator if p.denominator == 1 else _decimal(p)}"


def _decimal(p: Fraction) -> str:
    # finite decimal when possible, else a/b
    d = p.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{p.numerator}/{p.denominator}"
    digits = 0
    while (p * 10**digits).denominator != 1:
        digits += 1
    return f"{float(p):.{digits}f}"


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(repr(text))
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise DescriptorError(f"not a rational number: {text!r}") from None


def parse_family(text: str) -> FamilySpec:
    """``thm3:0.75`` or ``thm5:2``."""
    name, sep, arg = text.partition(":")
    if not sep:
        raise DescriptorError(f"family spec needs the form name:param, got {text!r}")
    return FamilySpec(name.strip(), parse_rational(arg))


def _floor_power(base: int, exponent: Fraction) -> int:
    """floor(base ** exponent) for a positive integer base and rational exponent >= 0."""
    p, q = exponent.numerator, exponent.denominator
    target = base**p
    lo, hi = 0, 1
    while hi**q <= target:
        hi *= 2
    lo = hi // 2
    # integer q-th root: largest lo with lo**q <= target
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**q <= target:
            lo = mid
        else:
            hi = mid
    return lo


def family_modulus(spec: FamilySpec, k: int) -> int:
    """The m of the k-th member (for thm5, the dihedral rotation count 2n)."""
    if k < 1:
        raise DomainError("the family index k must be positive")
    c = spec.param
    if spec.variant == "thm2":
        return _floor_power(math.factorial(k), 2 * c / (1 - 2 * c))
    if spec.variant == "thm3":
        return _floor_power(2, (1 - c) * k / c)
    if spec.variant == "thm4":
        return _floor_power(2, (4 - 3 * c) * k / (3 * c))
    return 2 * int(c)


def build_family_member(spec: FamilySpec | str, k: int, cap_order: int = MAX_ORDER) -> Descriptor:
    if isinstance(spec, str):
        spec = parse_family(spec)
    m = family_modulus(spec, k)
    if m < 1:
        raise DomainError(f"{spec} at k={k} gives m={m}")
    if spec.variant == "thm2":
        if k > SYMMETRIC_MAX_DEGREE:
            raise CapacityError(f"{spec} at k={k} needs symmetric:{k}")
        desc: Descriptor = Product(Symmetric(k), Cyclic(m))
    elif spec.variant == "thm3":
        desc = Product(Elem2(k), Cyclic(m))
    else:
        desc = Product(Elem2(k), Dihedral(m))
    order = descriptor_order(desc)
    if order > cap_order:
        raise CapacityError(f"{spec} at k={k} has order {order}, above the cap {cap_order}")
    return desc


def closed_form_threshold(spec: FamilySpec | str) -> Fraction:
    if isinstance(spec, str):
        spec = parse_family(spec)
    if spec.variant == "thm5":
        n = spec.param
        return 4 * n / (3 * n - 1)
    return spec.param


def threshold_from_involutions(alpha) -> Fraction:
    """2 / (2 - alpha) for an involution proportion alpha > 1/2."""
    alpha = parse_rational(alpha)
    if not Fraction(1, 2) < alpha <= 1:
        raise DomainError(f"the involution formula needs 1/2 < alpha <= 1, got {alpha}")
    return 2 / (2 - alpha)


def admissible_threshold(c) -> bool:
    """c in [1/4, 4/3] or c = 4n/(3n-1) for a positive integer n (exact)."""
    c = parse_rational(c)
    if Fraction(1, 4) <= c <= Fraction(4, 3):
        return True
    if c > Fraction(4, 3):
        n = c / (3 * c - 4)
        return n.denominator == 1
    return False


def admissible_threshold_approx(c: float, tol: float = 1e-9) -> tuple[bool, bool]:
    """Float convenience wrapper returning ``(answer, tolerance_sensitive)``.

    c counts as admissible when it lies within ``tol`` of the admissible set.
    The flag is set when c is within ``tol`` of an endpoint of [1/4, 4/3] or of
    an isolated point 4n/(3n-1), where the exact answer depends on digits
    below the tolerance.
    """
    c = float(c)
    near_end = abs(c - 0.25) <= tol or abs(c - 4 / 3) <= tol
    if 0.25 - tol <= c <= 4 / 3 + tol:
        return True, near_end
    if c > 4 / 3:
        n = c / (3 * c - 4)
        for m in {max(1, math.floor(n)), math.ceil(n)}:
            if abs(4 * m / (3 * m - 1) - c) <= tol:
                return True, True
    return False, near_end


def involution_proportion(G: Group) -> Fraction:
    return Fraction(G.involution_count(), G.order)


def family_members(spec: FamilySpec | str, ks, cap_order: int = MAX_ORDER) -> list[Descriptor]:
    return [build_family_member(spec, k, cap_order) for k in ks]


# --------------------------------------------------------------------------
# finite-size edge censuses
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CensusCheck:
    """One edge-count check: ``|value - expected| <= slack`` or ``value >= expected - slack``."""

    name: str
    group: str
    x: int
    value: float
    expected: float
    slack: float
    one_sided: bool = False

    @property
    def ok(self) -> bool:
        if self.one_sided:
            return self.value >= self.expected - self.slack
        return abs(self.value - self.expected) <= self.slack


def central_involution_check(G: Group, x: int) -> CensusCheck:
    """For central x with x^2 = 1: e = n - (involutions + |K(x)|) / 2 exactly.

    A vertex y has neighbours xy and xy^-1 only; they coincide when y^2 = 1,
    and when y^2 = x the second one is y itself.
    """
    if G.square(x) != 0 or G.centralizer_size(x) != G.order:
        raise DomainError(f"{x} is not a central involution of {G.name}")
    _, edges = dep_census(G, x)
    expected = G.order - (G.involution_count() + G.root_count(x)) / 2
    return CensusCheck("central_involution", G.name, int(x), edges, expected, 0.0)


def noncentral_involution_check(G: Group, x: int) -> CensusCheck:
    """e >= (1 - beta/2) n - 8 (3 + loops) with beta the centralizer proportion."""
    if G.square(x) != 0 or int(x) == 0:
        raise DomainError(f"{x} is not an involution of {G.name}")
    beta = G.centralizer_size(x) / G.order
    if beta > 0.5:
        raise DomainError(f"{x} is central in {G.name}")
    loops, edges = dep_census(G, x)
    return CensusCheck(
        "noncentral_involution", G.name, int(x), edges, (1 - beta / 2) * G.order, 8 * (3 + loops), one_sided=True
    )


def _sample_indices(count: int, limit: int) -> list[int]:
    """1..count-1 when small, else an even spread including the ends."""
    if count - 1 <= limit:
        return list(range(1, count))
    step = (count - 1) / (limit - 1)
    return sorted({1 + round(i * step) for i in range(limit)} - {count})


def family_census(spec: FamilySpec | str, k: int, cap_order: int = 1 << 16, per_case: int = 4) -> list[CensusCheck]:
    """Edge-count checks for the k-th member of a family.

    thm3: x = (x', 1) has e within 2^(k+1)*4 of N.
    thm4: x = (x', 1) has e within 2^(k+1)*4 of 3N/4, and x = (1, r^j) with
          r^j a square in the rotation subgroup has at least 2^k square roots.
    every family: central involutions satisfy the exact count, non-central ones the lower bound.
    """
    if isinstance(spec, str):
        spec = parse_family(spec)
    G = build_group(build_family_member(spec, k, cap_order))
    n = G.order
    left, right = G.left, G.right
    checks: list[CensusCheck] = []
    slack = 2 ** (k + 1) * 4
    if spec.variant in ("thm3", "thm4") and left.order > 1:
        target = n if spec.variant == "thm3" else 3 * n / 4
        for a in _sample_indices(left.order, per_case):
            x = G.join(a, 0)
            _, edges = dep_census(G, x)
            checks.append(CensusCheck(f"{spec.variant}_elem2_axis", G.name, x, edges, target, slack))
    if spec.variant == "thm4":
        m = right.order // 2
        squares = sorted({(2 * j) % m for j in range(m)} - {0})
        for j in squares[:per_case]:
            x = G.join(0, right.rotation(j))
            checks.append(CensusCheck("thm4_rotation_roots", G.name, x, G.root_count(x), 2**k, 0.0, one_sided=True))
    involutions = np.flatnonzero(G.squares() == 0)[1:]
    central = [int(x) for x in involutions if G.centralizer_size(int(x)) == n]
    noncentral = [int(x) for x in involutions if G.centralizer_size(int(x)) * 2 <= n]
    for pool, check in ((central, central_involution_check), (noncentral, noncentral_involution_check)):
        for i in _sample_indices(len(pool) + 1, per_case):
            checks.append(check(G, pool[i - 1]))
    return checks
