from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cayleydiam.errors import CapacityError, DescriptorError, DomainError
from cayleydiam.families import (
    admissible_threshold,
    admissible_threshold_approx,
    build_family_member,
    central_involution_check,
    closed_form_threshold,
    family_census,
    family_modulus,
    involution_proportion,
    noncentral_involution_check,
    parse_family,
    threshold_from_involutions,
)
from cayleydiam.groups import build_group, descriptor_order


def test_member_examples():
    d = build_family_member("thm3:0.5", 4)
    assert str(d) == "product(elem2:4,cyclic:16)" and descriptor_order(d) == 256
    d = build_family_member("thm2:0.3", 4)
    assert family_modulus(parse_family("thm2:0.3"), 4) == 117
    assert descriptor_order(d) == 2808
    d = build_family_member("thm4:1", 3)
    assert str(d) == "product(elem2:3,dihedral:2)" and descriptor_order(d) == 32
    d = build_family_member("thm5:2", 3)
    assert str(d) == "product(elem2:3,dihedral:4)" and descriptor_order(d) == 64


def test_modulus_is_exact_near_integers():
    # 2^((1-c)k/c) with c = 1/2 is an exact power of two for every k
    for k in range(1, 60):
        assert family_modulus(parse_family("thm3:0.5"), k) == 2**k
    # 3!^(2c/(1-2c)) at c = 1/3 is 6^2 exactly
    assert family_modulus(parse_family("thm2:1/3"), 3) == 36
    # floor just below an integer: 2^(k/3) for k = 3j is exact
    spec = parse_family("thm3:0.75")
    for k in range(3, 40, 3):
        assert family_modulus(spec, k) == 2 ** (k // 3)


@given(num=st.integers(1, 99), k=st.integers(1, 30))
def test_modulus_matches_integer_bounds(num, k):
    c = Fraction(1, 2) + Fraction(num, 200)
    m = family_modulus(parse_family(f"thm3:{c.numerator}/{c.denominator}"), k)
    e = (1 - c) * k / c
    # m^q <= 2^p < (m+1)^q for the exponent p/q
    assert m ** e.denominator <= 2**e.numerator < (m + 1) ** e.denominator


def test_bad_specs_rejected():
    for text in ("thm2:0.5", "thm2:0.2", "thm3:1", "thm4:0.9", "thm5:0", "thm5:1.5"):
        with pytest.raises(DomainError):
            parse_family(text)
    with pytest.raises(DomainError):
        parse_family("thm4:4/3")
    for text in ("thm6:1", "thm3", "thm3:abc"):
        with pytest.raises(DescriptorError):
            parse_family(text)
    with pytest.raises(DomainError):
        build_family_member("thm3:0.5", 0)


def test_capacity():
    with pytest.raises(CapacityError) as err:
        build_family_member("thm3:0.5", 12, cap_order=1000)
    assert "16777216" in str(err.value)


def test_thresholds():
    assert closed_form_threshold("thm2:0.3") == Fraction(3, 10)
    assert closed_form_threshold("thm5:2") == Fraction(8, 5)
    assert closed_form_threshold("thm3:0.5") == Fraction(1, 2)
    assert threshold_from_involutions(1) == 2
    assert threshold_from_involutions(Fraction(3, 4)) == Fraction(8, 5)
    assert threshold_from_involutions(Fraction(1, 2) + Fraction(1, 6)) == Fraction(3, 2)
    for alpha in (Fraction(1, 2), Fraction(1, 3), Fraction(11, 10)):
        with pytest.raises(DomainError):
            threshold_from_involutions(alpha)


def test_admissible_set():
    assert admissible_threshold(1.0)
    assert admissible_threshold(Fraction(7, 5))
    assert admissible_threshold("7/5")
    assert not admissible_threshold(Fraction(29, 20))
    assert admissible_threshold(Fraction(1, 4)) and admissible_threshold(Fraction(4, 3))
    assert not admissible_threshold(Fraction(1, 5))
    assert admissible_threshold(2) and admissible_threshold(Fraction(8, 5))
    assert not admissible_threshold(Fraction(5, 2))


@given(n=st.integers(1, 10_000))
def test_isolated_points_are_admissible(n):
    c = Fraction(4 * n, 3 * n - 1)
    assert admissible_threshold(c)
    assert not admissible_threshold(c + Fraction(1, 10**9))


def test_admissible_approx():
    assert admissible_threshold_approx(1.4) == (True, True)
    assert admissible_threshold_approx(1.45) == (False, False)
    assert admissible_threshold_approx(0.7) == (True, False)
    assert admissible_threshold_approx(0.25 - 1e-12)[1]


def test_involution_proportion_examples():
    assert involution_proportion(build_group("product(elem2:3,dihedral:4)")) == Fraction(3, 4)
    assert involution_proportion(build_group("elem2:5")) == 1
    assert involution_proportion(build_group("cyclic:7")) == Fraction(1, 7)


@pytest.mark.parametrize("n", range(1, 17))
def test_thm5_involution_proportion(n):
    for k in range(1, 11):
        G = build_group(build_family_member(f"thm5:{n}", k))
        alpha = involution_proportion(G)
        assert alpha == Fraction(1, 2) + Fraction(1, 2 * n)
        if alpha > Fraction(1, 2):
            assert threshold_from_involutions(alpha) == closed_form_threshold(f"thm5:{n}")


def test_central_involution_formula_on_dihedral():
    G = build_group("dihedral:6")
    x = G.mul(G.rotation(1), G.rotation(2))  # r^3 is central
    chk = central_involution_check(G, x)
    assert chk.ok and chk.slack == 0 and chk.value == chk.expected


def test_noncentral_involution_bound():
    G = build_group("dihedral:9")
    chk = noncentral_involution_check(G, G.reflection())
    assert chk.ok and chk.one_sided


@pytest.mark.parametrize(
    "spec,ks",
    [("thm3:0.5", range(2, 8)), ("thm3:0.75", range(3, 10)), ("thm4:1", range(2, 8)), ("thm4:1.2", range(3, 9)),
     ("thm5:2", range(1, 6)), ("thm5:3", range(1, 5)), ("thm2:0.3", range(2, 5))],
)
def test_family_census(spec, ks):
    for k in ks:
        checks = family_census(spec, k)
        assert checks
        bad = [c for c in checks if not c.ok]
        assert not bad, bad
        for c in checks:
            if not c.one_sided:
                assert abs(c.value - c.expected) <= c.slack


def test_thm4_rotation_roots_present():
    names = {c.name for c in family_census("thm4:1", 9)}  # m = 8
    assert {"thm4_rotation_roots", "central_involution"} <= names
