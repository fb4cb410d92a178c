from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from grpdrecon.rings import GF, NotAUnitError, Q, Z, is_prime, ring_from_tag


def test_integer_units():
    assert Z.is_unit(-1) and Z.unit_inverse(-1) == -1
    assert Z.is_unit(1)
    assert not Z.is_unit(2)
    with pytest.raises(NotAUnitError):
        Z.unit_inverse(2)


def test_f5_inverse():
    f5 = GF(5)
    assert f5.is_unit(3)
    assert f5.unit_inverse(3) == 2  # 3*2 = 6 = 1 mod 5
    assert f5.mul(3, f5.unit_inverse(3)) == f5.one


def test_rational_units():
    assert Q.is_unit(Fraction(3, 7))
    assert Q.unit_inverse(Fraction(3, 7)) == Fraction(7, 3)
    assert not Q.is_unit(0)


def test_prime_validation():
    with pytest.raises(ValueError):
        GF(6)
    with pytest.raises(ValueError):
        GF(1)
    assert is_prime(2) and is_prime(101) and not is_prime(91)


def test_fp_normalization():
    f3 = GF(3)
    assert f3.normalize(-1) == 2
    assert f3.add(2, 2) == 1
    assert f3.parse("7") == 1


def test_q_parse_lowest_terms():
    v = Q.parse("6/4")
    assert v == Fraction(3, 2)
    assert Q.format(v) == "3/2"
    assert Q.format(Q.parse("-2/2")) == "-1"


def test_ring_from_tag():
    assert ring_from_tag("z") == Z
    assert ring_from_tag("q") == Q
    assert ring_from_tag("fp:7") == GF(7)
    with pytest.raises(ValueError):
        ring_from_tag("r")


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_fp_mul_matches_int_mod(a, b):
    f7 = GF(7)
    assert f7.mul(f7.normalize(a), f7.normalize(b)) == (a * b) % 7


@given(st.sampled_from([1, 2, 3, 4, 5, 6]))
def test_fp_inverse_law(a):
    f7 = GF(7)
    assert f7.mul(a, f7.unit_inverse(a)) == 1
