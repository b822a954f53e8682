from __future__ import annotations

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from bileonard.scalars import (
    DomainError,
    ExtScalar,
    Q,
    UnsupportedExtension,
    common_field,
    demote,
    leading_sign,
    normalize_radicand,
    scalar_from_json,
    scalar_to_json,
    sqrt_exact,
)

R2, R3, I = ExtScalar.sqrt_of(2), ExtScalar.sqrt_of(3), ExtScalar.sqrt_of(-1)

rationals = st.builds(mpq, st.integers(-40, 40), st.integers(1, 12))
nonzero_rationals = st.builds(
    lambda n, d, s: mpq(s * n, d), st.integers(1, 40), st.integers(1, 12), st.sampled_from((1, -1))
)
radicand_sets = st.sampled_from([(), (2,), (-1,), (5,), (2, 3), (-1, 2), (-3, 5), (6, 10)])


@st.composite
def ext_scalars(draw, gens=None):
    gens = draw(radicand_sets) if gens is None else gens
    keys = [1, *gens]
    if len(gens) == 2:
        keys.append(gens[0] * gens[1])
    return ExtScalar({k: draw(rationals) for k in keys})


@st.composite
def same_field_triples(draw):
    gens = draw(radicand_sets)
    return tuple(draw(ext_scalars(gens)) for _ in range(3))


@pytest.mark.parametrize(
    "n, expected",
    [(36, (1, 6)), (-1, (-1, 1)), (12, (3, 2)), (-50, (-2, 5)), (1, (1, 1)), (30, (30, 1))],
)
def test_normalize_radicand(n, expected):
    assert normalize_radicand(n) == expected


def test_normalize_radicand_zero():
    with pytest.raises(DomainError):
        normalize_radicand(0)


@given(st.integers(min_value=-10**6, max_value=10**6).filter(bool))
def test_normalize_radicand_reconstructs(n):
    sf, outer = normalize_radicand(n)
    assert outer * outer * sf == n
    assert outer > 0
    assert all(sf % (p * p) for p in range(2, 1000) if p * p <= abs(sf))


def test_sqrt_examples():
    assert sqrt_exact(mpq(9, 4)) == mpq(3, 2)
    assert sqrt_exact(mpq(9, 4)).is_rational
    assert sqrt_exact(2) == R2
    assert sqrt_exact(-1) == I
    assert sqrt_exact(mpq(-1, 8)) == I * R2 / 4 * (-1) * (-1)
    with pytest.raises(DomainError):
        sqrt_exact(0)


@given(nonzero_rationals)
def test_sqrt_squares_back(q):
    r = sqrt_exact(q)
    assert r * r == q
    assert (-r) * (-r) == q
    assert len(r.radicands) <= 1


def test_field_examples():
    assert (1 + R2) * (1 - R2) == -1
    assert (1 + I) / (1 + I) == 1
    assert R2 * R3 == ExtScalar.sqrt_of(6)
    assert I * I == -1
    assert ExtScalar.sqrt_of(-2) * ExtScalar.sqrt_of(-3) == -ExtScalar.sqrt_of(6)


def test_third_radicand_is_rejected():
    with pytest.raises(UnsupportedExtension):
        R2 + R3 + ExtScalar.sqrt_of(5)
    with pytest.raises(UnsupportedExtension):
        common_field([R2, R3, ExtScalar.sqrt_of(5)])
    assert common_field([R2, R3, R2 * R3]) == (2, 3)


def test_division_by_zero():
    with pytest.raises(DomainError):
        R2 / ExtScalar()
    with pytest.raises(DomainError):
        ExtScalar().inverse()


def test_embedded_rational_equality():
    x = ExtScalar({1: mpq(5, 3)})
    assert x == mpq(5, 3)
    assert mpq(5, 3) == x
    assert hash(x) == hash(mpq(5, 3))
    assert isinstance(demote(x), type(mpq(0)))
    assert (R2 * R2).is_rational


@given(same_field_triples())
def test_field_axioms(t):
    a, b, c = t
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == 0
    if a:
        assert a * a.inverse() == 1
        assert (b / a) * a == b


@given(same_field_triples(), st.integers(min_value=0, max_value=5))
def test_power_matches_repeated_product(t, k):
    a = t[0]
    expected = ExtScalar({1: 1})
    for _ in range(k):
        expected = expected * a
    assert a**k == expected


@given(ext_scalars())
def test_conjugates_multiply_to_rational(a):
    assert a.conjugates()[0] == a
    prod = ExtScalar({1: 1})
    for c in a.conjugates():
        prod = prod * c
    assert prod.is_rational


@given(rationals)
def test_rational_text_round_trip(q):
    text = scalar_to_json(q)
    assert isinstance(text, str)
    assert scalar_from_json(text) == q
    if q.denominator == 1:
        assert "/" not in text


@given(ext_scalars())
def test_ext_text_round_trip(a):
    obj = scalar_to_json(a)
    assert scalar_from_json(obj) == a
    assert scalar_to_json(scalar_from_json(obj)) == obj


def test_text_forms():
    assert scalar_to_json(mpq(-3, 4)) == "-3/4"
    assert scalar_to_json(mpq(6)) == "6"
    assert scalar_to_json(2 * R2 + 1) == {"c0": "1", "c1": "2", "s1": 2}
    assert scalar_from_json({"c0": "1", "c1": "2", "c2": "3", "c3": "4", "s1": 2, "s2": 3}) == 1 + 2 * R2 + 3 * R3 + 4 * R2 * R3
    assert scalar_from_json({"c0": "7"}) == 7


@pytest.mark.parametrize(
    "bad",
    [{"c1": "1", "s1": 4}, {"c1": "1", "s1": 2, "s2": 2}, {"c1": "x", "s1": 2}, True, 1.5, {"q": 1}],
)
def test_malformed_scalar_text(bad):
    with pytest.raises(ValueError):
        scalar_from_json(bad)


def test_extra_radicand_field_is_unsupported():
    with pytest.raises(UnsupportedExtension):
        scalar_from_json({"c1": "1", "s1": 2, "s2": 3, "s3": 5})


def test_leading_sign_and_q():
    assert leading_sign(-R2 + 0) == -1
    assert leading_sign(3 - R2) == 1
    assert leading_sign(mpq(0)) == 0
    assert Q("6/4") == mpq(3, 2)
